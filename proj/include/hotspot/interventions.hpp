#pragma once

// Containment measures. Every measure only ever thins exposure intensity:
// visits are skipped (mobility) or site transmission rates are scaled down.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hotspot/common.hpp"
#include "hotspot/synthpop.hpp"

namespace hotspot {

struct SocialDistancing {
  double rho = 0.0;
  Interval window;
};

struct BetaMultiplier {
  PerCategory<double> factor{1.0, 1.0, 1.0, 1.0, 1.0};
  Interval window;
};

/// On day d only individuals with curfew_group == d mod groups keep their visits.
struct AlternatingCurfew {
  std::uint32_t groups = 1;
  Interval window;
};

struct VulnerableDistancing {
  double rho = 0.0;
  int min_age = 60;
  Interval window;
};

/// On/off history of a case-conditional lockdown.
class LockdownController {
 public:
  [[nodiscard]] bool active() const { return active_; }
  [[nodiscard]] bool active_at(double t) const;
  [[nodiscard]] const std::vector<Interval>& history() const { return history_; }

  /// Evaluates the trigger at time t; an open interval is closed at the first
  /// evaluation where the incidence is back at or below the threshold.
  void update(double t, bool exceeds);
  /// Closes a still-open activation at the horizon.
  void finish(double t_end);

 private:
  bool active_ = false;
  std::vector<Interval> history_;
};

struct ConditionalLockdown {
  double threshold_per_100k = 50.0;
  int window_days = 7;
  std::vector<SocialDistancing> distancing;
  std::vector<BetaMultiplier> multipliers;
  Interval window{0.0, kInf};  // period during which the trigger is evaluated
  LockdownController controller;
};

using Policy = std::variant<SocialDistancing, BetaMultiplier, AlternatingCurfew,
                            VulnerableDistancing, ConditionalLockdown>;

/// True when the 7-day incidence strictly exceeds the threshold.
bool lockdown_triggered(std::span<const double> last_days_new_cases, double population,
                        double threshold_per_100k);

/// Applies one daily evaluation of the conditional lockdown.
void conditional_lockdown_tick(ConditionalLockdown& lockdown, double t,
                               std::span<const double> last_days_new_cases, double population);

/// Deterministic per-visit coin source: the same visit always gets the same
/// draw, so skipped visits stay skipped across repeated evaluations.
struct VisitCoins {
  std::uint64_t seed = 0;
  [[nodiscard]] double draw(std::size_t policy, PersonId person, std::uint32_t visit) const;
};

class PolicySet {
 public:
  PolicySet() = default;
  explicit PolicySet(std::vector<Policy> policies) : policies_(std::move(policies)) {}

  [[nodiscard]] bool empty() const { return policies_.empty(); }
  [[nodiscard]] std::span<const Policy> policies() const { return policies_; }
  [[nodiscard]] std::span<Policy> policies() { return policies_; }
  [[nodiscard]] bool has_conditional() const;

  /// Whether the visit takes place under the measures active at its arrival.
  [[nodiscard]] bool visit_admitted(const Individual& person, std::uint32_t visit_index,
                                    const Visit& visit, const VisitCoins& coins) const;

  /// Product of the active transmission-rate multipliers for a category at t.
  [[nodiscard]] double beta_multiplier(SiteCategory category, double t) const;

 private:
  std::vector<Policy> policies_;
};

/// Base beta of the site's category times the active multipliers.
double effective_beta(const Site& site, double t, const PolicySet& policies,
                      const PerCategory<double>& base_beta);

}  // namespace hotspot
