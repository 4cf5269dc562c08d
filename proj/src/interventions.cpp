#include "hotspot/interventions.hpp"

#include <cmath>
#include <numeric>

#include "hotspot/rng.hpp"

namespace hotspot {

bool LockdownController::active_at(double t) const {
  for (const auto& iv : history_)
    if (t >= iv.from && t < iv.to) return true;
  return false;
}

void LockdownController::update(double t, bool exceeds) {
  if (exceeds && !active_) {
    active_ = true;
    history_.push_back({t, kInf});
  } else if (!exceeds && active_) {
    active_ = false;
    history_.back().to = t;
  }
}

void LockdownController::finish(double t_end) {
  if (active_ && !history_.empty() && history_.back().to > t_end) history_.back().to = t_end;
}

bool lockdown_triggered(std::span<const double> last_days_new_cases, double population,
                        double threshold_per_100k) {
  if (!(population > 0.0)) return false;
  const double cases = std::accumulate(last_days_new_cases.begin(), last_days_new_cases.end(), 0.0);
  return cases * 100000.0 / population > threshold_per_100k;
}

void conditional_lockdown_tick(ConditionalLockdown& lockdown, double t,
                               std::span<const double> last_days_new_cases, double population) {
  const bool in_window = t >= lockdown.window.from && t < lockdown.window.to;
  lockdown.controller.update(
      t, in_window && lockdown_triggered(last_days_new_cases, population, lockdown.threshold_per_100k));
}

double VisitCoins::draw(std::size_t policy, PersonId person, std::uint32_t visit) const {
  return hash_uniform(derive_seed(seed, {policy, person, visit}));
}

bool PolicySet::has_conditional() const {
  for (const auto& p : policies_)
    if (std::holds_alternative<ConditionalLockdown>(p)) return true;
  return false;
}

namespace {

bool distancing_skips(const SocialDistancing& sd, double t, double coin) {
  return sd.window.contains(t) && coin < sd.rho;
}

}  // namespace

bool PolicySet::visit_admitted(const Individual& person, std::uint32_t visit_index,
                               const Visit& visit, const VisitCoins& coins) const {
  const double t = visit.arrive;
  for (std::size_t n = 0; n < policies_.size(); ++n) {
    const bool skipped = std::visit(
        [&](const auto& p) -> bool {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, SocialDistancing>) {
            return p.rho > 0.0 && distancing_skips(p, t, coins.draw(n, person.id, visit_index));
          } else if constexpr (std::is_same_v<P, AlternatingCurfew>) {
            if (!p.window.contains(t) || p.groups <= 1) return false;
            const auto day = static_cast<std::uint64_t>(std::floor(t / kHoursPerDay));
            return person.curfew_group != day % p.groups;
          } else if constexpr (std::is_same_v<P, VulnerableDistancing>) {
            return p.window.contains(t) && p.rho > 0.0 &&
                   kAgeGroupLowerBound[index_of(person.age)] >= p.min_age &&
                   coins.draw(n, person.id, visit_index) < p.rho;
          } else if constexpr (std::is_same_v<P, ConditionalLockdown>) {
            if (!p.controller.active_at(t)) return false;
            for (std::size_t m = 0; m < p.distancing.size(); ++m) {
              SocialDistancing sd = p.distancing[m];
              sd.window = {-kInf, kInf};
              if (sd.rho > 0.0 &&
                  distancing_skips(sd, t, coins.draw(n * 64 + m + 1, person.id, visit_index)))
                return true;
            }
            return false;
          } else {
            return false;
          }
        },
        policies_[n]);
    if (skipped) return false;
  }
  return true;
}

double PolicySet::beta_multiplier(SiteCategory category, double t) const {
  double m = 1.0;
  const auto c = index_of(category);
  for (const auto& policy : policies_) {
    if (const auto* bm = std::get_if<BetaMultiplier>(&policy)) {
      if (bm->window.contains(t)) m *= bm->factor[c];
    } else if (const auto* cl = std::get_if<ConditionalLockdown>(&policy)) {
      if (cl->controller.active_at(t))
        for (const auto& b : cl->multipliers) m *= b.factor[c];
    }
  }
  return m;
}

double effective_beta(const Site& site, double t, const PolicySet& policies,
                      const PerCategory<double>& base_beta) {
  return base_beta[index_of(site.category)] * policies.beta_multiplier(site.category, t);
}

}  // namespace hotspot
