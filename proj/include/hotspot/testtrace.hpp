#pragma once

// Testing queue, contact tracing and exposure-risk estimates over check-in traces.

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "hotspot/common.hpp"
#include "hotspot/params.hpp"
#include "hotspot/synthpop.hpp"

namespace hotspot {

enum class TracingMode : std::uint8_t { None, Isolate, IsolateTest, IsolateTestRanked };
enum class TracingKind : std::uint8_t { Location, Proximity };

struct TracingConfig {
  TracingMode mode = TracingMode::None;
  TracingKind kind = TracingKind::Location;
  double lookback_days = 10.0;
  double isolation_days = 14.0;
  double compliance = 1.0;
  std::size_t top_k = 20;
};

struct TestConfig {
  double delta_test_h = 48.0;
  double tests_per_day = 0.0;  // 0 disables symptomatic testing
  TracingConfig tracing;
  /// Positively tested individuals stop visiting sites and leave the household.
  bool isolate_positives = true;

  void validate() const;
};

struct TestRecord {
  PersonId person = kNoPerson;
  double t_enqueue = 0.0;
  double t_sample = 0.0;
  double t_outcome = 0.0;
  bool positive = false;
};

/// FIFO test queue served at evenly spaced slots (tests_per_day per day).
class TestQueue {
 public:
  explicit TestQueue(double tests_per_day);

  /// Enqueues and returns the sampling time of this individual's slot.
  double enqueue(PersonId person, double t);
  /// Removes and returns the head of the queue.
  PersonId dequeue();

  [[nodiscard]] std::size_t enqueued() const { return enqueued_; }
  [[nodiscard]] std::size_t dequeued() const { return dequeued_; }
  [[nodiscard]] std::size_t waiting() const { return queue_.size(); }

 private:
  double spacing_h_;
  std::uint64_t next_slot_ = 0;
  std::deque<std::pair<PersonId, double>> queue_;
  std::size_t enqueued_ = 0;
  std::size_t dequeued_ = 0;
};

/// Optional filter on (person, visit index); visits it rejects never happened.
using VisitFilter = std::function<bool(PersonId, std::uint32_t)>;

struct ContactRecord {
  PersonId i = kNoPerson;
  PersonId j = kNoPerson;
  SiteId site = kNoSite;   // site with the largest contribution
  double overlap_kernel = 0.0;
  Interval window;
};

/// Contacts j of i with positive location kernel
/// sum_k int_{t0}^{tf} P_ik(t') int_{t'-delta}^{t'} P_jk(tau) e^{-gamma (t'-tau)} dtau dt'.
std::vector<ContactRecord> trace_contacts_location(PersonId i, Interval window, const World& world,
                                                   const EpidemicParams& params,
                                                   const VisitFilter& filter = {});

/// Contacts strictly co-present with i during the window; kernel is the co-presence time.
std::vector<ContactRecord> trace_contacts_proximity(PersonId i, Interval window, const World& world,
                                                    const VisitFilter& filter = {});

/// Beta-weighted kernel from infector i to j: sum_k beta_k int P_jk(t') int P_ik(tau) e^{..}.
double exposure_kernel(PersonId infector, PersonId j, Interval window, const World& world,
                       const EpidemicParams& params, const VisitFilter& filter = {});

/// 1 - exp(-K) of the beta-weighted kernel above.
double empirical_exposure_probability(PersonId infector, PersonId j, Interval window,
                                      const World& world, const EpidemicParams& params,
                                      const VisitFilter& filter = {});

struct RankedContact {
  PersonId id;
  double p_hat;
};

/// Descending by p_hat, ties by ascending id, at most top_k entries.
std::vector<PersonId> rank_contacts(std::vector<RankedContact> contacts, std::size_t top_k);

/// Narrowcast exposure probability of a site over a window, computed from the
/// given positively tested individuals' presence only.
double narrowcast_site_risk(SiteId site, Interval window, std::span<const PersonId> positives,
                            const World& world, const EpidemicParams& params,
                            const VisitFilter& filter = {});

/// Whether a traced chain index -> contact is followed: both must comply.
inline bool chain_tracked(bool index_compliant, bool contact_compliant) {
  return index_compliant && contact_compliant;
}

}  // namespace hotspot
