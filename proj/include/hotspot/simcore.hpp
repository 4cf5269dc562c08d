#pragma once

// Event-driven epidemic simulator over a priority queue of timed events.
// Exposures are sampled per (infector, susceptible) pair by thinning against
// a constant bound and merged by superposition through the shared queue.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hotspot/common.hpp"
#include "hotspot/interventions.hpp"
#include "hotspot/params.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/synthpop.hpp"
#include "hotspot/testtrace.hpp"

namespace hotspot {

enum class Compartment : std::uint8_t { S, E, Ia, Ip, Is, R, D };
inline constexpr std::size_t kNumCompartments = 7;

inline bool is_infectious(Compartment c) {
  return c == Compartment::Ia || c == Compartment::Ip || c == Compartment::Is;
}
/// Health flags that make a test come back positive.
inline bool tests_positive(Compartment c) {
  return c == Compartment::E || is_infectious(c);
}

struct HealthState {
  Compartment state = Compartment::S;
  bool hospitalized = false;
  double t_exposed = kInf;
  double t_infectious = kInf;
  double t_symptomatic = kInf;
  double t_resolved = kInf;
  bool asymptomatic = false;
  bool hospitalize = false;
  bool die = false;
  std::uint32_t tests_positive = 0;
  std::uint32_t tests_negative = 0;
};

enum class EventKind : std::uint8_t {
  Exposure,
  BecomeIa,
  BecomeIp,
  BecomeIs,
  Hospitalize,
  Recover,
  Die,
  TestOutcome,
  PolicyTick,
  TestDequeue,
  Import,
};

std::string_view to_string(EventKind kind);
/// Inverse of to_string for the kinds that appear in event logs.
std::optional<EventKind> parse_event_kind(std::string_view name);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Exposure;
  PersonId subject = kNoPerson;
  PersonId infector = kNoPerson;
  SiteId site = kNoSite;
  std::uint32_t aux = 0;  // test record index for TestOutcome
  std::uint64_t seq = 0;
};

/// Later events compare greater; ties resolve first-in-first-out.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct SeedCounts {
  std::uint64_t symptomatic = 0;
  std::uint64_t asymptomatic = 0;
  std::uint64_t exposed = 0;
};

/// Round-half-up seed counts from the number of observed cases.
SeedCounts init_seeds(std::uint64_t observed_cases, double alpha_a, double r0);

struct SeedAssignment {
  PersonId person = kNoPerson;
  Compartment state = Compartment::E;
  bool transmits = false;
  bool tested_positive = false;
};

/// Picks distinct individuals uniformly at random. Exposed seeds transmit;
/// infectious seeds do not, and symptomatic seeds count as tested positive.
std::vector<SeedAssignment> choose_seeds(const SeedCounts& counts, std::size_t population,
                                         std::uint64_t seed);

/// Site exposure rate from j to i at t, with relative infectiousness r.
double exposure_contribution(PersonId j, PersonId i, double t, const World& world,
                             const EpidemicParams& params, double r);

/// Household exposure rate from j to i at t: xi r times the decayed mass of
/// j being at home over [t - delta, t], gated by i being at home at t.
double household_contribution(PersonId j, PersonId i, double t, const World& world,
                              const EpidemicParams& params, double r);

/// Decayed mass of j being at no site over [t - delta, t].
double home_presence(const Trace& trace_j, double t, double gamma, double delta);

/// Interval of future time during which j can expose i at one site.
struct ContactWindow {
  Interval span;
  SiteId site = kNoSite;
};

/// Merged, time-ordered windows in [t_start, horizon) where i is at a site
/// that j occupied within the last delta hours.
std::vector<ContactWindow> pair_windows(const Trace& trace_j, const Trace& trace_i, double t_start,
                                        double horizon, double delta);

/// Intervals in [t_start, horizon) where the individual is at no site.
std::vector<Interval> home_windows(const Trace& trace, double t_start, double horizon);

struct ThinningStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double max_acceptance = 0.0;
};

/// First accepted site exposure of i by j after t_start, or none before horizon.
std::optional<Event> sample_exposures_from(PersonId j, PersonId i, double t_start, double horizon,
                                           double r, const World& world,
                                           const EpidemicParams& params, Rng& rng,
                                           ThinningStats* stats = nullptr);

/// Same for the household process between members j and i.
std::optional<Event> sample_household_exposure(PersonId j, PersonId i, double t_start,
                                               double horizon, double r, const World& world,
                                               const EpidemicParams& params, Rng& rng,
                                               ThinningStats* stats = nullptr);

/// One entry of the immutable output log.
struct LogRecord {
  double t = 0.0;
  EventKind kind = EventKind::Exposure;
  PersonId subject = kNoPerson;
  PersonId infector = kNoPerson;
  SiteId site = kNoSite;
  bool positive = false;  // TestOutcome only
};

struct EventLog {
  std::size_t population = 0;
  double t_max = 0.0;
  std::vector<LogRecord> records;
  std::vector<TestRecord> tests;
  std::vector<Interval> lockdown;
  ThinningStats thinning;
};

struct SimulationSetup {
  EpidemicParams params;
  PolicySet policies;
  TestConfig testing;
  double t_max = 0.0;
};

EventLog run_simulation(const World& world, const SimulationSetup& setup,
                        std::span<const SeedAssignment> seeds, std::uint64_t seed);

/// Convenience overload drawing the seeded individuals from `seed`.
EventLog run_simulation(const World& world, const SimulationSetup& setup, const SeedCounts& counts,
                        std::uint64_t seed);

/// Per-compartment counts after replaying all records with t < until.
struct CompartmentCounts {
  std::array<std::uint64_t, kNumCompartments> n{};
  std::uint64_t hospitalized = 0;
  std::uint64_t cum_positive = 0;
};

/// Daily snapshots at t = 24 (d + 1) for d in [0, days).
std::vector<CompartmentCounts> daily_counts(const EventLog& log, std::size_t days);

}  // namespace hotspot
