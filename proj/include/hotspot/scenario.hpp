#pragma once

// Glue between a scenario config and the simulator: world construction,
// policy windows in hours, seeded rollouts and the calibration black box.

#include <filesystem>
#include <functional>
#include <vector>

#include "hotspot/config.hpp"
#include "hotspot/interventions.hpp"
#include "hotspot/io.hpp"
#include "hotspot/simcore.hpp"

namespace hotspot {

struct Scenario {
  ScenarioConfig config;
  std::filesystem::path base_dir;  // region paths are relative to this
  std::vector<Tile> tiles;
  std::vector<Site> sites;
};

/// Loads and validates a config, then reads its region files.
Scenario load_scenario(const std::filesystem::path& config_path);
Scenario make_scenario(ScenarioConfig config, const std::filesystem::path& base_dir);

/// Overrides for downscaled runs; 0 keeps the configured value.
struct Scale {
  std::uint32_t population = 0;
  std::uint32_t sites = 0;
};

WorldSpec world_spec(const Scenario& s, Scale scale = {});
std::vector<Policy> build_policies(const ScenarioConfig& c);
SimulationSetup simulation_setup(const ScenarioConfig& c);
SeedCounts seed_counts(const ScenarioConfig& c);

/// Seed of rollout r; the world and the simulation both derive from it.
std::uint64_t rollout_seed(std::uint64_t master, std::size_t rollout);

struct Rollout {
  World world;
  EventLog log;
};
Rollout run_rollout(const Scenario& s, std::size_t rollout, Scale scale = {});

/// Worker count: HOTSPOT_THREADS if set, else the hardware concurrency.
std::size_t worker_count();

/// Runs rollouts [0, n) on a worker pool; `done` is called once per rollout,
/// serialized, in completion order.
void run_rollouts(const Scenario& s, std::size_t n, Scale scale,
                  const std::function<void(std::size_t, Rollout&&)>& done);

/// Sets every category's beta to theta[0], xi to theta[1], and the
/// social-distancing rho (including bundled ones) to theta[2].
ScenarioConfig apply_theta(const ScenarioConfig& c, const std::vector<double>& theta);

/// Observed cumulative positives on the days covered by the case series.
struct CaseTarget {
  std::vector<std::size_t> days;  // day index from the scenario start
  std::vector<double> values;
};
CaseTarget case_target(const ScenarioConfig& c, std::span<const CaseRow> rows);

/// Mean simulated cumulative positives on the target days over `rollouts`
/// rollouts, population and sites downscaled by `downscale`.
std::vector<double> simulate_g(const Scenario& s, const std::vector<double>& theta,
                               const CaseTarget& target, std::size_t rollouts,
                               std::uint32_t downscale, std::uint64_t seed);

}  // namespace hotspot
