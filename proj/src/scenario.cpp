#include "hotspot/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "hotspot/analysis.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

Scenario make_scenario(ScenarioConfig config, const std::filesystem::path& base_dir) {
  config.validate();
  Scenario s;
  s.base_dir = base_dir;
  s.tiles = read_tiles_csv(base_dir / config.tiles_path);
  s.sites = read_sites_csv(base_dir / config.sites_path);
  if (s.tiles.empty()) throw InputError("region has no tiles");
  if (s.sites.empty()) throw InputError("region has no sites");
  s.config = std::move(config);
  return s;
}

Scenario load_scenario(const std::filesystem::path& config_path) {
  auto config = load_config(config_path);
  return make_scenario(std::move(config), config_path.parent_path());
}

WorldSpec world_spec(const Scenario& s, Scale scale) {
  const auto& c = s.config;
  WorldSpec w;
  w.population.tiles = s.tiles;
  w.population.age_fractions = c.age_fractions;
  w.population.households = c.households;
  w.population.total = c.population_total;
  w.population.downscale = scale.population ? scale.population : c.downscale;
  w.sites = s.sites;
  w.site_downscale = scale.sites ? scale.sites : c.site_downscale;
  w.mobility = c.mobility;
  w.t_max = static_cast<double>(c.horizon_days) * kHoursPerDay;
  w.compliance = c.compliance;
  w.curfew_groups = 1;
  for (const auto& p : c.policies)
    if (p.type == "curfew") w.curfew_groups = std::max(w.curfew_groups, p.groups);
  return w;
}

namespace {

// Dates are whole days: `from` starts at midnight, `to` includes its day.
Interval window_of(const ScenarioConfig& c, const PolicySpec& p) {
  Interval w{0.0, kInf};
  if (p.from) w.from = hours_from_start(c, *p.from);
  if (p.to) w.to = hours_from_start(c, *p.to) + kHoursPerDay;
  return w;
}

}  // namespace

std::vector<Policy> build_policies(const ScenarioConfig& c) {
  std::vector<Policy> out;
  for (const auto& p : c.policies) {
    const Interval w = window_of(c, p);
    if (p.type == "social_distancing") {
      out.emplace_back(SocialDistancing{p.rho, w});
    } else if (p.type == "beta_multiplier") {
      out.emplace_back(BetaMultiplier{p.factors, w});
    } else if (p.type == "curfew") {
      out.emplace_back(AlternatingCurfew{p.groups, w});
    } else if (p.type == "vulnerable_distancing") {
      out.emplace_back(VulnerableDistancing{p.rho, p.min_age, w});
    } else if (p.type == "conditional_lockdown") {
      ConditionalLockdown l;
      l.threshold_per_100k = p.threshold_per_100k;
      l.window_days = p.window_days;
      l.window = w;
      for (const auto& b : p.bundle) {
        if (b.type == "social_distancing") l.distancing.push_back({b.rho, {0.0, kInf}});
        else l.multipliers.push_back({b.factors, {0.0, kInf}});
      }
      out.emplace_back(std::move(l));
    } else {
      throw InputError("unknown policy type '" + p.type + "'");
    }
  }
  return out;
}

SimulationSetup simulation_setup(const ScenarioConfig& c) {
  SimulationSetup setup;
  setup.params = c.epidemic;
  setup.policies = PolicySet(build_policies(c));
  setup.testing = c.testing;
  setup.t_max = static_cast<double>(c.horizon_days) * kHoursPerDay;
  return setup;
}

SeedCounts seed_counts(const ScenarioConfig& c) {
  return init_seeds(c.observed_cases, c.epidemic.alpha_a, c.r0);
}

std::uint64_t rollout_seed(std::uint64_t master, std::size_t rollout) {
  return derive_seed(master, {0x726f6c6cULL, static_cast<std::uint64_t>(rollout)});
}

Rollout run_rollout(const Scenario& s, std::size_t rollout, Scale scale) {
  const auto seed = rollout_seed(s.config.seed, rollout);
  Rollout r;
  r.world = build_world(world_spec(s, scale), seed);
  const auto counts = seed_counts(s.config);
  if (counts.symptomatic + counts.asymptomatic + counts.exposed > r.world.size())
    throw InputError("more seeded cases than individuals in the population");
  r.log = run_simulation(r.world, simulation_setup(s.config), counts, seed);
  return r;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("HOTSPOT_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_rollouts(const Scenario& s, std::size_t n, Scale scale,
                  const std::function<void(std::size_t, Rollout&&)>& done) {
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (std::size_t r; (r = next++) < n;) {
      try {
        auto result = run_rollout(s, r, scale);
        const std::lock_guard lock(mutex);
        if (!error) done(r, std::move(result));
      } catch (...) {
        const std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

ScenarioConfig apply_theta(const ScenarioConfig& c, const std::vector<double>& theta) {
  if (theta.size() != 3) throw InputError("theta must have three entries (beta, xi, rho)");
  ScenarioConfig out = c;
  out.epidemic.beta.fill(theta[0]);
  out.epidemic.xi = theta[1];
  for (auto& p : out.policies) {
    if (p.type == "social_distancing") p.rho = theta[2];
    for (auto& b : p.bundle)
      if (b.type == "social_distancing") b.rho = theta[2];
  }
  return out;
}

CaseTarget case_target(const ScenarioConfig& c, std::span<const CaseRow> rows) {
  CaseTarget t;
  for (const auto& row : rows) {
    const long d = days_between(c.start_date, row.date);
    if (d < 0 || d >= static_cast<long>(c.horizon_days))
      throw InputError("case date " + row.date + " lies outside the simulation horizon");
    if (!t.days.empty() && static_cast<std::size_t>(d) <= t.days.back())
      throw InputError("case dates must be strictly increasing");
    t.days.push_back(static_cast<std::size_t>(d));
    t.values.push_back(row.cumulative_positive);
  }
  if (t.days.empty()) throw InputError("empty case series");
  return t;
}

std::vector<double> simulate_g(const Scenario& s, const std::vector<double>& theta,
                               const CaseTarget& target, std::size_t rollouts,
                               std::uint32_t downscale, std::uint64_t seed) {
  if (rollouts == 0) throw InputError("simulate_g needs at least one rollout");
  Scenario local = s;
  local.config = apply_theta(s.config, theta);
  local.config.seed = seed;
  const std::size_t days = target.days.back() + 1;
  std::vector<double> mean(target.days.size(), 0.0);
  run_rollouts(local, rollouts, {downscale, downscale}, [&](std::size_t, Rollout&& r) {
    const auto cum = daily_cum_positive(r.log, days);
    for (std::size_t n = 0; n < target.days.size(); ++n) mean[n] += cum[target.days[n]];
  });
  for (double& m : mean) m /= static_cast<double>(rollouts);
  return mean;
}

}  // namespace hotspot
