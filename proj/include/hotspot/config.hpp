#pragma once

// Scenario configuration: a versioned JSON document with every default
// spelled out when serialized.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotspot/params.hpp"
#include "hotspot/synthpop.hpp"
#include "hotspot/testtrace.hpp"

namespace hotspot {

inline constexpr int kSchemaVersion = 1;

/// Policy as declared in the config; windows are ISO dates or open.
struct PolicySpec {
  std::string type;  // social_distancing | beta_multiplier | curfew | vulnerable_distancing | conditional_lockdown
  std::optional<std::string> from;
  std::optional<std::string> to;
  double rho = 0.0;
  PerCategory<double> factors{1.0, 1.0, 1.0, 1.0, 1.0};
  std::uint32_t groups = 2;
  int min_age = 60;
  double threshold_per_100k = 50.0;
  int window_days = 7;
  std::vector<PolicySpec> bundle;
};

struct CalibrationSpec {
  std::vector<double> lo{0.0, 0.0, 0.0};
  std::vector<double> hi{1.5, 1.5, 1.0};
  std::uint32_t downscale = 1;
  std::size_t steps = 40;
  std::size_t init = 20;
  std::size_t rollouts = 8;
  std::size_t fantasies = 16;
  std::size_t candidates = 128;
};

struct ScenarioConfig {
  std::string start_date = "2020-01-01";
  std::size_t horizon_days = 56;
  std::uint64_t seed = 0;
  std::size_t rollouts = 1;
  std::string tiles_path;
  std::string sites_path;
  std::uint64_t population_total = 0;
  std::uint32_t downscale = 1;
  std::uint32_t site_downscale = 1;
  PerAge<double> age_fractions = default_age_fractions();
  HouseholdTable households = default_household_table();
  double compliance = 1.0;
  MobilityTable mobility = default_mobility();
  EpidemicParams epidemic;
  std::uint64_t observed_cases = 0;
  double r0 = 2.0;
  std::vector<PolicySpec> policies;
  TestConfig testing;
  CalibrationSpec calibration;

  /// Checks ranges and dates; throws InputError naming the key path.
  void validate() const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Days between two ISO dates (YYYY-MM-DD); throws InputError on malformed input.
long days_between(const std::string& from, const std::string& to);
/// Adds days to an ISO date.
std::string add_days(const std::string& date, long days);
/// Hours from the scenario start to the given ISO date.
double hours_from_start(const ScenarioConfig& c, const std::string& date);

}  // namespace hotspot
