#include "hotspot/config.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

namespace hotspot {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("config " + path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) fail(path + "." + k, "unknown key");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

void read_opt_string(const json& obj, const char* key, std::optional<std::string>& out,
                     const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  if (!obj.at(key).is_string()) fail(path + "." + key, "expected a string");
  out = obj.at(key).get<std::string>();
}

template <class T>
void read_per_category(const json& obj, const char* key, PerCategory<T>& out, const std::string& path) {
  if (!obj.contains(key)) return;
  const auto& o = obj.at(key);
  const std::string p = path + "." + key;
  if (!o.is_object()) fail(p, "expected an object keyed by site category");
  for (const auto& [k, v] : o.items()) {
    const auto c = parse_category(k);
    if (!c) fail(p + "." + k, "unknown site category");
    try {
      out[index_of(*c)] = v.template get<T>();
    } catch (const json::exception&) {
      fail(p + "." + k, "has the wrong type");
    }
  }
}

template <class T, class F>
void read_per_age(const json& obj, const char* key, PerAge<T>& out, const std::string& path, F&& each) {
  if (!obj.contains(key)) return;
  const auto& o = obj.at(key);
  const std::string p = path + "." + key;
  if (!o.is_object()) fail(p, "expected an object keyed by age band");
  for (const auto& [k, v] : o.items()) {
    const auto a = parse_age_group(k);
    if (!a) fail(p + "." + k, "unknown age band");
    each(out[index_of(*a)], v, p + "." + k);
  }
}

template <class T>
json per_category_json(const PerCategory<T>& v) {
  json o = json::object();
  for (std::size_t c = 0; c < kNumCategories; ++c) o[std::string(kCategoryNames[c])] = v[c];
  return o;
}

template <class T, class F>
json per_age_json(const PerAge<T>& v, F&& each) {
  json o = json::object();
  for (std::size_t a = 0; a < kNumAgeGroups; ++a) o[std::string(kAgeGroupNames[a])] = each(v[a]);
  return o;
}

std::string mode_name(TracingMode m) {
  switch (m) {
    case TracingMode::None: return "none";
    case TracingMode::Isolate: return "isolate";
    case TracingMode::IsolateTest: return "isolate_test";
    case TracingMode::IsolateTestRanked: return "isolate_test_ranked";
  }
  return "none";
}

TracingMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "none") return TracingMode::None;
  if (s == "isolate") return TracingMode::Isolate;
  if (s == "isolate_test") return TracingMode::IsolateTest;
  if (s == "isolate_test_ranked") return TracingMode::IsolateTestRanked;
  fail(path, "unknown tracing mode '" + s + "'");
}

PolicySpec parse_policy(const json& j, const std::string& path) {
  only_keys(j, path, {"type", "from", "to", "rho", "factors", "groups", "min_age",
                      "threshold_per_100k", "window_days", "policies"});
  PolicySpec p;
  read(j, "type", p.type, path);
  static const std::set<std::string> kTypes{"social_distancing", "beta_multiplier", "curfew",
                                            "vulnerable_distancing", "conditional_lockdown"};
  if (!kTypes.count(p.type)) fail(path + ".type", "unknown policy type '" + p.type + "'");
  read_opt_string(j, "from", p.from, path);
  read_opt_string(j, "to", p.to, path);
  read(j, "rho", p.rho, path);
  read_per_category(j, "factors", p.factors, path);
  read(j, "groups", p.groups, path);
  read(j, "min_age", p.min_age, path);
  read(j, "threshold_per_100k", p.threshold_per_100k, path);
  read(j, "window_days", p.window_days, path);
  if (j.contains("policies")) {
    if (!j.at("policies").is_array()) fail(path + ".policies", "expected an array");
    for (std::size_t n = 0; n < j.at("policies").size(); ++n)
      p.bundle.push_back(parse_policy(j.at("policies")[n], path + ".policies[" + std::to_string(n) + "]"));
  }
  return p;
}

json policy_json(const PolicySpec& p) {
  json j;
  j["type"] = p.type;
  j["from"] = p.from ? json(*p.from) : json(nullptr);
  j["to"] = p.to ? json(*p.to) : json(nullptr);
  if (p.type == "social_distancing" || p.type == "vulnerable_distancing") j["rho"] = p.rho;
  if (p.type == "vulnerable_distancing") j["min_age"] = p.min_age;
  if (p.type == "beta_multiplier") j["factors"] = per_category_json(p.factors);
  if (p.type == "curfew") j["groups"] = p.groups;
  if (p.type == "conditional_lockdown") {
    j["threshold_per_100k"] = p.threshold_per_100k;
    j["window_days"] = p.window_days;
    j["policies"] = json::array();
    for (const auto& b : p.bundle) j["policies"].push_back(policy_json(b));
  }
  return j;
}

std::chrono::sys_days parse_date(const std::string& s) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
    throw InputError("malformed ISO date '" + s + "' (expected YYYY-MM-DD)");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + s + "'");
  return std::chrono::sys_days{ymd};
}

void validate_policy(const PolicySpec& p, const ScenarioConfig& c, const std::string& path) {
  auto check_date = [&](const std::optional<std::string>& d, const char* key) {
    if (!d) return;
    try {
      const long days = days_between(c.start_date, *d);
      if (days < 0 || days > static_cast<long>(c.horizon_days))
        fail(path + "." + key, "date " + *d + " lies outside the simulation horizon");
    } catch (const InputError& e) {
      if (std::string(e.what()).rfind("config", 0) == 0) throw;
      fail(path + "." + key, e.what());
    }
  };
  check_date(p.from, "from");
  check_date(p.to, "to");
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) fail(path + ".rho", "must lie in [0, 1]");
  for (double f : p.factors)
    if (!(f >= 0.0 && f <= 1.0)) fail(path + ".factors", "multipliers must lie in [0, 1]");
  if (p.groups < 1) fail(path + ".groups", "must be >= 1");
  if (!(p.threshold_per_100k > 0.0)) fail(path + ".threshold_per_100k", "must be > 0");
  if (p.window_days < 1) fail(path + ".window_days", "must be >= 1");
  for (std::size_t n = 0; n < p.bundle.size(); ++n) {
    const auto& b = p.bundle[n];
    const std::string bp = path + ".policies[" + std::to_string(n) + "]";
    if (b.type != "social_distancing" && b.type != "beta_multiplier")
      fail(bp + ".type", "conditional lockdowns bundle only social_distancing and beta_multiplier");
    validate_policy(b, c, bp);
  }
}

}  // namespace

long days_between(const std::string& from, const std::string& to) {
  return (parse_date(to) - parse_date(from)).count();
}

std::string add_days(const std::string& date, long days) {
  const std::chrono::year_month_day ymd{parse_date(date) + std::chrono::days{days}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

double hours_from_start(const ScenarioConfig& c, const std::string& date) {
  return static_cast<double>(days_between(c.start_date, date)) * kHoursPerDay;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  only_keys(j, "", {"schema_version", "start_date", "horizon_days", "seed", "rollouts", "region",
                    "population", "mobility", "epidemic", "seeding", "policies", "testing",
                    "calibration"});
  if (!j.contains("schema_version")) fail("schema_version", "is required");
  int version = 0;
  read(j, "schema_version", version, "");
  if (version != kSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(version));
  read(j, "start_date", c.start_date, "");
  read(j, "horizon_days", c.horizon_days, "");
  read(j, "seed", c.seed, "");
  read(j, "rollouts", c.rollouts, "");

  if (!j.contains("region")) fail("region", "is required");
  const auto& region = j.at("region");
  only_keys(region, "region", {"tiles", "sites"});
  read(region, "tiles", c.tiles_path, "region");
  read(region, "sites", c.sites_path, "region");

  if (j.contains("population")) {
    const auto& p = j.at("population");
    only_keys(p, "population", {"total", "downscale", "site_downscale", "age_fractions", "households", "compliance"});
    read(p, "total", c.population_total, "population");
    read(p, "downscale", c.downscale, "population");
    read(p, "site_downscale", c.site_downscale, "population");
    read(p, "compliance", c.compliance, "population");
    read_per_age(p, "age_fractions", c.age_fractions, "population", [](double& out, const json& v, const std::string& path) {
      if (!v.is_number()) fail(path, "expected a number");
      out = v.get<double>();
    });
    if (p.contains("households")) {
      const auto& h = p.at("households");
      only_keys(h, "population.households", {"size_fractions", "member_weights"});
      read(h, "size_fractions", c.households.size_fractions, "population.households");
      if (h.contains("member_weights")) {
        const auto& mw = h.at("member_weights");
        if (!mw.is_array()) fail("population.households.member_weights", "expected an array");
        c.households.member_weights.clear();
        for (std::size_t n = 0; n < mw.size(); ++n) {
          PerAge<double> w{};
          const std::string path = "population.households.member_weights[" + std::to_string(n) + "]";
          if (!mw[n].is_object()) fail(path, "expected an object keyed by age band");
          for (const auto& [k, v] : mw[n].items()) {
            const auto a = parse_age_group(k);
            if (!a || !v.is_number()) fail(path + "." + k, "expected a number for a known age band");
            w[index_of(*a)] = v.get<double>();
          }
          c.households.member_weights.push_back(w);
        }
      }
    }
  }

  if (j.contains("mobility")) {
    const auto& m = j.at("mobility");
    only_keys(m, "mobility", {"visits_per_week", "mean_duration_min", "sites_per_category"});
    read_per_age(m, "visits_per_week", c.mobility.visits_per_week, "mobility",
                 [](PerCategory<double>& out, const json& v, const std::string& path) {
                   if (!v.is_object()) fail(path, "expected an object keyed by site category");
                   json wrapper{{"v", v}};
                   read_per_category(wrapper, "v", out, path);
                 });
    read_per_category(m, "mean_duration_min", c.mobility.mean_duration_min, "mobility");
    read_per_category(m, "sites_per_category", c.mobility.sites_per_category, "mobility");
  }

  if (j.contains("epidemic")) {
    const auto& e = j.at("epidemic");
    only_keys(e, "epidemic", {"beta", "xi", "mu", "gamma", "delta", "alpha_a", "alpha_h", "alpha_b",
                              "lognormal", "background_per_week_per_100k"});
    auto& ep = c.epidemic;
    if (e.contains("beta")) {
      if (e.at("beta").is_number())
        ep.beta.fill(e.at("beta").get<double>());
      else
        read_per_category(e, "beta", ep.beta, "epidemic");
    }
    read(e, "xi", ep.xi, "epidemic");
    read(e, "mu", ep.mu, "epidemic");
    read(e, "gamma", ep.gamma, "epidemic");
    read(e, "delta", ep.delta, "epidemic");
    read(e, "alpha_a", ep.alpha_a, "epidemic");
    auto number = [](double& out, const json& v, const std::string& path) {
      if (!v.is_number()) fail(path, "expected a number");
      out = v.get<double>();
    };
    read_per_age(e, "alpha_h", ep.alpha_h, "epidemic", number);
    read_per_age(e, "alpha_b", ep.alpha_b, "epidemic", number);
    read(e, "background_per_week_per_100k", ep.background_per_week_per_100k, "epidemic");
    if (e.contains("lognormal")) {
      const auto& ln = e.at("lognormal");
      only_keys(ln, "epidemic.lognormal", {"M", "R", "W", "Y", "Z"});
      auto pair = [&](const char* key, LogNormal& out) {
        if (!ln.contains(key)) return;
        const auto& v = ln.at(key);
        const std::string path = std::string("epidemic.lognormal.") + key;
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          fail(path, "expected [meanlog, sdlog]");
        out = {v[0].get<double>(), v[1].get<double>()};
      };
      pair("M", ep.incubation);
      pair("R", ep.recovery);
      pair("W", ep.presymptomatic);
      pair("Y", ep.to_hospital);
      pair("Z", ep.to_death);
    }
  }

  if (j.contains("seeding")) {
    const auto& s = j.at("seeding");
    only_keys(s, "seeding", {"observed_cases", "r0"});
    read(s, "observed_cases", c.observed_cases, "seeding");
    read(s, "r0", c.r0, "seeding");
  }

  if (j.contains("policies")) {
    if (!j.at("policies").is_array()) fail("policies", "expected an array");
    for (std::size_t n = 0; n < j.at("policies").size(); ++n)
      c.policies.push_back(parse_policy(j.at("policies")[n], "policies[" + std::to_string(n) + "]"));
  }

  if (j.contains("testing")) {
    const auto& t = j.at("testing");
    only_keys(t, "testing", {"delta_test_h", "tests_per_day", "isolate_positives", "tracing"});
    read(t, "delta_test_h", c.testing.delta_test_h, "testing");
    read(t, "tests_per_day", c.testing.tests_per_day, "testing");
    read(t, "isolate_positives", c.testing.isolate_positives, "testing");
    if (t.contains("tracing")) {
      const auto& tr = t.at("tracing");
      only_keys(tr, "testing.tracing", {"mode", "kind", "lookback_days", "isolation_days", "compliance", "top_k"});
      std::string mode = mode_name(c.testing.tracing.mode);
      read(tr, "mode", mode, "testing.tracing");
      c.testing.tracing.mode = parse_mode(mode, "testing.tracing.mode");
      std::string kind = c.testing.tracing.kind == TracingKind::Location ? "location" : "proximity";
      read(tr, "kind", kind, "testing.tracing");
      if (kind != "location" && kind != "proximity") fail("testing.tracing.kind", "must be location or proximity");
      c.testing.tracing.kind = kind == "location" ? TracingKind::Location : TracingKind::Proximity;
      read(tr, "lookback_days", c.testing.tracing.lookback_days, "testing.tracing");
      read(tr, "isolation_days", c.testing.tracing.isolation_days, "testing.tracing");
      read(tr, "compliance", c.testing.tracing.compliance, "testing.tracing");
      read(tr, "top_k", c.testing.tracing.top_k, "testing.tracing");
    }
  }

  if (j.contains("calibration")) {
    const auto& k = j.at("calibration");
    only_keys(k, "calibration", {"domain", "downscale", "steps", "init", "rollouts", "fantasies", "candidates"});
    if (k.contains("domain")) {
      const auto& d = k.at("domain");
      only_keys(d, "calibration.domain", {"beta", "xi", "rho"});
      const char* names[] = {"beta", "xi", "rho"};
      for (std::size_t n = 0; n < 3; ++n) {
        if (!d.contains(names[n])) continue;
        const auto& v = d.at(names[n]);
        const std::string path = std::string("calibration.domain.") + names[n];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          fail(path, "expected [lo, hi]");
        c.calibration.lo[n] = v[0].get<double>();
        c.calibration.hi[n] = v[1].get<double>();
      }
    }
    read(k, "downscale", c.calibration.downscale, "calibration");
    read(k, "steps", c.calibration.steps, "calibration");
    read(k, "init", c.calibration.init, "calibration");
    read(k, "rollouts", c.calibration.rollouts, "calibration");
    read(k, "fantasies", c.calibration.fantasies, "calibration");
    read(k, "candidates", c.calibration.candidates, "calibration");
  }
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["start_date"] = c.start_date;
  j["horizon_days"] = c.horizon_days;
  j["seed"] = c.seed;
  j["rollouts"] = c.rollouts;
  j["region"] = {{"tiles", c.tiles_path}, {"sites", c.sites_path}};

  json members = json::array();
  for (const auto& w : c.households.member_weights) members.push_back(per_age_json(w, [](double x) { return x; }));
  j["population"] = {{"total", c.population_total},
                     {"downscale", c.downscale},
                     {"site_downscale", c.site_downscale},
                     {"compliance", c.compliance},
                     {"age_fractions", per_age_json(c.age_fractions, [](double x) { return x; })},
                     {"households", {{"size_fractions", c.households.size_fractions}, {"member_weights", members}}}};

  j["mobility"] = {
      {"visits_per_week", per_age_json(c.mobility.visits_per_week, [](const PerCategory<double>& v) { return per_category_json(v); })},
      {"mean_duration_min", per_category_json(c.mobility.mean_duration_min)},
      {"sites_per_category", per_category_json(c.mobility.sites_per_category)}};

  const auto& ep = c.epidemic;
  auto ln = [](const LogNormal& l) { return json::array({l.meanlog, l.sdlog}); };
  j["epidemic"] = {{"beta", per_category_json(ep.beta)},
                   {"xi", ep.xi},
                   {"mu", ep.mu},
                   {"gamma", ep.gamma},
                   {"delta", ep.delta},
                   {"alpha_a", ep.alpha_a},
                   {"alpha_h", per_age_json(ep.alpha_h, [](double x) { return x; })},
                   {"alpha_b", per_age_json(ep.alpha_b, [](double x) { return x; })},
                   {"lognormal",
                    {{"M", ln(ep.incubation)}, {"R", ln(ep.recovery)}, {"W", ln(ep.presymptomatic)},
                     {"Y", ln(ep.to_hospital)}, {"Z", ln(ep.to_death)}}},
                   {"background_per_week_per_100k", ep.background_per_week_per_100k}};

  j["seeding"] = {{"observed_cases", c.observed_cases}, {"r0", c.r0}};
  j["policies"] = json::array();
  for (const auto& p : c.policies) j["policies"].push_back(policy_json(p));

  const auto& tr = c.testing.tracing;
  j["testing"] = {{"delta_test_h", c.testing.delta_test_h},
                  {"tests_per_day", c.testing.tests_per_day},
                  {"isolate_positives", c.testing.isolate_positives},
                  {"tracing",
                   {{"mode", mode_name(tr.mode)},
                    {"kind", tr.kind == TracingKind::Location ? "location" : "proximity"},
                    {"lookback_days", tr.lookback_days},
                    {"isolation_days", tr.isolation_days},
                    {"compliance", tr.compliance},
                    {"top_k", tr.top_k}}}};

  const auto& k = c.calibration;
  j["calibration"] = {{"domain",
                       {{"beta", {k.lo[0], k.hi[0]}}, {"xi", {k.lo[1], k.hi[1]}}, {"rho", {k.lo[2], k.hi[2]}}}},
                      {"downscale", k.downscale},
                      {"steps", k.steps},
                      {"init", k.init},
                      {"rollouts", k.rollouts},
                      {"fantasies", k.fantasies},
                      {"candidates", k.candidates}};
  return j;
}

void ScenarioConfig::validate() const {
  try {
    parse_date(start_date);
  } catch (const InputError& e) {
    fail("start_date", e.what());
  }
  if (horizon_days < 1) fail("horizon_days", "must be >= 1");
  if (rollouts < 1) fail("rollouts", "must be >= 1");
  if (tiles_path.empty()) fail("region.tiles", "is required");
  if (sites_path.empty()) fail("region.sites", "is required");
  if (population_total < 1) fail("population.total", "must be >= 1");
  if (downscale < 1) fail("population.downscale", "must be >= 1");
  if (site_downscale < 1) fail("population.site_downscale", "must be >= 1");
  if (!(compliance >= 0.0 && compliance <= 1.0)) fail("population.compliance", "must lie in [0, 1]");
  if (households.member_weights.size() != households.size_fractions.size())
    fail("population.households", "member_weights needs one entry per household size");
  for (std::size_t a = 0; a < kNumAgeGroups; ++a)
    for (std::size_t k = 0; k < kNumCategories; ++k)
      if (!(mobility.visits_per_week[a][k] >= 0.0)) fail("mobility.visits_per_week", "rates must be >= 0");
  for (std::size_t k = 0; k < kNumCategories; ++k) {
    if (!(mobility.mean_duration_min[k] > 0.0)) fail("mobility.mean_duration_min", "durations must be > 0");
    if (mobility.sites_per_category[k] < 0) fail("mobility.sites_per_category", "counts must be >= 0");
  }
  try {
    epidemic.validate();
  } catch (const InputError& e) {
    fail("epidemic", e.what());
  }
  if (!(r0 >= 0.0)) fail("seeding.r0", "must be >= 0");
  if (!(epidemic.alpha_a < 1.0)) fail("epidemic.alpha_a", "must be < 1 for seeding");
  for (std::size_t n = 0; n < policies.size(); ++n)
    validate_policy(policies[n], *this, "policies[" + std::to_string(n) + "]");
  try {
    testing.validate();
  } catch (const InputError& e) {
    fail("testing", e.what());
  }
  const auto& k = calibration;
  for (std::size_t d = 0; d < 3; ++d)
    if (!(k.lo[d] < k.hi[d])) fail("calibration.domain", "requires lo < hi");
  if (k.lo[0] < 0.0 || k.lo[1] < 0.0) fail("calibration.domain", "beta and xi must be >= 0");
  if (k.lo[2] < 0.0 || k.hi[2] > 1.0) fail("calibration.domain.rho", "must lie within [0, 1]");
  if (k.downscale < 1) fail("calibration.downscale", "must be >= 1");
  if (k.init < 1 || k.steps < k.init) fail("calibration", "requires steps >= init >= 1");
  if (k.rollouts < 1) fail("calibration.rollouts", "must be >= 1");
  if (k.fantasies < 1) fail("calibration.fantasies", "must be >= 1");
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  auto c = config_from_json(j);
  c.validate();
  return c;
}

}  // namespace hotspot
