// hotspot: simulate, calibrate, analyze and narrowcast from the command line.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>

#include "hotspot/analysis.hpp"
#include "hotspot/calib.hpp"
#include "hotspot/config.hpp"
#include "hotspot/io.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/scenario.hpp"
#include "hotspot/testtrace.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hotspot;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInput = 2;

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// Region paths become absolute so the resolved config loads from anywhere.
json resolved_config(const Scenario& s) {
  auto c = s.config;
  c.tiles_path = fs::absolute(s.base_dir / c.tiles_path).lexically_normal().string();
  c.sites_path = fs::absolute(s.base_dir / c.sites_path).lexically_normal().string();
  return config_to_json(c);
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

// Latest cumulative count on or before each day; 0 before the first row.
std::vector<double> daily_reference(const std::string& start_date, std::span<const CaseRow> rows,
                                    std::size_t days) {
  std::vector<double> out(days, 0.0);
  for (const auto& r : rows) {
    const long d = days_between(start_date, r.date);
    for (long t = std::max(0L, d); t < static_cast<long>(days); ++t) out[t] = r.cumulative_positive;
  }
  return out;
}

struct EventsDir {
  json meta;
  std::vector<std::pair<std::size_t, fs::path>> files;  // rollout index, path
};

EventsDir scan_events(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("events directory " + dir.string() + " does not exist");
  EventsDir e;
  static const std::regex pattern(R"(events_(\d+)\.jsonl)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) e.files.emplace_back(std::stoul(m[1]), entry.path());
  }
  if (e.files.empty()) throw InputError("no events_<r>.jsonl files in " + dir.string());
  std::sort(e.files.begin(), e.files.end());
  e.meta = read_json(dir / "meta.json");
  return e;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<std::size_t> rollouts, const fs::path& out, bool traces) {
  auto s = load_scenario(config_path);
  if (seed) s.config.seed = *seed;
  if (rollouts) s.config.rollouts = *rollouts;
  s.config.validate();
  make_dir(out);
  write_json(out / "config.resolved.json", resolved_config(s));

  const std::size_t n = s.config.rollouts;
  std::vector<EventLog> logs(n);
  run_rollouts(s, n, {}, [&](std::size_t r, Rollout&& result) {
    write_events_jsonl(out / fmt::format("events_{}.jsonl", r), result.log);
    write_tests_csv(out / fmt::format("tests_{}.csv", r), result.log.tests);
    if (traces) write_traces_jsonl(out / fmt::format("traces_{}.jsonl", r), result.world);
    logs[r] = std::move(result.log);
  });
  write_json(out / "meta.json", {{"population", logs.front().population},
                                 {"t_max_h", logs.front().t_max},
                                 {"rollouts", n},
                                 {"seed", s.config.seed},
                                 {"start_date", s.config.start_date}});

  ReportOptions opts;
  opts.days = s.config.horizon_days;
  opts.rt.seed = s.config.seed;
  const auto report = emit_report(logs, out, opts);
  std::cout << fmt::format("{} rollouts, {} individuals, {} days -> {}\n", n, logs.front().population,
                           s.config.horizon_days, out.string());
  if (report.overall)
    std::cout << fmt::format("secondary cases: R = {:.3f}, k = {:.3f}\n", report.overall->R, report.overall->k);
  return 0;
}

int cmd_calibrate(const std::string& config_path, const fs::path& cases_path,
                  std::optional<std::size_t> steps, std::optional<std::size_t> init,
                  std::optional<std::size_t> rollouts, std::optional<std::uint32_t> downscale,
                  std::optional<std::uint64_t> seed, const fs::path& out) {
  auto s = load_scenario(config_path);
  auto& k = s.config.calibration;
  if (steps) k.steps = *steps;
  if (init) k.init = *init;
  if (rollouts) k.rollouts = *rollouts;
  if (downscale) k.downscale = *downscale;
  if (seed) s.config.seed = *seed;
  s.config.validate();
  const auto rows = read_cases_csv(cases_path);
  const auto target = case_target(s.config, rows);
  make_dir(out);
  write_json(out / "config.resolved.json", resolved_config(s));

  std::ofstream log(out / "calibration.jsonl");
  if (!log) throw std::runtime_error("cannot write " + (out / "calibration.jsonl").string());

  // Every evaluation shares the rollout seeds, so scores differ only through theta.
  const std::uint64_t eval_seed = derive_seed(s.config.seed, {0x63616c6962ULL});
  BlackBox g = [&](const std::vector<double>& theta, std::size_t) {
    return simulate_g(s, theta, target, k.rollouts, k.downscale, eval_seed);
  };
  CalibOptions opts;
  opts.steps = k.steps;
  opts.init = k.init;
  opts.fantasies = k.fantasies;
  opts.candidates = k.candidates;
  opts.seed = s.config.seed;
  opts.on_evaluation = [&](const Evaluation& e, std::size_t index) {
    log << json{{"index", index}, {"theta", e.theta}, {"g_hat", e.g_hat}, {"score", e.score}}.dump() << '\n';
    log.flush();
    std::cerr << fmt::format("[{}/{}] theta = ({:.4f}, {:.4f}, {:.4f}) score = {:.1f}\n", index, k.steps,
                             e.theta[0], e.theta[1], e.theta[2], e.score);
  };
  const auto result = calibrate(g, target.values, Box{k.lo, k.hi}, opts);
  write_json(out / "theta_star.json", {{"beta", result.theta_star[0]},
                                       {"xi", result.theta_star[1]},
                                       {"rho", result.theta_star[2]},
                                       {"score", result.best_score},
                                       {"evaluations", result.evaluations.size()}});
  std::cout << fmt::format("theta* = (beta {:.4f}, xi {:.4f}, rho {:.4f}), score {:.1f}\n", result.theta_star[0],
                           result.theta_star[1], result.theta_star[2], result.best_score);
  return 0;
}

int cmd_analyze(const fs::path& events, std::size_t window, const std::optional<fs::path>& reference,
                const fs::path& out) {
  const auto dir = scan_events(events);
  const std::size_t population = dir.meta.at("population").get<std::size_t>();
  const double t_max = dir.meta.at("t_max_h").get<double>();
  std::vector<EventLog> logs;
  for (const auto& [r, path] : dir.files) {
    EventLog log;
    log.population = population;
    log.t_max = t_max;
    log.records = read_events_jsonl(path);
    logs.push_back(std::move(log));
  }
  ReportOptions opts;
  opts.days = static_cast<std::size_t>(std::ceil(t_max / kHoursPerDay));
  opts.rt.window_days = window;
  opts.rt.seed = dir.meta.value("seed", std::uint64_t{0});
  if (reference) {
    const auto rows = read_cases_csv(*reference);
    opts.reference = daily_reference(dir.meta.at("start_date").get<std::string>(), rows, opts.days);
  }
  make_dir(out);
  const auto report = emit_report(logs, out, opts);
  std::cout << fmt::format("{} rollouts analyzed -> {}\n", logs.size(), out.string());
  if (report.overall)
    std::cout << fmt::format("secondary cases: R = {:.3f}, k = {:.3f}\n", report.overall->R, report.overall->k);
  if (report.mae) std::cout << fmt::format("MAE vs reference: {:.2f}\n", *report.mae);
  return 0;
}

int cmd_narrowcast(const fs::path& events, const std::string& from, const std::string& to,
                   std::size_t rollout, const fs::path& out) {
  const auto dir = scan_events(events);
  const auto it = std::find_if(dir.files.begin(), dir.files.end(),
                               [&](const auto& f) { return f.first == rollout; });
  if (it == dir.files.end()) throw InputError(fmt::format("no event log for rollout {}", rollout));

  const fs::path config_path = events / "config.resolved.json";
  auto s = make_scenario(config_from_json(read_json(config_path)), events);
  const double t0 = hours_from_start(s.config, from);
  const double tf = hours_from_start(s.config, to) + kHoursPerDay;
  if (!(t0 < tf)) throw InputError("--from must not be after --to");
  const auto seed = rollout_seed(s.config.seed, rollout);
  const World world = build_world(world_spec(s), seed);
  const auto records = read_events_jsonl(it->second);

  // Positives known by the end of the window, with the time their isolation began.
  std::map<PersonId, double> positive_since;
  for (const auto& r : records)
    if (r.kind == EventKind::TestOutcome && r.positive && r.t <= tf && !positive_since.count(r.subject))
      positive_since[r.subject] = r.t;
  std::vector<PersonId> positives;
  for (const auto& [p, t] : positive_since) positives.push_back(p);

  // Conditional lockdowns depend on the run's case history and are not replayed here.
  std::vector<Policy> fixed;
  for (auto& p : build_policies(s.config))
    if (!std::holds_alternative<ConditionalLockdown>(p)) fixed.push_back(std::move(p));
  const PolicySet policies(std::move(fixed));
  const VisitCoins coins{derive_seed(seed, {static_cast<std::uint64_t>(Stream::VisitCoins)})};
  const VisitFilter realized = [&](PersonId p, std::uint32_t v) {
    const auto& visit = world.traces[p][v];
    if (const auto f = positive_since.find(p); f != positive_since.end() && visit.arrive >= f->second) return false;
    return policies.empty() || policies.visit_admitted(world.person(p), v, visit, coins);
  };

  std::vector<SiteRisk> risks;
  for (const auto& site : world.sites)
    risks.push_back({site.id, narrowcast_site_risk(site.id, {t0, tf}, positives, world, s.config.epidemic, realized)});
  std::stable_sort(risks.begin(), risks.end(), [](const SiteRisk& a, const SiteRisk& b) { return a.p_hat > b.p_hat; });
  make_dir(out);
  write_site_risk_csv(out / "site_risk.csv", risks, world);
  std::cout << fmt::format("{} positives known by {}, {} sites scored -> {}\n", positives.size(), to, risks.size(),
                           (out / "site_risk.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Site-explicit epidemic simulation, calibration and exposure analytics"};
  app.require_subcommand(1);

  std::string config_path;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rollouts;
  bool traces = false;
  auto* sim = app.add_subcommand("simulate", "Run rollouts of a scenario and write event logs and a report");
  sim->add_option("config", config_path, "Scenario config (JSON)")->required();
  sim->add_option("--seed", seed, "Master seed (overrides the config)");
  sim->add_option("--rollouts", rollouts, "Number of rollouts (overrides the config)")->check(CLI::PositiveNumber);
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_flag("--traces", traces, "Also write each rollout's check-in traces");

  fs::path cases;
  std::optional<std::size_t> steps, init;
  std::optional<std::uint32_t> downscale;
  auto* cal = app.add_subcommand("calibrate", "Fit beta, xi and rho to a cumulative case series");
  cal->add_option("config", config_path, "Scenario config (JSON)")->required();
  cal->add_option("--cases", cases, "Observed cases CSV (date,cumulative_positive)")->required();
  cal->add_option("--steps", steps, "Total evaluations N");
  cal->add_option("--init", init, "Quasi-random initial evaluations M");
  cal->add_option("--rollouts", rollouts, "Rollouts J per evaluation")->check(CLI::PositiveNumber);
  cal->add_option("--downscale", downscale, "Population and site downscaling K")->check(CLI::PositiveNumber);
  cal->add_option("--seed", seed, "Master seed (overrides the config)");
  cal->add_option("--out", out, "Output directory")->required();

  fs::path events;
  std::size_t window = 7;
  std::optional<fs::path> reference;
  auto* ana = app.add_subcommand("analyze", "Summaries, R_t/k_t and secondary-case histogram from event logs");
  ana->add_option("--events", events, "Directory written by simulate")->required();
  ana->add_option("--window", window, "Onset window in days for R_t/k_t")->check(CLI::PositiveNumber);
  ana->add_option("--reference", reference, "Observed cases CSV for MAE");
  ana->add_option("--out", out, "Output directory")->required();

  std::string from, to;
  std::size_t rollout = 0;
  auto* nar = app.add_subcommand("narrowcast", "Empirical exposure risk per site from positives' check-ins");
  nar->add_option("--events", events, "Directory written by simulate")->required();
  nar->add_option("--from", from, "Window start date (YYYY-MM-DD)")->required();
  nar->add_option("--to", to, "Window end date, inclusive (YYYY-MM-DD)")->required();
  nar->add_option("--rollout", rollout, "Rollout to analyze");
  nar->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, seed, rollouts, out, traces);
    if (cal->parsed()) return cmd_calibrate(config_path, cases, steps, init, rollouts, downscale, seed, out);
    if (ana->parsed()) return cmd_analyze(events, window, reference, out);
    if (nar->parsed()) return cmd_narrowcast(events, from, to, rollout, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
