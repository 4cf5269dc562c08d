#include "hotspot/analysis.hpp"

#include <fmt/format.h>
#include <fmt/os.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "hotspot/plot.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

std::vector<InfectorRecord> secondary_counts(std::span<const LogRecord> records) {
  std::unordered_map<PersonId, std::size_t> row;
  std::unordered_map<PersonId, bool> exposed;
  std::vector<InfectorRecord> table;
  std::unordered_map<PersonId, std::uint32_t> caused;
  for (const auto& r : records) {
    switch (r.kind) {
      case EventKind::Exposure:
        exposed[r.subject] = true;
        if (r.infector != kNoPerson) ++caused[r.infector];
        break;
      case EventKind::BecomeIa:
      case EventKind::BecomeIp:
        if (exposed.count(r.subject) && !row.count(r.subject)) {
          row[r.subject] = table.size();
          table.push_back({r.subject, r.t, 0});
        }
        break;
      default: break;
    }
  }
  for (auto& rec : table)
    if (auto it = caused.find(rec.id); it != caused.end()) rec.n_secondary = it->second;
  return table;
}

namespace {

// Counts of each observed value: the likelihood only needs one lgamma per distinct value.
using Histogram = std::vector<std::pair<std::uint32_t, double>>;

Histogram histogram(std::span<const std::uint32_t> counts) {
  std::map<std::uint32_t, double> h;
  for (auto x : counts) h[x] += 1.0;
  return {h.begin(), h.end()};
}

double log_likelihood(const Histogram& hist, double R, double k) {
  double ll = 0.0;
  if (k == kInf) {
    for (const auto& [x, n] : hist) {
      const double xd = x;
      ll += n * ((x > 0 ? xd * std::log(R) : 0.0) - R - std::lgamma(xd + 1.0));
    }
    return ll;
  }
  const double log_p = std::log(k / (k + R));
  const double log_q = R > 0.0 ? std::log(R / (k + R)) : 0.0;
  const double lg_k = std::lgamma(k);
  for (const auto& [x, n] : hist) {
    const double xd = x;
    ll += n * (std::lgamma(xd + k) - lg_k - std::lgamma(xd + 1.0) + k * log_p + (x > 0 ? xd * log_q : 0.0));
  }
  return ll;
}

struct ProfileData {
  const Histogram* hist;
  double R;
};

double negative_profile(double log_k, void* params) {
  const auto* d = static_cast<const ProfileData*>(params);
  return -log_likelihood(*d->hist, d->R, std::exp(log_k));
}

}  // namespace

double nb_log_likelihood(std::span<const std::uint32_t> counts, double R, double k) {
  return log_likelihood(histogram(counts), R, k);
}

NBFit nb_mle(std::span<const std::uint32_t> counts) {
  if (counts.empty()) throw InputError("nb_mle: empty sample");
  const double n = static_cast<double>(counts.size());
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  double ss = 0.0;
  for (auto x : counts) ss += (x - mean) * (x - mean);
  const double var = counts.size() > 1 ? ss / (n - 1.0) : 0.0;

  NBFit fit;
  fit.R = mean;
  if (var <= mean) {
    fit.log_likelihood = log_likelihood(histogram(counts), mean, kInf);
    return fit;
  }

  // Coarse scan to bracket the maximum, then golden-section refinement.
  const double lo = std::log(1e-3);
  const double hi = std::log(1e3);
  constexpr int kGrid = 64;
  const Histogram hist = histogram(counts);
  ProfileData data{&hist, mean};
  int best = 0;
  double best_val = kInf;
  for (int g = 0; g <= kGrid; ++g) {
    const double v = negative_profile(lo + (hi - lo) * g / kGrid, &data);
    if (v < best_val) {
      best_val = v;
      best = g;
    }
  }
  double log_k = lo + (hi - lo) * best / kGrid;
  if (best > 0 && best < kGrid) {
    gsl_set_error_handler_off();
    gsl_function fn{&negative_profile, &data};
    gsl_min_fminimizer* solver = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
    const double a = lo + (hi - lo) * (best - 1) / kGrid;
    const double b = lo + (hi - lo) * (best + 1) / kGrid;
    if (gsl_min_fminimizer_set_with_values(solver, &fn, log_k, best_val, a,
                                           negative_profile(a, &data), b,
                                           negative_profile(b, &data)) == GSL_SUCCESS) {
      for (int iter = 0; iter < 200; ++iter) {
        if (gsl_min_fminimizer_iterate(solver) != GSL_SUCCESS) break;
        if (gsl_min_test_interval(gsl_min_fminimizer_x_lower(solver),
                                  gsl_min_fminimizer_x_upper(solver), 1e-10, 0.0) == GSL_SUCCESS)
          break;
      }
      log_k = gsl_min_fminimizer_x_minimum(solver);
    }
    gsl_min_fminimizer_free(solver);
  }
  fit.k = std::exp(log_k);
  fit.log_likelihood = log_likelihood(hist, mean, fit.k);
  return fit;
}

std::vector<RtKtPoint> rt_kt_series(std::span<const InfectorRecord> table, std::size_t days,
                                    const RtKtOptions& options) {
  if (options.window_days < 1) throw InputError("rt_kt_series: window must be at least one day");
  std::vector<std::vector<std::uint32_t>> by_day(days);
  for (const auto& rec : table) {
    const double d = std::floor(rec.t_infectious / kHoursPerDay);
    if (d >= 0.0 && d < static_cast<double>(days)) by_day[static_cast<std::size_t>(d)].push_back(rec.n_secondary);
  }

  std::vector<RtKtPoint> out;
  std::vector<std::uint32_t> cohort;
  std::vector<std::uint32_t> resample;
  for (std::size_t day = 0; day < days; ++day) {
    RtKtPoint pt;
    pt.day = day;
    cohort.clear();
    const std::size_t first = day + 1 >= options.window_days ? day + 1 - options.window_days : 0;
    for (std::size_t d = first; d <= day; ++d) cohort.insert(cohort.end(), by_day[d].begin(), by_day[d].end());
    pt.n_infectors = cohort.size();
    if (cohort.size() >= options.min_infectors) {
      const NBFit fit = nb_mle(cohort);
      pt.R = fit.R;
      pt.k = fit.k;
      Rng rng(derive_seed(options.seed, {day}));
      std::uniform_int_distribution<std::size_t> pick(0, cohort.size() - 1);
      std::vector<double> rs;
      std::vector<double> ks;
      for (std::size_t b = 0; b < options.bootstrap; ++b) {
        resample.resize(cohort.size());
        for (auto& x : resample) x = cohort[pick(rng)];
        const NBFit bf = nb_mle(resample);
        rs.push_back(bf.R);
        if (!bf.poisson_limit()) ks.push_back(bf.k);
      }
      auto sd = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      const double sr = sd(rs);
      pt.R_lo = std::max(0.0, fit.R - sr);
      pt.R_hi = fit.R + sr;
      const double sk = sd(ks);
      pt.k_lo = fit.k == kInf ? kInf : std::max(0.0, fit.k - sk);
      pt.k_hi = fit.k == kInf ? kInf : fit.k + sk;
    }
    out.push_back(pt);
  }
  return out;
}

double mae(std::span<const double> predicted, std::span<const double> reference) {
  if (predicted.size() != reference.size()) throw InputError("mae: series lengths differ");
  if (predicted.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t t = 0; t < predicted.size(); ++t) s += std::abs(predicted[t] - reference[t]);
  return s / static_cast<double>(predicted.size());
}

std::vector<double> daily_cum_positive(const EventLog& log, std::size_t days) {
  std::vector<double> out;
  out.reserve(days);
  for (const auto& c : daily_counts(log, days)) out.push_back(static_cast<double>(c.cum_positive));
  return out;
}

std::vector<DailySummaryRow> summarize(std::span<const std::vector<CompartmentCounts>> rollouts) {
  if (rollouts.empty()) throw InputError("summarize: no rollouts");
  const std::size_t days = rollouts.front().size();
  const double n = static_cast<double>(rollouts.size());
  std::vector<DailySummaryRow> out(days);
  constexpr std::size_t kCols = kNumCompartments + 2;
  for (std::size_t d = 0; d < days; ++d) {
    auto& row = out[d];
    row.day = d;
    std::array<double, kCols> sum{};
    std::array<double, kCols> sum_sq{};
    for (const auto& r : rollouts) {
      if (r.size() != days) throw InputError("summarize: rollouts cover different horizons");
      const auto& c = r[d];
      std::array<double, kCols> v{};
      for (std::size_t k = 0; k < kNumCompartments; ++k) v[k] = static_cast<double>(c.n[k]);
      v[kNumCompartments] = static_cast<double>(c.hospitalized);
      v[kNumCompartments + 1] = static_cast<double>(c.cum_positive);
      for (std::size_t k = 0; k < kCols; ++k) {
        sum[k] += v[k];
        sum_sq[k] += v[k] * v[k];
      }
    }
    for (std::size_t k = 0; k < kCols; ++k) {
      row.mean[k] = sum[k] / n;
      row.sd[k] = rollouts.size() > 1
                      ? std::sqrt(std::max(0.0, (sum_sq[k] - n * row.mean[k] * row.mean[k]) / (n - 1.0)))
                      : 0.0;
    }
  }
  return out;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return "inf";
  return fmt::format("{}", *v);
}

}  // namespace

ReportResult emit_report(std::span<const EventLog> logs, const std::filesystem::path& out_dir,
                         const ReportOptions& options) {
  if (logs.empty()) throw InputError("emit_report: no rollouts to report");
  std::filesystem::create_directories(out_dir);
  const std::size_t days = options.days;

  std::vector<std::vector<CompartmentCounts>> per_rollout;
  std::vector<InfectorRecord> pooled;
  for (const auto& log : logs) {
    per_rollout.push_back(daily_counts(log, days));
    const auto t = secondary_counts(log.records);
    pooled.insert(pooled.end(), t.begin(), t.end());
  }
  const auto summary = summarize(per_rollout);
  {
    auto out = open_output(out_dir / "summary.csv");
    out << "day,S_mean,S_sd,E_mean,E_sd,Ia_mean,Ia_sd,Ip_mean,Ip_sd,Is_mean,Is_sd,H_mean,H_sd,"
           "R_mean,R_sd,D_mean,D_sd,cumpos_mean,cumpos_sd\n";
    // Column order: S E Ia Ip Is H R D cumpos.
    constexpr std::array<std::size_t, 9> order{0, 1, 2, 3, 4, kNumCompartments, 5, 6, kNumCompartments + 1};
    for (const auto& row : summary) {
      out << row.day;
      for (auto k : order) out << fmt::format(",{},{}", row.mean[k], row.sd[k]);
      out << '\n';
    }
  }

  const auto series = rt_kt_series(pooled, days, options.rt);
  {
    auto out = open_output(out_dir / "rt_kt.csv");
    out << "day,Rt,Rt_lo,Rt_hi,kt,kt_lo,kt_hi,n_infectors\n";
    for (const auto& p : series)
      out << fmt::format("{},{},{},{},{},{},{},{}\n", p.day, opt(p.R), opt(p.R_lo), opt(p.R_hi),
                         opt(p.k), opt(p.k_lo), opt(p.k_hi), p.n_infectors);
  }
  {
    std::map<std::uint32_t, std::size_t> hist;
    for (const auto& r : pooled) ++hist[r.n_secondary];
    auto out = open_output(out_dir / "secondary_hist.csv");
    out << "n_secondary,count\n";
    for (const auto& [k, c] : hist) out << k << ',' << c << '\n';
  }

  std::vector<double> x(days);
  std::iota(x.begin(), x.end(), 0.0);
  std::vector<double> infected(days);
  std::vector<double> cumpos(days);
  for (std::size_t d = 0; d < days; ++d) {
    infected[d] = summary[d].mean[1] + summary[d].mean[2] + summary[d].mean[3] + summary[d].mean[4];
    cumpos[d] = summary[d].mean[kNumCompartments + 1];
  }
  std::vector<PlotSeries> curves{{"infected (E+Ia+Ip+Is)", x, infected}, {"cumulative positives", x, cumpos}};
  if (options.reference && options.reference->size() == days)
    curves.push_back({"reference", x, *options.reference});
  write_line_plot(out_dir / "infected.svg", "Infected and positives (mean over rollouts)", "day", curves);

  std::vector<double> rx, ry, kx, ky;
  for (const auto& p : series) {
    if (p.R) {
      rx.push_back(static_cast<double>(p.day));
      ry.push_back(*p.R);
    }
    if (p.k && std::isfinite(*p.k)) {
      kx.push_back(static_cast<double>(p.day));
      ky.push_back(*p.k);
    }
  }
  write_line_plot(out_dir / "rt.svg", "Reproduction number and dispersion", "day",
                  {{"R_t", rx, ry}, {"k_t", kx, ky}, {"1", x, std::vector<double>(days, 1.0)}});

  ReportResult result;
  std::vector<std::uint32_t> all;
  for (const auto& r : pooled) all.push_back(r.n_secondary);
  if (!all.empty()) result.overall = nb_mle(all);
  if (options.reference) {
    result.mae = mae(cumpos, *options.reference);
    auto out = open_output(out_dir / "mae.txt");
    out << fmt::format("{}\n", *result.mae);
  }
  return result;
}

}  // namespace hotspot
