#pragma once

// Post-hoc analytics over event logs: secondary-case attribution, negative
// binomial fits of reproduction number and dispersion, and report files.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hotspot/simcore.hpp"

namespace hotspot {

struct InfectorRecord {
  PersonId id = kNoPerson;
  double t_infectious = 0.0;
  std::uint32_t n_secondary = 0;
};

/// One row per individual that was exposed and became infectious, in order
/// of infectious onset. Seeds placed directly in an infectious state are not
/// infectors; exposures without an infector are not attributed.
std::vector<InfectorRecord> secondary_counts(std::span<const LogRecord> records);

struct NBFit {
  double R = 0.0;
  double k = kInf;  // +inf marks the Poisson limit
  double log_likelihood = 0.0;
  [[nodiscard]] bool poisson_limit() const { return k == kInf; }
};

/// Negative binomial log-likelihood with mean R and size k (k = inf: Poisson).
double nb_log_likelihood(std::span<const std::uint32_t> counts, double R, double k);

/// Maximum-likelihood fit; R is the sample mean and k maximizes the profile
/// likelihood over [1e-3, 1e3]. Throws InputError on empty input.
NBFit nb_mle(std::span<const std::uint32_t> counts);

struct RtKtPoint {
  std::size_t day = 0;
  std::size_t n_infectors = 0;
  std::optional<double> R, R_lo, R_hi, k, k_lo, k_hi;
};

struct RtKtOptions {
  std::size_t window_days = 7;
  std::size_t min_infectors = 5;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
};

/// Per-day fits over infectors whose infectious onset day lies in
/// [day - window + 1, day]; bands are point estimate -/+ bootstrap sd.
std::vector<RtKtPoint> rt_kt_series(std::span<const InfectorRecord> table, std::size_t days,
                                    const RtKtOptions& options = {});

/// Mean absolute difference. Throws InputError on length mismatch.
double mae(std::span<const double> predicted, std::span<const double> reference);

/// Daily cumulative positive tests of one log (days entries).
std::vector<double> daily_cum_positive(const EventLog& log, std::size_t days);

struct DailySummaryRow {
  std::size_t day = 0;
  std::array<double, kNumCompartments + 2> mean{};  // compartments, hospitalized, cum positive
  std::array<double, kNumCompartments + 2> sd{};
};

/// Mean and sample sd per day over rollouts (sd = 0 for a single rollout).
std::vector<DailySummaryRow> summarize(std::span<const std::vector<CompartmentCounts>> rollouts);

struct ReportOptions {
  std::size_t days = 0;
  RtKtOptions rt;
  std::optional<std::vector<double>> reference;  // daily cumulative positives
};

struct ReportResult {
  std::optional<double> mae;
  std::optional<NBFit> overall;
};

/// Writes summary.csv, rt_kt.csv, secondary_hist.csv, infected.svg and rt.svg.
/// Secondary cases of all rollouts are pooled. Throws on zero rollouts.
ReportResult emit_report(std::span<const EventLog> logs, const std::filesystem::path& out_dir,
                         const ReportOptions& options);

}  // namespace hotspot
