#pragma once

#include <string_view>

#include "hotspot/common.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

/// Log-normal delay; parameters of the underlying normal, in days.
struct LogNormal {
  double meanlog = 0.0;
  double sdlog = 0.0;
};

/// Delay processes of the disease course.
enum class Process : std::uint8_t { M, Rs, Ra, W, Y, Z };

/// Accepts "M", "Rs", "Ra", "R", "W", "Y", "Z".
Process parse_process(std::string_view label);

/// Transmission and disease-course parameters. Rates are per hour.
struct EpidemicParams {
  PerCategory<double> beta{0.5, 0.5, 0.5, 0.5, 0.5};
  double xi = 0.5;
  double mu = 0.55;
  double gamma = 0.3465;
  double delta = 4.6438;
  double alpha_a = 0.4;
  PerAge<double> alpha_h{0.001, 0.003, 0.012, 0.045, 0.17, 0.27};
  PerAge<double> alpha_b{0.00002, 0.00006, 0.0003, 0.0025, 0.032, 0.093};
  LogNormal incubation{0.9470, 0.6669};        // M: exposed -> infectious
  LogNormal recovery{2.6365, 0.0713};          // Rs, Ra
  LogNormal presymptomatic{0.7463, 0.4161};    // W: presymptomatic -> symptomatic
  LogNormal to_hospital{1.9358, 0.1421};       // Y
  LogNormal to_death{2.5620, 0.0768};          // Z
  double background_per_week_per_100k = 0.0;

  [[nodiscard]] double beta_max() const;
  [[nodiscard]] const LogNormal& delay(Process p) const;
  /// Throws InputError on any out-of-range value.
  void validate() const;
};

/// Log-normal delay in hours.
double sample_transition_delay(Process process, const EpidemicParams& params, Rng& rng);

/// Upper bound on any single infector's site exposure rate:
/// max_k beta_k (1 - e^{-gamma delta}) / gamma.
double lambda_max(const EpidemicParams& params);

}  // namespace hotspot
