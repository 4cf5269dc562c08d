#include "hotspot/params.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hotspot/kernels.hpp"

namespace hotspot {

Process parse_process(std::string_view label) {
  if (label == "M") return Process::M;
  if (label == "Rs" || label == "R") return Process::Rs;
  if (label == "Ra") return Process::Ra;
  if (label == "W") return Process::W;
  if (label == "Y") return Process::Y;
  if (label == "Z") return Process::Z;
  throw InputError("unknown transition process '" + std::string(label) + "'");
}

double EpidemicParams::beta_max() const { return *std::max_element(beta.begin(), beta.end()); }

const LogNormal& EpidemicParams::delay(Process p) const {
  switch (p) {
    case Process::M: return incubation;
    case Process::Rs:
    case Process::Ra: return recovery;
    case Process::W: return presymptomatic;
    case Process::Y: return to_hospital;
    case Process::Z: return to_death;
  }
  throw InputError("unknown transition process");
}

void EpidemicParams::validate() const {
  auto fail = [](const std::string& what) { throw InputError("epidemic parameters: " + what); };
  for (double b : beta)
    if (!(b >= 0.0)) fail("beta must be >= 0");
  if (!(xi >= 0.0)) fail("xi must be >= 0");
  if (!(mu >= 0.0 && mu <= 1.0)) fail("mu must lie in [0, 1]");
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(delta > 0.0)) fail("delta must be > 0");
  if (!(alpha_a >= 0.0 && alpha_a <= 1.0)) fail("alpha_a must lie in [0, 1]");
  for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
    if (!(alpha_h[a] >= 0.0 && alpha_h[a] <= 1.0)) fail("alpha_h must lie in [0, 1]");
    if (!(alpha_b[a] >= 0.0 && alpha_b[a] <= 1.0)) fail("alpha_b must lie in [0, 1]");
  }
  for (const auto* ln : {&incubation, &recovery, &presymptomatic, &to_hospital, &to_death})
    if (!(ln->sdlog >= 0.0) || !std::isfinite(ln->meanlog)) fail("log-normal sdlog must be >= 0");
  if (!(background_per_week_per_100k >= 0.0)) fail("background rate must be >= 0");
}

double sample_transition_delay(Process process, const EpidemicParams& params, Rng& rng) {
  const auto& ln = params.delay(process);
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::exp(ln.meanlog + ln.sdlog * z) * kHoursPerDay;
}

double lambda_max(const EpidemicParams& params) {
  return params.beta_max() * window_mass(params.gamma, params.delta);
}

}  // namespace hotspot
