#include "hotspot/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hotspot {

double window_mass(double gamma, double delta) { return -std::expm1(-gamma * delta) / gamma; }

double decayed_presence(const Interval& presence, double t, double gamma, double delta) {
  const double lo = std::max(presence.from, t - delta);
  const double hi = std::min(presence.to, t);
  if (!(hi > lo)) return 0.0;
  // (1/gamma)(e^{-gamma (t - hi)} - e^{-gamma (t - lo)})
  return std::exp(-gamma * (t - hi)) * (-std::expm1(-gamma * (hi - lo))) / gamma;
}

namespace {

// Integral over [p, q] of e^{-gamma (t' - x)} dt'.
double exp_segment(double p, double q, double x, double gamma) {
  return std::exp(-gamma * (p - x)) * (-std::expm1(-gamma * (q - p))) / gamma;
}

// Integral over t' in [lo, hi] of the decayed presence of [a, b) at t'.
// The integrand is (1/gamma)(e^{-gamma (t' - U)} - e^{-gamma (t' - L)}) with
// U = min(b, t') and L = max(a, t' - delta); each piece between the
// breakpoints {a, b, a + delta, b + delta} has a fixed choice of U and L.
double integrate_decayed(double a, double b, double lo, double hi, double gamma, double delta) {
  if (!(hi > lo) || !(b > a)) return 0.0;
  lo = std::max(lo, a);
  hi = std::min(hi, b + delta);
  if (!(hi > lo)) return 0.0;

  std::array<double, 6> cuts{lo, hi, a, b, a + delta, b + delta};
  std::sort(cuts.begin(), cuts.end());
  const double e_gd = std::exp(-gamma * delta);

  double total = 0.0;
  for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
    const double p = std::max(cuts[n], lo);
    const double q = std::min(cuts[n + 1], hi);
    if (!(q > p)) continue;
    const double mid = 0.5 * (p + q);
    const bool upper_is_b = mid > b;
    const bool lower_is_a = mid - delta < a;
    const double upper = upper_is_b ? b : mid;
    const double lower = lower_is_a ? a : mid - delta;
    if (!(upper > lower)) continue;

    const double up_term = upper_is_b ? exp_segment(p, q, b, gamma) : (q - p);
    const double low_term = lower_is_a ? exp_segment(p, q, a, gamma) : (q - p) * e_gd;
    total += (up_term - low_term) / gamma;
  }
  return std::max(total, 0.0);
}

}  // namespace

double decayed_overlap(const Interval& outer, const Interval& inner, double t0, double tf,
                       double gamma, double delta) {
  const double lo = std::max(outer.from, t0);
  const double hi = std::min(outer.to, tf);
  return integrate_decayed(inner.from, inner.to, lo, hi, gamma, delta);
}

double decayed_exposure_mass(const Interval& inner, double t0, double tf, double gamma,
                             double delta) {
  return integrate_decayed(inner.from, inner.to, t0, tf, gamma, delta);
}

double overlap_length(const Interval& x, const Interval& y) {
  return std::max(0.0, std::min(x.to, y.to) - std::max(x.from, y.from));
}

}  // namespace hotspot
