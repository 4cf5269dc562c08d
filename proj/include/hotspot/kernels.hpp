#pragma once

// Closed-form integrals of exponentially decayed presence indicators.
//
// All functions take presence as a half-open interval [a, b) in hours and a
// decay rate gamma (1/h) with an environmental window delta (h).

#include "hotspot/common.hpp"

namespace hotspot {

/// (1 - e^{-gamma delta}) / gamma: the decayed mass of a fully occupied window.
double window_mass(double gamma, double delta);

/// Integral over tau in [t - delta, t] of 1[tau in presence] e^{-gamma (t - tau)}.
double decayed_presence(const Interval& presence, double t, double gamma, double delta);

/// Integral over t' in [t0, tf] of 1[t' in outer] times the decayed presence of
/// `inner` at t'. This is the per-visit-pair term of the tracing kernel.
double decayed_overlap(const Interval& outer, const Interval& inner, double t0, double tf,
                       double gamma, double delta);

/// Integral over t' in [t0, tf] of the decayed presence of `inner` at t'
/// (no outer gating). Used for site narrowcasting.
double decayed_exposure_mass(const Interval& inner, double t0, double tf, double gamma,
                             double delta);

/// Length of the intersection of two intervals.
double overlap_length(const Interval& x, const Interval& y);

}  // namespace hotspot
