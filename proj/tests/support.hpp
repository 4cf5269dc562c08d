#pragma once

// Hand-built worlds and numeric integration oracles shared by the tests.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <functional>
#include <vector>

#include "hotspot/synthpop.hpp"

namespace hotspot::testing {

struct VisitSpec {
  PersonId person;
  SiteId site;
  double arrive;
  double depart;
};

/// World with `people` individuals, `categories.size()` sites and the given
/// visits. `households` lists member groups; people not listed live alone.
inline World make_world(std::size_t people, const std::vector<SiteCategory>& categories,
                        const std::vector<VisitSpec>& visits, double t_max,
                        const std::vector<std::vector<PersonId>>& households = {}) {
  World w;
  w.t_max = t_max;
  for (std::size_t k = 0; k < categories.size(); ++k) {
    Site s;
    s.id = static_cast<SiteId>(k);
    s.external_id = "s" + std::to_string(k);
    s.category = categories[k];
    w.sites.push_back(s);
  }
  auto& pop = w.population;
  pop.individuals.resize(people);
  std::vector<bool> placed(people, false);
  for (const auto& h : households) {
    for (PersonId p : h) {
      pop.individuals[p].household = static_cast<HouseholdId>(pop.households.size());
      placed[p] = true;
    }
    pop.households.push_back(h);
  }
  for (std::size_t p = 0; p < people; ++p) {
    pop.individuals[p].id = static_cast<PersonId>(p);
    if (!placed[p]) {
      pop.individuals[p].household = static_cast<HouseholdId>(pop.households.size());
      pop.households.push_back({static_cast<PersonId>(p)});
    }
  }
  w.traces.assign(people, {});
  for (const auto& v : visits) w.traces[v.person].push_back({v.person, v.site, v.arrive, v.depart});
  for (auto& t : w.traces)
    std::sort(t.begin(), t.end(), [](const Visit& a, const Visit& b) { return a.arrive < b.arrive; });
  index_site_visits(w);
  return w;
}

/// Integral of f over [lo, hi], split at the breakpoints so every piece is smooth.
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        std::vector<double> breaks = {}) {
  if (!(hi > lo)) return 0.0;
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t n = 0; n + 1 < breaks.size(); ++n) {
    const double a = std::max(lo, breaks[n]);
    const double b = std::min(hi, breaks[n + 1]);
    if (b > a) total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-13);
  }
  return total;
}

/// Direct numeric integral of tau -> 1[tau in presence] e^{-gamma (t - tau)} over [t - delta, t].
inline double decayed_presence_oracle(Interval presence, double t, double gamma, double delta) {
  const double a = std::max(presence.from, t - delta);
  const double b = std::min(presence.to, t);
  return integrate([&](double tau) { return std::exp(-gamma * (t - tau)); }, a, b);
}

/// Outer integral over t' in [t0, tf] of g(t') where g has kinks at the given points.
inline double outer_oracle(const std::function<double(double)>& g, double t0, double tf,
                           const std::vector<double>& kinks) {
  return integrate(g, t0, tf, kinks);
}

}  // namespace hotspot::testing

namespace hotspot::testing {

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = cdf(xs[k]);
    d = std::max({d, f - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - f});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace hotspot::testing
