#include "hotspot/testtrace.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hotspot/kernels.hpp"

namespace hotspot {

void TestConfig::validate() const {
  if (!(delta_test_h >= 0.0)) throw InputError("testing: delta_test_h must be >= 0");
  if (!(tests_per_day >= 0.0)) throw InputError("testing: tests_per_day must be >= 0");
  if (!(tracing.compliance >= 0.0 && tracing.compliance <= 1.0))
    throw InputError("tracing: compliance must lie in [0, 1]");
  if (tracing.mode != TracingMode::None &&
      !(tracing.lookback_days > 0.0 && tracing.isolation_days > 0.0))
    throw InputError("tracing: lookback and isolation durations must be positive");
}

TestQueue::TestQueue(double tests_per_day)
    : spacing_h_(tests_per_day > 0.0 ? kHoursPerDay / tests_per_day : kInf) {}

double TestQueue::enqueue(PersonId person, double t) {
  if (!std::isfinite(spacing_h_)) throw std::logic_error("TestQueue: no testing capacity");
  const double first = std::ceil(t / spacing_h_ - 0.5);
  auto slot = std::max<std::uint64_t>(next_slot_, first > 0.0 ? static_cast<std::uint64_t>(first) : 0);
  double when = (static_cast<double>(slot) + 0.5) * spacing_h_;
  if (when < t) when = (static_cast<double>(++slot) + 0.5) * spacing_h_;
  next_slot_ = slot + 1;
  queue_.emplace_back(person, t);
  ++enqueued_;
  return when;
}

PersonId TestQueue::dequeue() {
  if (queue_.empty()) throw std::logic_error("TestQueue: dequeue from empty queue");
  const PersonId p = queue_.front().first;
  queue_.pop_front();
  ++dequeued_;
  return p;
}

namespace {

bool admitted(const VisitFilter& filter, PersonId p, std::uint32_t visit) {
  return !filter || filter(p, visit);
}

// Calls fn(ref) for visits at the site of `v` whose environmental footprint
// [arrive, depart + delta) overlaps [from, to).
template <class Fn>
void for_each_nearby_visit(const SiteVisits& sv, double from, double to, double delta, Fn&& fn) {
  const double earliest = from - delta - sv.max_duration;
  auto it = std::lower_bound(sv.visits.begin(), sv.visits.end(), earliest,
                             [](const SiteVisits::Ref& r, double x) { return r.arrive < x; });
  for (; it != sv.visits.end() && it->arrive < to; ++it)
    if (it->depart + delta > from) fn(*it);
}

struct Accumulated {
  double total = 0.0;
  std::map<SiteId, double> by_site;
};

std::vector<ContactRecord> collect(PersonId i, Interval window,
                                   const std::map<PersonId, Accumulated>& acc) {
  std::vector<ContactRecord> out;
  for (const auto& [j, a] : acc) {
    if (!(a.total > 0.0)) continue;
    auto best = std::max_element(a.by_site.begin(), a.by_site.end(),
                                 [](const auto& x, const auto& y) { return x.second < y.second; });
    out.push_back({i, j, best->first, a.total, window});
  }
  return out;
}

}  // namespace

std::vector<ContactRecord> trace_contacts_location(PersonId i, Interval window, const World& world,
                                                   const EpidemicParams& params,
                                                   const VisitFilter& filter) {
  if (!(window.to > window.from)) throw InputError("trace_contacts_location: empty window");
  std::map<PersonId, Accumulated> acc;
  const auto& trace = world.traces[i];
  for (std::size_t n = first_departing_after(trace, window.from);
       n < trace.size() && trace[n].arrive < window.to; ++n) {
    if (!admitted(filter, i, static_cast<std::uint32_t>(n))) continue;
    const auto& v = trace[n];
    const double from = std::max(v.arrive, window.from);
    const double to = std::min(v.depart, window.to);
    for_each_nearby_visit(world.site_visits[v.site], from, to, params.delta, [&](const auto& r) {
      if (r.person == i || !admitted(filter, r.person, r.visit)) return;
      const double k = decayed_overlap(v.interval(), {r.arrive, r.depart}, window.from, window.to,
                                       params.gamma, params.delta);
      if (k > 0.0) {
        auto& a = acc[r.person];
        a.total += k;
        a.by_site[v.site] += k;
      }
    });
  }
  return collect(i, window, acc);
}

std::vector<ContactRecord> trace_contacts_proximity(PersonId i, Interval window, const World& world,
                                                    const VisitFilter& filter) {
  if (!(window.to > window.from)) throw InputError("trace_contacts_proximity: empty window");
  std::map<PersonId, Accumulated> acc;
  const auto& trace = world.traces[i];
  for (std::size_t n = first_departing_after(trace, window.from);
       n < trace.size() && trace[n].arrive < window.to; ++n) {
    if (!admitted(filter, i, static_cast<std::uint32_t>(n))) continue;
    const auto& v = trace[n];
    const Interval mine{std::max(v.arrive, window.from), std::min(v.depart, window.to)};
    for_each_nearby_visit(world.site_visits[v.site], mine.from, mine.to, 0.0, [&](const auto& r) {
      if (r.person == i || !admitted(filter, r.person, r.visit)) return;
      const double overlap = overlap_length(mine, {r.arrive, r.depart});
      if (overlap > 0.0) {
        auto& a = acc[r.person];
        a.total += overlap;
        a.by_site[v.site] += overlap;
      }
    });
  }
  return collect(i, window, acc);
}

double exposure_kernel(PersonId infector, PersonId j, Interval window, const World& world,
                       const EpidemicParams& params, const VisitFilter& filter) {
  const auto& tj = world.traces[j];
  const auto& ti = world.traces[infector];
  double total = 0.0;
  for (std::size_t n = first_departing_after(tj, window.from);
       n < tj.size() && tj[n].arrive < window.to; ++n) {
    if (!admitted(filter, j, static_cast<std::uint32_t>(n))) continue;
    const auto& v = tj[n];
    const double beta = params.beta[index_of(world.sites[v.site].category)];
    for (std::size_t m = first_departing_after(ti, std::max(v.arrive, window.from) - params.delta);
         m < ti.size() && ti[m].arrive < v.depart; ++m) {
      if (ti[m].site != v.site || !admitted(filter, infector, static_cast<std::uint32_t>(m))) continue;
      total += beta * decayed_overlap(v.interval(), ti[m].interval(), window.from, window.to,
                                      params.gamma, params.delta);
    }
  }
  return total;
}

double empirical_exposure_probability(PersonId infector, PersonId j, Interval window,
                                      const World& world, const EpidemicParams& params,
                                      const VisitFilter& filter) {
  return -std::expm1(-exposure_kernel(infector, j, window, world, params, filter));
}

std::vector<PersonId> rank_contacts(std::vector<RankedContact> contacts, std::size_t top_k) {
  std::sort(contacts.begin(), contacts.end(), [](const RankedContact& a, const RankedContact& b) {
    return a.p_hat > b.p_hat || (a.p_hat == b.p_hat && a.id < b.id);
  });
  std::vector<PersonId> out;
  for (std::size_t n = 0; n < contacts.size() && n < top_k; ++n) out.push_back(contacts[n].id);
  return out;
}

double narrowcast_site_risk(SiteId site, Interval window, std::span<const PersonId> positives,
                            const World& world, const EpidemicParams& params,
                            const VisitFilter& filter) {
  if (!(window.to >= window.from)) throw InputError("narrowcast_site_risk: invalid window");
  double mass = 0.0;
  for (PersonId i : positives) {
    const auto& trace = world.traces[i];
    for (std::size_t n = first_departing_after(trace, window.from - params.delta);
         n < trace.size() && trace[n].arrive < window.to; ++n)
      if (trace[n].site == site && admitted(filter, i, static_cast<std::uint32_t>(n)))
        mass += decayed_exposure_mass(trace[n].interval(), window.from, window.to, params.gamma,
                                      params.delta);
  }
  return -std::expm1(-mass);
}

}  // namespace hotspot
