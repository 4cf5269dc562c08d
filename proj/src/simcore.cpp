#include "hotspot/simcore.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <variant>

#include "hotspot/kernels.hpp"

namespace hotspot {

namespace {

constexpr std::array<std::string_view, 11> kEventNames{
    "Exposure", "BecomeIa", "BecomeIp",   "BecomeIs",    "Hospitalize", "Recover",
    "Die",      "TestOutcome", "PolicyTick", "TestDequeue", "Import"};

std::uint64_t round_half_up(double x) { return static_cast<std::uint64_t>(std::floor(x + 0.5)); }

}  // namespace

std::string_view to_string(EventKind kind) { return kEventNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t n = 0; n <= static_cast<std::size_t>(EventKind::TestOutcome); ++n)
    if (kEventNames[n] == name) return static_cast<EventKind>(n);
  return std::nullopt;
}

SeedCounts init_seeds(std::uint64_t observed_cases, double alpha_a, double r0) {
  if (!(alpha_a >= 0.0 && alpha_a < 1.0)) throw InputError("init_seeds: alpha_a must lie in [0, 1)");
  if (!(r0 >= 0.0)) throw InputError("init_seeds: R0 must be >= 0");
  SeedCounts c;
  c.symptomatic = observed_cases;
  c.asymptomatic = round_half_up(alpha_a / (1.0 - alpha_a) * static_cast<double>(observed_cases));
  c.exposed = round_half_up(r0 * static_cast<double>(c.asymptomatic + c.symptomatic));
  return c;
}

std::vector<SeedAssignment> choose_seeds(const SeedCounts& counts, std::size_t population,
                                         std::uint64_t seed) {
  const std::uint64_t total = counts.symptomatic + counts.asymptomatic + counts.exposed;
  if (total > population) throw InputError("more seeded individuals than population");
  std::vector<PersonId> ids(population);
  std::iota(ids.begin(), ids.end(), PersonId{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first `total` entries are a uniform sample.
  for (std::size_t n = 0; n < total; ++n) {
    std::uniform_int_distribution<std::size_t> pick(n, population - 1);
    std::swap(ids[n], ids[pick(rng)]);
  }
  std::vector<SeedAssignment> out;
  out.reserve(total);
  std::size_t n = 0;
  for (std::uint64_t k = 0; k < counts.symptomatic; ++k)
    out.push_back({ids[n++], Compartment::Is, false, true});
  for (std::uint64_t k = 0; k < counts.asymptomatic; ++k)
    out.push_back({ids[n++], Compartment::Ia, false, false});
  for (std::uint64_t k = 0; k < counts.exposed; ++k)
    out.push_back({ids[n++], Compartment::E, true, false});
  return out;
}

double exposure_contribution(PersonId j, PersonId i, double t, const World& world,
                             const EpidemicParams& params, double r) {
  const auto& trace_i = world.traces[i];
  const std::size_t n = visit_at(trace_i, t);
  if (n >= trace_i.size()) return 0.0;
  const SiteId k = trace_i[n].site;
  return params.beta[index_of(world.sites[k].category)] * r *
         presence_integral(world.traces[j], k, t, params.gamma, params.delta);
}

double home_presence(const Trace& trace_j, double t, double gamma, double delta) {
  double away = 0.0;
  for (std::size_t n = first_departing_after(trace_j, t - delta);
       n < trace_j.size() && trace_j[n].arrive < t; ++n)
    away += decayed_presence(trace_j[n].interval(), t, gamma, delta);
  return std::max(0.0, window_mass(gamma, delta) - away);
}

double household_contribution(PersonId j, PersonId i, double t, const World& world,
                              const EpidemicParams& params, double r) {
  if (visit_at(world.traces[i], t) < world.traces[i].size()) return 0.0;
  return params.xi * r * home_presence(world.traces[j], t, params.gamma, params.delta);
}

std::vector<ContactWindow> pair_windows(const Trace& trace_j, const Trace& trace_i, double t_start,
                                        double horizon, double delta) {
  std::vector<ContactWindow> out;
  for (std::size_t n = first_departing_after(trace_i, t_start);
       n < trace_i.size() && trace_i[n].arrive < horizon; ++n) {
    const Visit& v = trace_i[n];
    const std::size_t first = out.size();
    for (std::size_t m = first_departing_after(trace_j, v.arrive - delta);
         m < trace_j.size() && trace_j[m].arrive < v.depart; ++m) {
      const Visit& u = trace_j[m];
      if (u.site != v.site) continue;
      const double from = std::max({u.arrive, v.arrive, t_start});
      const double to = std::min({v.depart, u.depart + delta, horizon});
      if (!(to > from)) continue;
      if (out.size() > first && from <= out.back().span.to)
        out.back().span.to = std::max(out.back().span.to, to);
      else
        out.push_back({{from, to}, v.site});
    }
  }
  return out;
}

std::vector<Interval> home_windows(const Trace& trace, double t_start, double horizon) {
  std::vector<Interval> out;
  double cursor = t_start;
  for (std::size_t n = first_departing_after(trace, t_start);
       n < trace.size() && cursor < horizon; ++n) {
    const double until = std::min(trace[n].arrive, horizon);
    if (until > cursor) out.push_back({cursor, until});
    cursor = std::max(cursor, trace[n].depart);
  }
  if (cursor < horizon) out.push_back({cursor, horizon});
  return out;
}

namespace {

// Thinning over a union of windows with a constant bound. Gaps between
// windows carry zero intensity, so an overshooting proposal is discarded
// and sampling restarts at the next window.
template <class Windows, class Span, class Accept>
std::optional<std::pair<double, std::size_t>> thin(const Windows& windows, Span span, double t_start,
                                                   double bound, Accept accept, Rng& rng,
                                                   ThinningStats* stats) {
  if (!(bound > 0.0)) return std::nullopt;
  double t = t_start;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const Interval iv = span(windows[w]);
    if (iv.to <= t) continue;
    double s = std::max(t, iv.from);
    for (;;) {
      s += exponential(rng, bound);
      if (s >= iv.to) break;
      const double p = accept(s, windows[w]);
      if (!(p >= 0.0 && p <= 1.0 + 1e-9))
        throw std::logic_error(fmt::format("thinning acceptance {} outside [0, 1] at t = {}", p, s));
      if (stats) {
        ++stats->proposals;
        stats->max_acceptance = std::max(stats->max_acceptance, p);
      }
      if (uniform01(rng) <= p) {
        if (stats) ++stats->accepted;
        return std::make_pair(s, w);
      }
    }
    t = iv.to;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Event> sample_exposures_from(PersonId j, PersonId i, double t_start, double horizon,
                                           double r, const World& world,
                                           const EpidemicParams& params, Rng& rng,
                                           ThinningStats* stats) {
  const auto windows =
      pair_windows(world.traces[j], world.traces[i], t_start, horizon, params.delta);
  if (windows.empty()) return std::nullopt;
  const double mass = window_mass(params.gamma, params.delta);
  const double beta_max = params.beta_max();
  const auto& trace_j = world.traces[j];
  auto accept = [&](double tau, const ContactWindow& w) {
    const double beta = params.beta[index_of(world.sites[w.site].category)];
    return beta * presence_integral(trace_j, w.site, tau, params.gamma, params.delta) /
           (beta_max * mass);
  };
  const auto hit = thin(windows, [](const ContactWindow& w) { return w.span; }, t_start,
                        beta_max * r * mass, accept, rng, stats);
  if (!hit) return std::nullopt;
  return Event{hit->first, EventKind::Exposure, i, j, windows[hit->second].site};
}

std::optional<Event> sample_household_exposure(PersonId j, PersonId i, double t_start,
                                               double horizon, double r, const World& world,
                                               const EpidemicParams& params, Rng& rng,
                                               ThinningStats* stats) {
  const auto windows = home_windows(world.traces[i], t_start, horizon);
  const double mass = window_mass(params.gamma, params.delta);
  const auto& trace_j = world.traces[j];
  auto accept = [&](double tau, const Interval&) {
    return home_presence(trace_j, tau, params.gamma, params.delta) / mass;
  };
  const auto hit = thin(windows, [](const Interval& w) { return w; }, t_start,
                        params.xi * r * mass, accept, rng, stats);
  if (!hit) return std::nullopt;
  return Event{hit->first, EventKind::Exposure, i, j, kNoSite};
}

namespace {

class Simulator {
 public:
  Simulator(const World& world, const SimulationSetup& setup, std::uint64_t seed)
      : world_(world),
        params_(setup.params),
        policies_(setup.policies),
        testing_(setup.testing),
        t_max_(setup.t_max),
        rng_(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Simulation)})),
        coins_{derive_seed(seed, {static_cast<std::uint64_t>(Stream::VisitCoins)})},
        tests_(setup.testing.tests_per_day),
        health_(world.size()),
        end_infectious_(world.size(), 0.0),
        transmits_(world.size(), true),
        awaiting_(world.size(), false),
        isolation_(world.size()) {
    params_.validate();
    testing_.validate();
    log_.population = world.size();
    log_.t_max = t_max_;
  }

  EventLog run(std::span<const SeedAssignment> seeds) {
    apply_seeds(seeds);
    const double import_rate = params_.background_per_week_per_100k *
                               static_cast<double>(world_.size()) / 100000.0 / kHoursPerWeek;
    if (import_rate > 0.0) {
      import_rate_ = import_rate;
      push(exponential(rng_, import_rate_), EventKind::Import);
    }
    if (policies_.has_conditional()) push(kHoursPerDay, EventKind::PolicyTick);

    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      dispatch(e);
    }

    for (auto& p : policies_.policies())
      if (auto* cl = std::get_if<ConditionalLockdown>(&p)) {
        cl->controller.finish(t_max_);
        for (const auto& iv : cl->controller.history()) log_.lockdown.push_back(iv);
      }
    log_.thinning = stats_;
    return std::move(log_);
  }

 private:
  void push(double t, EventKind kind, PersonId subject = kNoPerson, PersonId infector = kNoPerson,
            SiteId site = kNoSite, std::uint32_t aux = 0) {
    if (t > t_max_) return;
    queue_.push(Event{t, kind, subject, infector, site, aux, seq_++});
  }

  void push(const std::optional<Event>& e) {
    if (e) push(e->time, e->kind, e->subject, e->infector, e->site);
  }

  void record(double t, EventKind kind, PersonId subject, PersonId infector = kNoPerson,
              SiteId site = kNoSite, bool positive = false) {
    log_.records.push_back({t, kind, subject, infector, site, positive});
  }

  void apply_seeds(std::span<const SeedAssignment> seeds) {
    for (const auto& s : seeds) {
      if (s.person >= world_.size()) throw InputError("seed individual out of range");
      if (health_[s.person].state != Compartment::S) throw InputError("individual seeded twice");
      transmits_[s.person] = s.transmits;
      switch (s.state) {
        case Compartment::E:
          expose(s.person, 0.0, kNoPerson, kNoSite);
          break;
        case Compartment::Ia:
        case Compartment::Ip:
        case Compartment::Is:
          seed_infectious(s.person, s.state);
          break;
        default:
          throw InputError("seeds must be exposed or infectious");
      }
      if (s.tested_positive) {
        const auto idx = static_cast<std::uint32_t>(log_.tests.size());
        log_.tests.push_back({s.person, 0.0, 0.0, 0.0, true});
        test_outcome(0.0, s.person, idx);
      }
    }
  }

  void seed_infectious(PersonId p, Compartment state) {
    auto& h = health_[p];
    h.t_exposed = 0.0;
    h.t_infectious = 0.0;
    const auto age = index_of(world_.person(p).age);
    if (state == Compartment::Ia) {
      h.state = Compartment::Ia;
      h.asymptomatic = true;
      record(0.0, EventKind::BecomeIa, p);
      end_infectious_[p] = sample_transition_delay(Process::Ra, params_, rng_);
      push(end_infectious_[p], EventKind::Recover, p);
      if (transmits_[p]) start_transmission(p, 0.0);
      return;
    }
    if (state == Compartment::Ip) {
      h.state = Compartment::Ip;
      record(0.0, EventKind::BecomeIp, p);
      const double t_s = sample_transition_delay(Process::W, params_, rng_);
      schedule_symptomatic_course(p, t_s, age);
      if (transmits_[p]) start_transmission(p, 0.0);
      return;
    }
    h.state = Compartment::Is;
    h.t_symptomatic = 0.0;
    record(0.0, EventKind::BecomeIs, p);
    schedule_symptomatic_course(p, 0.0, age);
    if (transmits_[p]) start_transmission(p, 0.0);
  }

  // Pushes BecomeIs (when still ahead) plus hospitalization and resolution.
  void schedule_symptomatic_course(PersonId p, double t_s, std::size_t age) {
    auto& h = health_[p];
    if (t_s > 0.0 || h.state != Compartment::Is) push(t_s, EventKind::BecomeIs, p);
    h.hospitalize = uniform01(rng_) < params_.alpha_h[age];
    h.die = uniform01(rng_) < params_.alpha_b[age];
    if (h.hospitalize) push(t_s + sample_transition_delay(Process::Y, params_, rng_), EventKind::Hospitalize, p);
    if (h.die) {
      end_infectious_[p] = t_s + sample_transition_delay(Process::Z, params_, rng_);
      push(end_infectious_[p], EventKind::Die, p);
    } else {
      end_infectious_[p] = t_s + sample_transition_delay(Process::Rs, params_, rng_);
      push(end_infectious_[p], EventKind::Recover, p);
    }
  }

  void expose(PersonId p, double t, PersonId infector, SiteId site) {
    auto& h = health_[p];
    h.state = Compartment::E;
    h.t_exposed = t;
    record(t, EventKind::Exposure, p, infector, site);

    const double t_inf = t + sample_transition_delay(Process::M, params_, rng_);
    h.asymptomatic = uniform01(rng_) < params_.alpha_a;
    if (h.asymptomatic) {
      push(t_inf, EventKind::BecomeIa, p);
      end_infectious_[p] = t_inf + sample_transition_delay(Process::Ra, params_, rng_);
      push(end_infectious_[p], EventKind::Recover, p);
    } else {
      push(t_inf, EventKind::BecomeIp, p);
      const double t_s = t_inf + sample_transition_delay(Process::W, params_, rng_);
      schedule_symptomatic_course(p, t_s, index_of(world_.person(p).age));
    }
  }

  double relative_infectiousness(PersonId j) const {
    return health_[j].asymptomatic ? params_.mu : 1.0;
  }

  double horizon(PersonId j) const { return std::min(t_max_, end_infectious_[j]); }

  // Samples exposures from j toward every susceptible with a future contact
  // and every susceptible household member.
  void start_transmission(PersonId j, double t) {
    const double until = horizon(j);
    if (!(until > t)) return;
    const double r = relative_infectiousness(j);
    const auto& trace = world_.traces[j];

    candidates_.clear();
    for (std::size_t n = first_departing_after(trace, t); n < trace.size() && trace[n].arrive < until;
         ++n) {
      const Visit& v = trace[n];
      const auto& sv = world_.site_visits[v.site];
      const double earliest = v.arrive - sv.max_duration;
      auto it = std::lower_bound(sv.visits.begin(), sv.visits.end(), earliest,
                                 [](const SiteVisits::Ref& ref, double x) { return ref.arrive < x; });
      const double reach = std::min(v.depart + params_.delta, until);
      for (; it != sv.visits.end() && it->arrive < reach; ++it)
        if (it->person != j && it->depart > std::max(v.arrive, t) &&
            health_[it->person].state == Compartment::S)
          candidates_.push_back(it->person);
    }
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
    for (PersonId i : candidates_)
      push(sample_exposures_from(j, i, t, until, r, world_, params_, rng_, &stats_));

    if (params_.xi > 0.0)
      for (PersonId u : world_.population.households[world_.person(j).household])
        if (u != j && health_[u].state == Compartment::S)
          push(sample_household_exposure(j, u, t, until, r, world_, params_, rng_, &stats_));
  }

  bool isolated_at(PersonId p, double t) const {
    for (const auto& iv : isolation_[p])
      if (iv.contains(t)) return true;
    return false;
  }

  bool visit_realized(PersonId p, std::uint32_t n) const {
    const Visit& v = world_.traces[p][n];
    if (!isolation_[p].empty() && isolated_at(p, v.arrive)) return false;
    return policies_.empty() || policies_.visit_admitted(world_.person(p), n, v, coins_);
  }

  // Fraction of the proposed exposure intensity that survives the active
  // measures and isolations.
  double site_retention(const Event& e) const {
    const auto category = world_.sites[e.site].category;
    const double m = policies_.empty() ? 1.0 : policies_.beta_multiplier(category, e.time);
    if (m <= 0.0) return 0.0;
    const auto& trace_i = world_.traces[e.subject];
    const std::size_t vi = visit_at(trace_i, e.time);
    if (vi >= trace_i.size() || !visit_realized(e.subject, static_cast<std::uint32_t>(vi))) return 0.0;

    const auto& trace_j = world_.traces[e.infector];
    double all = 0.0;
    double kept = 0.0;
    for (std::size_t n = first_departing_after(trace_j, e.time - params_.delta);
         n < trace_j.size() && trace_j[n].arrive < e.time; ++n) {
      if (trace_j[n].site != e.site) continue;
      const double d = decayed_presence(trace_j[n].interval(), e.time, params_.gamma, params_.delta);
      all += d;
      if (visit_realized(e.infector, static_cast<std::uint32_t>(n))) kept += d;
    }
    if (!(all > 0.0)) return 0.0;
    return m * (kept == all ? 1.0 : kept / all);
  }

  double household_retention(const Event& e) const {
    if (!isolation_[e.subject].empty() && isolated_at(e.subject, e.time)) return 0.0;
    const auto& iso = isolation_[e.infector];
    if (iso.empty()) return 1.0;
    const double t = e.time;
    const double lo = t - params_.delta;
    std::vector<Interval> away;
    const auto& trace_j = world_.traces[e.infector];
    for (std::size_t n = first_departing_after(trace_j, lo); n < trace_j.size() && trace_j[n].arrive < t; ++n)
      away.push_back(trace_j[n].interval());
    const double home = home_presence(trace_j, t, params_.gamma, params_.delta);
    if (!(home > 0.0)) return 0.0;
    bool touched = false;
    for (const auto& iv : iso)
      if (iv.to > lo && iv.from < t) {
        away.push_back(iv);
        touched = true;
      }
    if (!touched) return 1.0;
    std::sort(away.begin(), away.end(), [](const Interval& a, const Interval& b) { return a.from < b.from; });
    double away_mass = 0.0;
    Interval cur{kInf, kInf};
    for (const auto& iv : away) {
      if (cur.from != kInf && iv.from <= cur.to) {
        cur.to = std::max(cur.to, iv.to);
        continue;
      }
      if (cur.from != kInf) away_mass += decayed_presence(cur, t, params_.gamma, params_.delta);
      cur = iv;
    }
    if (cur.from != kInf) away_mass += decayed_presence(cur, t, params_.gamma, params_.delta);
    const double kept = std::max(0.0, window_mass(params_.gamma, params_.delta) - away_mass);
    return std::min(1.0, kept / home);
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::Exposure: on_exposure(e); break;
      case EventKind::BecomeIa:
      case EventKind::BecomeIp: on_infectious(e); break;
      case EventKind::BecomeIs: on_symptomatic(e); break;
      case EventKind::Hospitalize: {
        auto& h = health_[e.subject];
        if (h.state == Compartment::Is && !h.hospitalized) {
          h.hospitalized = true;
          record(e.time, e.kind, e.subject);
        }
        break;
      }
      case EventKind::Recover:
      case EventKind::Die: on_resolution(e); break;
      case EventKind::TestOutcome: test_outcome(e.time, e.subject, e.aux); break;
      case EventKind::TestDequeue: on_test_dequeue(e); break;
      case EventKind::PolicyTick: on_policy_tick(e.time); break;
      case EventKind::Import: on_import(e.time); break;
    }
  }

  void on_exposure(const Event& e) {
    const PersonId i = e.subject;
    const PersonId j = e.infector;
    if (!is_infectious(health_[j].state) || health_[i].state != Compartment::S) return;
    const bool household = e.site == kNoSite;
    const double keep = household ? household_retention(e) : site_retention(e);
    if (keep < 1.0 && uniform01(rng_) >= keep) {
      const double r = relative_infectiousness(j);
      const double until = horizon(j);
      push(household ? sample_household_exposure(j, i, e.time, until, r, world_, params_, rng_, &stats_)
                     : sample_exposures_from(j, i, e.time, until, r, world_, params_, rng_, &stats_));
      return;
    }
    expose(i, e.time, j, e.site);
  }

  void on_infectious(const Event& e) {
    auto& h = health_[e.subject];
    if (h.state != Compartment::E) return;
    h.state = e.kind == EventKind::BecomeIa ? Compartment::Ia : Compartment::Ip;
    h.t_infectious = e.time;
    record(e.time, e.kind, e.subject);
    if (transmits_[e.subject]) start_transmission(e.subject, e.time);
  }

  void on_symptomatic(const Event& e) {
    auto& h = health_[e.subject];
    if (h.state != Compartment::Ip) return;
    h.state = Compartment::Is;
    h.t_symptomatic = e.time;
    record(e.time, e.kind, e.subject);
    if (testing_.tests_per_day > 0.0) request_test(e.subject, e.time);
  }

  void on_resolution(const Event& e) {
    auto& h = health_[e.subject];
    const bool dies = e.kind == EventKind::Die;
    if (dies ? h.state != Compartment::Is
             : h.state != Compartment::Ia && h.state != Compartment::Is)
      return;
    h.state = dies ? Compartment::D : Compartment::R;
    h.hospitalized = false;
    h.t_resolved = e.time;
    record(e.time, e.kind, e.subject);
  }

  bool testable(PersonId p) const { return !awaiting_[p] && health_[p].tests_positive == 0; }

  void request_test(PersonId p, double t) {
    if (!testable(p)) return;
    awaiting_[p] = true;
    push(tests_.enqueue(p, t), EventKind::TestDequeue, p);
    pending_enqueue_.push_back(t);
  }

  void on_test_dequeue(const Event& e) {
    const PersonId p = tests_.dequeue();
    assert(p == e.subject);
    const double t_enqueue = pending_enqueue_.front();
    pending_enqueue_.pop_front();
    sample_test(p, t_enqueue, e.time);
  }

  void sample_test(PersonId p, double t_enqueue, double t_sample) {
    const auto idx = static_cast<std::uint32_t>(log_.tests.size());
    const double t_outcome = t_sample + testing_.delta_test_h;
    log_.tests.push_back({p, t_enqueue, t_sample, t_outcome, tests_positive(health_[p].state)});
    awaiting_[p] = true;
    if (t_outcome <= t_max_)
      push(t_outcome, EventKind::TestOutcome, p, kNoPerson, kNoSite, idx);
  }

  void test_outcome(double t, PersonId p, std::uint32_t idx) {
    const auto& rec = log_.tests[idx];
    awaiting_[p] = false;
    record(t, EventKind::TestOutcome, p, kNoPerson, kNoSite, rec.positive);
    auto& h = health_[p];
    if (!rec.positive) {
      ++h.tests_negative;
      return;
    }
    ++h.tests_positive;
    positive_times_.push_back(t);
    if (testing_.isolate_positives) isolation_[p].push_back({t, kInf});
    if (testing_.tracing.mode != TracingMode::None && t > 0.0) trace_from(p, t);
  }

  void trace_from(PersonId index, double t) {
    const auto& cfg = testing_.tracing;
    if (!world_.person(index).compliant) return;
    const Interval window{std::max(0.0, t - cfg.lookback_days * kHoursPerDay), t};
    if (!(window.to > window.from)) return;
    const VisitFilter realized = [this](PersonId p, std::uint32_t n) { return visit_realized(p, n); };
    const auto contacts = cfg.kind == TracingKind::Location
                              ? trace_contacts_location(index, window, world_, params_, realized)
                              : trace_contacts_proximity(index, window, world_, realized);

    std::vector<RankedContact> to_test;
    for (const auto& c : contacts) {
      if (!chain_tracked(true, world_.person(c.j).compliant)) continue;
      if (health_[c.j].state == Compartment::D) continue;
      isolation_[c.j].push_back({t, t + cfg.isolation_days * kHoursPerDay});
      if (cfg.mode == TracingMode::IsolateTest)
        to_test.push_back({c.j, 0.0});
      else if (cfg.mode == TracingMode::IsolateTestRanked)
        to_test.push_back(
            {c.j, empirical_exposure_probability(index, c.j, window, world_, params_, realized)});
    }
    if (to_test.empty()) return;
    if (cfg.mode == TracingMode::IsolateTestRanked) {
      for (PersonId p : rank_contacts(std::move(to_test), cfg.top_k))
        if (testable(p)) sample_test(p, t, t);
    } else {
      for (const auto& c : to_test)
        if (testable(c.id)) sample_test(c.id, t, t);
    }
  }

  void on_policy_tick(double t) {
    for (auto& p : policies_.policies()) {
      auto* cl = std::get_if<ConditionalLockdown>(&p);
      if (!cl) continue;
      const double lo = t - cl->window_days * kHoursPerDay;
      const double recent = static_cast<double>(std::count_if(
          positive_times_.begin(), positive_times_.end(), [&](double x) { return x > lo && x <= t; }));
      const std::array<double, 1> counts{recent};
      conditional_lockdown_tick(*cl, t, counts, static_cast<double>(world_.size()));
    }
    push(t + kHoursPerDay, EventKind::PolicyTick);
  }

  void on_import(double t) {
    const std::size_t susceptible = static_cast<std::size_t>(std::count_if(
        health_.begin(), health_.end(), [](const HealthState& h) { return h.state == Compartment::S; }));
    if (susceptible > 0) {
      std::uniform_int_distribution<PersonId> pick(0, static_cast<PersonId>(world_.size() - 1));
      PersonId p = pick(rng_);
      while (health_[p].state != Compartment::S) p = pick(rng_);
      expose(p, t, kNoPerson, kNoSite);
    }
    push(t + exponential(rng_, import_rate_), EventKind::Import);
  }

  const World& world_;
  EpidemicParams params_;
  PolicySet policies_;
  TestConfig testing_;
  double t_max_;
  Rng rng_;
  VisitCoins coins_;
  TestQueue tests_;
  std::deque<double> pending_enqueue_;
  std::vector<HealthState> health_;
  std::vector<double> end_infectious_;
  std::vector<bool> transmits_;
  std::vector<bool> awaiting_;
  std::vector<std::vector<Interval>> isolation_;
  std::vector<double> positive_times_;
  std::vector<PersonId> candidates_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  double import_rate_ = 0.0;
  ThinningStats stats_;
  EventLog log_;
};

}  // namespace

EventLog run_simulation(const World& world, const SimulationSetup& setup,
                        std::span<const SeedAssignment> seeds, std::uint64_t seed) {
  if (!(setup.t_max > 0.0)) throw InputError("simulation horizon must be positive");
  if (setup.t_max > world.t_max + 1e-9) throw InputError("simulation horizon exceeds the traces");
  return Simulator(world, setup, seed).run(seeds);
}

EventLog run_simulation(const World& world, const SimulationSetup& setup, const SeedCounts& counts,
                        std::uint64_t seed) {
  const auto seeds =
      choose_seeds(counts, world.size(), derive_seed(seed, {static_cast<std::uint64_t>(Stream::Seeding)}));
  return run_simulation(world, setup, seeds, seed);
}

std::vector<CompartmentCounts> daily_counts(const EventLog& log, std::size_t days) {
  std::vector<CompartmentCounts> out(days);
  std::vector<Compartment> state(log.population, Compartment::S);
  std::vector<bool> hosp(log.population, false);
  CompartmentCounts cur;
  cur.n[0] = log.population;
  auto move = [&](PersonId p, Compartment to) {
    --cur.n[static_cast<std::size_t>(state[p])];
    ++cur.n[static_cast<std::size_t>(to)];
    state[p] = to;
  };
  std::size_t r = 0;
  for (std::size_t d = 0; d < days; ++d) {
    const double until = kHoursPerDay * static_cast<double>(d + 1);
    for (; r < log.records.size() && log.records[r].t < until; ++r) {
      const auto& rec = log.records[r];
      switch (rec.kind) {
        case EventKind::Exposure: move(rec.subject, Compartment::E); break;
        case EventKind::BecomeIa: move(rec.subject, Compartment::Ia); break;
        case EventKind::BecomeIp: move(rec.subject, Compartment::Ip); break;
        case EventKind::BecomeIs: move(rec.subject, Compartment::Is); break;
        case EventKind::Hospitalize:
          if (!hosp[rec.subject]) ++cur.hospitalized;
          hosp[rec.subject] = true;
          break;
        case EventKind::Recover:
        case EventKind::Die:
          if (hosp[rec.subject]) --cur.hospitalized;
          hosp[rec.subject] = false;
          move(rec.subject, rec.kind == EventKind::Die ? Compartment::D : Compartment::R);
          break;
        case EventKind::TestOutcome:
          if (rec.positive) ++cur.cum_positive;
          break;
        default: break;
      }
    }
    out[d] = cur;
  }
  return out;
}

}  // namespace hotspot
