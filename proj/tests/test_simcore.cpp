#include <doctest.h>

#include <set>

#include "hotspot/kernels.hpp"
#include "hotspot/simcore.hpp"
#include "support.hpp"

using namespace hotspot;
using hotspot::testing::make_world;

namespace {

EpidemicParams base_params(double beta, double xi) {
  EpidemicParams p;
  p.beta.fill(beta);
  p.xi = xi;
  return p;
}

SimulationSetup setup_for(const EpidemicParams& p, double t_max) {
  SimulationSetup s;
  s.params = p;
  s.t_max = t_max;
  return s;
}

}  // namespace

TEST_CASE("seed counts") {
  auto c = init_seeds(0, 0.4, 2.0);
  CHECK(c.symptomatic + c.asymptomatic + c.exposed == 0);
  c = init_seeds(5, 0.4, 2.0);
  CHECK(c.symptomatic == 5);
  CHECK(c.asymptomatic == 3);
  CHECK(c.exposed == 16);
  c = init_seeds(10, 0.4, 2.0);
  CHECK(c.asymptomatic == 7);
  CHECK(c.exposed == 34);
  CHECK_THROWS_AS(init_seeds(1, 1.0, 2.0), InputError);
}

TEST_CASE("seed choice") {
  const auto seeds = choose_seeds({3, 2, 5}, 20, 9);
  REQUIRE(seeds.size() == 10);
  std::set<PersonId> ids;
  for (const auto& s : seeds) ids.insert(s.person);
  CHECK(ids.size() == 10);
  CHECK(seeds[0].state == Compartment::Is);
  CHECK(seeds[0].tested_positive);
  CHECK_FALSE(seeds[0].transmits);
  CHECK(seeds[9].state == Compartment::E);
  CHECK(seeds[9].transmits);
  CHECK_THROWS_AS(choose_seeds({30, 0, 0}, 20, 1), InputError);
}

TEST_CASE("site exposure rate") {
  const auto p = base_params(0.5, 0.0);
  auto w = make_world(3, {SiteCategory::Social, SiteCategory::Work},
                      {{0, 0, 0, 100}, {1, 0, 0, 100}, {2, 0, 120, 130}}, 200);
  SUBCASE("i at no site") { CHECK(exposure_contribution(0, 2, 50.0, w, p, 1.0) == 0.0); }
  SUBCASE("saturated co-presence hits the bound") {
    CHECK(exposure_contribution(0, 1, 50.0, w, p, 1.0) == doctest::Approx(lambda_max(p)).epsilon(1e-12));
    CHECK(lambda_max(p) == doctest::Approx(1.1544).epsilon(1e-4));
  }
  SUBCASE("j left long before i arrived") {
    // j departed at 100, i arrives at 120 > 100 + 2 delta.
    CHECK(exposure_contribution(0, 2, 121.0, w, p, 1.0) == 0.0);
  }
}

TEST_CASE("household exposure rate") {
  const auto p = base_params(0.5, 0.9375);
  auto w = make_world(2, {SiteCategory::Work}, {{0, 0, 50, 60}}, 200, {{0, 1}});
  CHECK(household_contribution(1, 0, 55.0, w, p, 1.0) == 0.0);
  CHECK(household_contribution(1, 0, 30.0, w, p, 1.0) == doctest::Approx(0.9375 * window_mass(p.gamma, p.delta)));
  CHECK(household_contribution(1, 0, 30.0, w, p, 1.0) == doctest::Approx(2.1645).epsilon(1e-4));
  // j away for the last hour: only the decayed home mass before it counts.
  const double expected = 0.9375 * (window_mass(p.gamma, p.delta) -
                                    decayed_presence({50, 60}, 51.0, p.gamma, p.delta));
  CHECK(household_contribution(0, 1, 51.0, w, p, 1.0) == doctest::Approx(expected));
}

TEST_CASE("pair sampler") {
  const auto p = base_params(0.5, 0.0);
  SUBCASE("no future contact") {
    auto w = make_world(2, {SiteCategory::Social}, {{0, 0, 0, 10}, {1, 0, 50, 60}}, 100);
    Rng rng(1);
    CHECK_FALSE(sample_exposures_from(0, 1, 0.0, 100.0, 1.0, w, p, rng).has_value());
  }
  SUBCASE("saturated overlap is exponential with the bound as rate") {
    auto w = make_world(2, {SiteCategory::Social}, {{0, 0, 0, 1000}, {1, 0, 0, 1000}}, 1000);
    Rng rng(2);
    ThinningStats stats;
    std::vector<double> waits;
    for (int n = 0; n < 10000; ++n) {
      const auto e = sample_exposures_from(0, 1, 10.0, 1000.0, 1.0, w, p, rng, &stats);
      REQUIRE(e.has_value());
      CHECK(e->site == 0);
      waits.push_back(e->time - 10.0);
    }
    const double rate = lambda_max(p);
    CHECK(hotspot::testing::ks_statistic(waits, [&](double x) { return -std::expm1(-rate * x); }) < 0.02);
    CHECK(stats.accepted == stats.proposals);
    CHECK(stats.max_acceptance == doctest::Approx(1.0));
  }
  SUBCASE("accepted times fall inside contact windows") {
    auto w = make_world(2, {SiteCategory::Social}, {{0, 0, 5, 7}, {1, 0, 8, 9}, {1, 0, 30, 40}}, 100);
    Rng rng(3);
    for (int n = 0; n < 2000; ++n) {
      const auto e = sample_exposures_from(0, 1, 0.0, 100.0, 1.0, w, p, rng);
      if (e) CHECK((e->time >= 8.0 && e->time < 9.0));
    }
  }
}

TEST_CASE("household sampler") {
  const auto p = base_params(0.0, 0.5);
  auto w = make_world(2, {SiteCategory::Work}, {}, 1000, {{0, 1}});
  Rng rng(4);
  std::vector<double> waits;
  for (int n = 0; n < 5000; ++n) {
    const auto e = sample_household_exposure(0, 1, 10.0, 1000.0, 1.0, w, p, rng);
    REQUIRE(e.has_value());
    CHECK(e->site == kNoSite);
    waits.push_back(e->time - 10.0);
  }
  const double rate = p.xi * window_mass(p.gamma, p.delta);
  CHECK(hotspot::testing::ks_statistic(waits, [&](double x) { return -std::expm1(-rate * x); }) < 0.03);
}

TEST_CASE("window helpers") {
  auto w = make_world(2, {SiteCategory::Social, SiteCategory::Work},
                      {{0, 0, 1, 2}, {0, 1, 10, 12}, {1, 0, 3, 4}, {1, 1, 11, 20}}, 48);
  const auto wins = pair_windows(w.traces[0], w.traces[1], 0.0, 48.0, 4.6438);
  REQUIRE(wins.size() == 2);
  CHECK(wins[0].span.from == 3.0);
  CHECK(wins[0].span.to == 4.0);
  CHECK(wins[1].span.from == 11.0);
  CHECK(wins[1].span.to == doctest::Approx(12.0 + 4.6438));
  const auto home = home_windows(w.traces[0], 0.0, 48.0);
  REQUIRE(home.size() == 3);
  CHECK(home[1].from == 2.0);
  CHECK(home[1].to == 10.0);
}

TEST_CASE("simulation without seeds is empty") {
  auto w = make_world(10, {SiteCategory::Social}, {{0, 0, 1, 5}, {1, 0, 2, 6}}, 100);
  const auto log = run_simulation(w, setup_for(base_params(0.5, 0.5), 100), SeedCounts{}, 1);
  CHECK(log.records.empty());
  CHECK(log.tests.empty());
}

TEST_CASE("background imports follow the configured rate") {
  auto p = base_params(0.0, 0.0);
  p.background_per_week_per_100k = 5.0;
  auto w = make_world(10000, {SiteCategory::Social}, {}, 120 * 24.0);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto log = run_simulation(w, setup_for(p, 120 * 24.0), SeedCounts{}, s);
    for (const auto& r : log.records)
      if (r.kind == EventKind::Exposure) {
        CHECK(r.infector == kNoPerson);
        total += 1.0;
      }
  }
  const double want = 5.0 * (10000.0 / 100000.0) * (120.0 / 7.0);
  CHECK(want == doctest::Approx(8.57).epsilon(1e-3));
  CHECK(total / 200.0 == doctest::Approx(want).epsilon(0.15));
}

TEST_CASE("testing delay and negative tests of traced contacts") {
  // Person 0 is exposed at t = 0 and shares a site with person 1, who cannot be infected.
  for (double delta_test : {48.0, 3.0}) {
    auto p = base_params(0.0, 0.0);
    p.alpha_a = 0.0;
    p.alpha_h.fill(0.0);
    p.alpha_b.fill(0.0);
    std::vector<hotspot::testing::VisitSpec> visits;
    for (int d = 0; d < 20; ++d) {
      visits.push_back({0, 0, 24.0 * d + 8, 24.0 * d + 12});
      visits.push_back({1, 0, 24.0 * d + 9, 24.0 * d + 11});
    }
    auto w = make_world(2, {SiteCategory::Work}, visits, 24 * 40.0);
    auto setup = setup_for(p, 24 * 40.0);
    setup.testing.tests_per_day = 10.0;
    setup.testing.delta_test_h = delta_test;
    setup.testing.tracing.mode = TracingMode::IsolateTest;
    const std::vector<SeedAssignment> seeds{{0, Compartment::E, true, false}};
    const auto log = run_simulation(w, setup, seeds, 5);
    REQUIRE_FALSE(log.tests.empty());
    bool saw_negative = false;
    for (const auto& t : log.tests) {
      CHECK(t.t_outcome - t.t_sample == doctest::Approx(delta_test));
      if (t.person == 1) {
        CHECK_FALSE(t.positive);
        saw_negative = true;
      }
      if (t.person == 0) CHECK(t.positive);
    }
    CHECK(saw_negative);
  }
}

TEST_CASE("identical seeds give identical logs") {
  std::vector<hotspot::testing::VisitSpec> visits;
  for (PersonId i = 0; i < 30; ++i)
    for (int d = 0; d < 10; ++d) visits.push_back({i, static_cast<SiteId>(i % 3), 24.0 * d + i % 7, 24.0 * d + i % 7 + 3});
  auto w = make_world(30, {SiteCategory::Social, SiteCategory::Work, SiteCategory::Grocery}, visits, 240);
  const auto setup = setup_for(base_params(0.8, 0.5), 240);
  const auto a = run_simulation(w, setup, SeedCounts{1, 1, 2}, 77);
  const auto b = run_simulation(w, setup, SeedCounts{1, 1, 2}, 77);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t n = 0; n < a.records.size(); ++n) {
    CHECK(a.records[n].t == b.records[n].t);
    CHECK(a.records[n].subject == b.records[n].subject);
    CHECK(a.records[n].kind == b.records[n].kind);
  }
}

TEST_CASE("daily counts replay the log") {
  EventLog log;
  log.population = 3;
  log.t_max = 72;
  log.records = {{0, EventKind::Exposure, 0},       {10, EventKind::BecomeIp, 0},
                 {30, EventKind::BecomeIs, 0},      {31, EventKind::Hospitalize, 0},
                 {40, EventKind::TestOutcome, 0, kNoPerson, kNoSite, true},
                 {60, EventKind::Recover, 0}};
  const auto days = daily_counts(log, 3);
  CHECK(days[0].n[static_cast<int>(Compartment::Ip)] == 1);
  CHECK(days[0].n[static_cast<int>(Compartment::S)] == 2);
  CHECK(days[1].hospitalized == 1);
  CHECK(days[1].cum_positive == 1);
  CHECK(days[2].n[static_cast<int>(Compartment::R)] == 1);
  CHECK(days[2].hospitalized == 0);
}

TEST_CASE("event kind names round-trip") {
  for (auto k : {EventKind::Exposure, EventKind::BecomeIa, EventKind::BecomeIp, EventKind::BecomeIs,
                 EventKind::Hospitalize, EventKind::Recover, EventKind::Die, EventKind::TestOutcome})
    CHECK(parse_event_kind(to_string(k)) == k);
  CHECK_FALSE(parse_event_kind("Teleport").has_value());
}
