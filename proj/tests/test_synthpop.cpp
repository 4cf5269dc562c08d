#include <doctest.h>

#include <numeric>

#include "hotspot/rng.hpp"
#include "hotspot/synthpop.hpp"
#include "support.hpp"

using namespace hotspot;

namespace {

PerAge<double> single_band(AgeGroup a) {
  PerAge<double> f{};
  f[index_of(a)] = 1.0;
  return f;
}

HouseholdTable singletons() {
  HouseholdTable h;
  h.size_fractions = {1.0};
  h.member_weights = {PerAge<double>{1, 1, 1, 1, 1, 1}};
  return h;
}

MobilityTable only(SiteCategory c, AgeGroup a, double per_week, double minutes) {
  MobilityTable m;
  m.visits_per_week[index_of(a)][index_of(c)] = per_week;
  m.mean_duration_min.fill(60.0);
  m.mean_duration_min[index_of(c)] = minutes;
  return m;
}

constexpr double kDegPerKm = 1.0 / 111.195;

}  // namespace

TEST_CASE("degenerate population") {
  PopulationSpec spec;
  spec.tiles = {{"t", 48.5, 9.0, 100.0}};
  spec.age_fractions = single_band(AgeGroup::A35_59);
  spec.households = singletons();
  spec.total = 100;
  spec.downscale = 10;
  const auto pop = build_population(spec, 1);
  CHECK(pop.individuals.size() == 10);
  CHECK(pop.households.size() == 10);
  for (const auto& h : pop.households) CHECK(h.size() == 1);
}

TEST_CASE("tile split follows a multinomial draw") {
  PopulationSpec spec;
  spec.tiles = {{"a", 48.0, 9.0, 75.0}, {"b", 49.0, 9.0, 25.0}};
  spec.age_fractions = single_band(AgeGroup::A35_59);
  spec.households = singletons();
  spec.total = 100;
  double chi2 = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    const auto pop = build_population(spec, derive_seed(77, {static_cast<std::uint64_t>(s)}));
    const double in_a = static_cast<double>(std::count_if(pop.individuals.begin(), pop.individuals.end(),
                                                          [](const Individual& p) { return p.lat < 48.5; }));
    chi2 += (in_a - 75.0) * (in_a - 75.0) / (100.0 * 0.75 * 0.25);
  }
  // Each seed contributes a chi-square(1) variable: the average should be near 1.
  CHECK(chi2 / seeds == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("age fractions follow the demographics table") {
  PopulationSpec spec;
  spec.tiles = {{"t", 48.5, 9.0, 1.0}};
  spec.age_fractions = {0.0, 0.0, 0.4, 0.0, 0.6, 0.0};
  spec.households = singletons();
  spec.total = 10000;
  const auto pop = build_population(spec, 5);
  const auto young = std::count_if(pop.individuals.begin(), pop.individuals.end(),
                                   [](const Individual& p) { return p.age == AgeGroup::A15_34; });
  CHECK(std::abs(static_cast<double>(young) / 10000.0 - 0.4) < 0.02);
}

TEST_CASE("households respect the composition table") {
  PopulationSpec spec;
  spec.tiles = {{"t", 48.5, 9.0, 1.0}};
  spec.age_fractions = default_age_fractions();
  spec.households = default_household_table();
  spec.total = 5000;
  const auto pop = build_population(spec, 9);
  std::size_t members = 0;
  for (std::size_t h = 0; h < pop.households.size(); ++h) {
    members += pop.households[h].size();
    for (PersonId id : pop.households[h]) CHECK(pop.individuals[id].household == h);
  }
  CHECK(members == pop.individuals.size());
}

TEST_CASE("population input validation") {
  PopulationSpec spec;
  spec.age_fractions = default_age_fractions();
  spec.households = singletons();
  spec.total = 10;
  CHECK_THROWS_AS(build_population(spec, 1), InputError);
  spec.tiles = {{"t", 0, 0, 1}};
  spec.age_fractions = {0.5, 0.1, 0, 0, 0, 0};
  CHECK_THROWS_AS(build_population(spec, 1), InputError);
}

TEST_CASE("site assignment") {
  SUBCASE("single site is always chosen") {
    std::vector<Individual> people(20);
    for (auto& p : people) p.lat = 48.5;
    std::vector<Site> sites{{0, "x", SiteCategory::Work, 48.6, 9.0}};
    PerCategory<int> counts{0, 0, 0, 1, 0};
    assign_sites(people, sites, counts, 3);
    for (const auto& p : people) CHECK(p.sites[index_of(SiteCategory::Work)] == std::vector<SiteId>{0});
  }
  SUBCASE("inverse-square weights give a 4:1 ratio") {
    std::vector<Individual> people(10000);
    for (auto& p : people) p.lat = 48.0, p.lon = 9.0;
    std::vector<Site> sites{{0, "near", SiteCategory::Social, 48.0 + kDegPerKm, 9.0},
                            {1, "far", SiteCategory::Social, 48.0 + 2 * kDegPerKm, 9.0}};
    assign_sites(people, sites, {0, 1, 0, 0, 0}, 4);
    double near = 0;
    for (const auto& p : people) near += p.sites[index_of(SiteCategory::Social)][0] == 0;
    CHECK(near / (10000.0 - near) == doctest::Approx(4.0).epsilon(0.05));
  }
  SUBCASE("too few sites") {
    std::vector<Individual> people(1);
    std::vector<Site> sites{{0, "x", SiteCategory::Work, 0, 0}};
    CHECK_THROWS_AS(assign_sites(people, sites, {0, 0, 0, 2, 0}, 1), InputError);
  }
}

TEST_CASE("trace generation") {
  Individual p;
  p.age = AgeGroup::A15_34;
  for (SiteId s = 0; s < 10; ++s) p.sites[index_of(SiteCategory::Social)].push_back(s);

  SUBCASE("zero rates give an empty trace") {
    CHECK(generate_trace(p, MobilityTable{}, 1680.0, 1).empty());
  }
  SUBCASE("toddlers with a work site never go to work") {
    Individual kid = p;
    kid.age = AgeGroup::A0_4;
    kid.sites[index_of(SiteCategory::Work)] = {3};
    const auto trace = generate_trace(kid, default_mobility(), 1680.0, 2);
    for (const auto& v : trace) CHECK(v.site != 3);
  }
  SUBCASE("visit counts follow the weekly rate") {
    const auto m = only(SiteCategory::Social, AgeGroup::A15_34, 2.0, 90.0);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 500; ++s) total += static_cast<double>(generate_trace(p, m, 1680.0, s).size());
    CHECK(total / 500.0 == doctest::Approx(20.0).epsilon(0.10));
  }
  SUBCASE("durations follow the category mean") {
    Individual shopper;
    shopper.age = AgeGroup::A35_59;
    shopper.sites[index_of(SiteCategory::Grocery)] = {0};
    const auto m = only(SiteCategory::Grocery, AgeGroup::A35_59, 7.0, 30.0);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint64_t s = 0; n < 10000; ++s)
      for (const auto& v : generate_trace(shopper, m, 1680.0, s)) {
        sum += v.depart - v.arrive;
        ++n;
      }
    CHECK(sum / static_cast<double>(n) * 60.0 == doctest::Approx(30.0).epsilon(0.05));
  }
  SUBCASE("visits are sorted and disjoint") {
    const auto trace = generate_trace(p, default_mobility(), 1680.0, 8);
    for (std::size_t n = 1; n < trace.size(); ++n) CHECK(trace[n].arrive >= trace[n - 1].depart);
  }
}

TEST_CASE("presence integral over a trace") {
  const double gamma = 0.3465, delta = 4.6438;
  auto w = hotspot::testing::make_world(1, {SiteCategory::Social, SiteCategory::Work},
                                        {{0, 0, 0.0, 1.0}, {0, 1, 2.0, 3.0}, {0, 0, 10.0, 12.0}}, 24.0);
  CHECK(presence_integral(w.traces[0], 0, 1.0, gamma, delta) == doctest::Approx((1 - std::exp(-gamma)) / gamma));
  CHECK(presence_integral(w.traces[0], 0, 9.0, gamma, delta) == 0.0);
  CHECK(presence_integral(w.traces[0], 1, 3.0, gamma, delta) == doctest::Approx((1 - std::exp(-gamma)) / gamma));
  CHECK(presence_integral(w.traces[0], 0, 30.0, gamma, delta) == 0.0);
}

TEST_CASE("visit lookup") {
  auto w = hotspot::testing::make_world(1, {SiteCategory::Social}, {{0, 0, 1.0, 2.0}, {0, 0, 5.0, 6.0}}, 24.0);
  CHECK(visit_at(w.traces[0], 1.5) == 0);
  CHECK(visit_at(w.traces[0], 2.0) == static_cast<std::size_t>(-1));
  CHECK(visit_at(w.traces[0], 5.0) == 1);
  CHECK(first_departing_after(w.traces[0], 2.0) == 1);
}

TEST_CASE("site downscaling and world build are deterministic") {
  std::vector<Site> sites;
  for (SiteId s = 0; s < 30; ++s) sites.push_back({s, "s" + std::to_string(s), static_cast<SiteCategory>(s % 5), 48.5, 9.0});
  CHECK(downscale_sites(sites, 4, 1).size() == 8);
  CHECK(downscale_sites(sites, 1, 1).size() == 30);

  WorldSpec spec;
  spec.population.tiles = {{"t", 48.5, 9.0, 1.0}};
  spec.population.age_fractions = default_age_fractions();
  spec.population.households = default_household_table();
  spec.population.total = 300;
  spec.sites = sites;
  spec.mobility = default_mobility();
  spec.t_max = 24.0 * 14;
  const auto a = build_world(spec, 42);
  const auto b = build_world(spec, 42);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t p = 0; p < a.traces.size(); ++p) {
    REQUIRE(a.traces[p].size() == b.traces[p].size());
    for (std::size_t n = 0; n < a.traces[p].size(); ++n) CHECK(a.traces[p][n].arrive == b.traces[p][n].arrive);
  }
}
