#include "hotspot/synthpop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hotspot/kernels.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

MobilityTable default_mobility() {
  MobilityTable m;
  //                    edu soc trn wrk gro
  m.visits_per_week = {{{5, 1, 0, 0, 0},
                        {5, 2, 3, 0, 0},
                        {2, 2, 3, 3, 1},
                        {0, 2, 1, 5, 1},
                        {0, 3, 2, 0, 1},
                        {0, 2, 1, 0, 1}}};
  m.mean_duration_min = {120, 90, 12, 120, 30};
  m.sites_per_category = {1, 10, 5, 1, 2};
  return m;
}

PerAge<double> default_age_fractions() {
  return {0.0491, 0.0891, 0.2301, 0.3510, 0.2224, 0.0583};
}

HouseholdTable default_household_table() {
  HouseholdTable h;
  h.size_fractions = {0.4190, 0.3380, 0.1190, 0.0910, 0.0330};
  // Singletons are adults; larger households may contain children.
  h.member_weights = {
      PerAge<double>{0.0, 0.0, 1.0, 1.0, 1.0, 1.0},
      PerAge<double>{0.1, 0.1, 1.0, 1.0, 1.0, 0.8},
      PerAge<double>{0.6, 0.6, 1.0, 1.0, 0.3, 0.1},
      PerAge<double>{1.0, 1.0, 1.0, 1.0, 0.1, 0.05},
      PerAge<double>{1.0, 1.0, 1.0, 1.0, 0.2, 0.05},
  };
  return h;
}

namespace {

void require_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw InputError(std::string(what) + ": negative fraction");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError(std::string(what) + ": fractions must sum to 1");
}

constexpr bool is_adult(std::size_t band) { return band >= index_of(AgeGroup::A15_34); }

// Greedy fill of households within one tile.
void form_households(const std::vector<PersonId>& members, std::vector<Individual>& people,
                     const HouseholdTable& table, Rng& rng,
                     std::vector<std::vector<PersonId>>& households) {
  PerAge<std::vector<PersonId>> pools;
  for (PersonId id : members) pools[index_of(people[id].age)].push_back(id);

  std::discrete_distribution<std::size_t> size_dist(table.size_fractions.begin(),
                                                    table.size_fractions.end());
  std::size_t remaining = members.size();
  while (remaining > 0) {
    const std::size_t size = size_dist(rng) + 1;
    const auto& weights = table.member_weights[size - 1];
    std::vector<PersonId> hh;
    for (std::size_t slot = 0; slot < size; ++slot) {
      PerAge<double> w{};
      bool any_adult = false;
      for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
        w[a] = pools[a].empty() ? 0.0 : weights[a];
        any_adult = any_adult || (is_adult(a) && w[a] > 0.0);
      }
      // Every household is headed by an adult while admissible adults remain.
      if (slot == 0 && any_adult)
        for (std::size_t a = 0; a < kNumAgeGroups; ++a)
          if (!is_adult(a)) w[a] = 0.0;
      if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) break;
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const std::size_t a = pick(rng);
      hh.push_back(pools[a].back());
      pools[a].pop_back();
    }
    if (hh.empty()) break;
    remaining -= hh.size();
    households.push_back(std::move(hh));
  }
  for (auto& pool : pools)
    for (PersonId id : pool) households.push_back({id});
}

}  // namespace

Population build_population(const PopulationSpec& spec, std::uint64_t seed) {
  if (spec.tiles.empty()) throw InputError("build_population: empty tile list");
  if (spec.total == 0) throw InputError("build_population: total population is zero");
  if (spec.downscale == 0) throw InputError("build_population: downscale factor must be positive");
  require_distribution(spec.age_fractions, "age fractions");
  require_distribution(spec.households.size_fractions, "household size fractions");
  if (spec.households.member_weights.size() != spec.households.size_fractions.size())
    throw InputError("household table: one member-weight row per household size required");

  std::vector<double> tile_weights;
  for (const auto& t : spec.tiles) {
    if (!(t.population >= 0.0)) throw InputError("tile " + t.id + ": negative population");
    tile_weights.push_back(t.population);
  }
  if (std::accumulate(tile_weights.begin(), tile_weights.end(), 0.0) <= 0.0)
    throw InputError("build_population: tiles carry no population");

  Rng rng(seed);
  const std::uint64_t n = (spec.total + spec.downscale - 1) / spec.downscale;

  Population pop;
  pop.individuals.resize(n);
  std::discrete_distribution<std::size_t> tile_dist(tile_weights.begin(), tile_weights.end());
  std::discrete_distribution<std::size_t> age_dist(spec.age_fractions.begin(),
                                                   spec.age_fractions.end());
  std::vector<std::vector<PersonId>> by_tile(spec.tiles.size());
  for (PersonId i = 0; i < n; ++i) {
    auto& p = pop.individuals[i];
    p.id = i;
    by_tile[tile_dist(rng)].push_back(i);
    p.age = static_cast<AgeGroup>(age_dist(rng));
  }

  std::uniform_real_distribution<double> jitter(-0.5 * spec.tile_size_deg, 0.5 * spec.tile_size_deg);
  for (std::size_t t = 0; t < by_tile.size(); ++t) {
    const std::size_t first = pop.households.size();
    form_households(by_tile[t], pop.individuals, spec.households, rng, pop.households);
    for (std::size_t h = first; h < pop.households.size(); ++h) {
      const double lat = spec.tiles[t].lat + jitter(rng);
      const double lon = spec.tiles[t].lon + jitter(rng);
      for (PersonId id : pop.households[h]) {
        auto& p = pop.individuals[id];
        p.household = static_cast<HouseholdId>(h);
        p.lat = lat;
        p.lon = lon;
      }
    }
  }
  return pop;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadius = 6371000.0;
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double dlat = (lat2 - lat1) * kRad;
  const double dlon = (lon2 - lon1) * kRad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(s)));
}

void assign_sites(std::span<Individual> individuals, std::span<const Site> sites,
                  const PerCategory<int>& per_category_counts, std::uint64_t seed) {
  constexpr double kMinDistance = 10.0;
  PerCategory<std::vector<SiteId>> by_cat;
  for (std::size_t s = 0; s < sites.size(); ++s)
    by_cat[index_of(sites[s].category)].push_back(static_cast<SiteId>(s));
  for (std::size_t c = 0; c < kNumCategories; ++c)
    if (per_category_counts[c] < 0 || by_cat[c].size() < static_cast<std::size_t>(per_category_counts[c]))
      throw InputError("assign_sites: category '" + std::string(kCategoryNames[c]) + "' has " +
                       std::to_string(by_cat[c].size()) + " sites, " +
                       std::to_string(per_category_counts[c]) + " required per individual");

  Rng rng(seed);
  std::vector<double> w;
  for (auto& person : individuals) {
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      auto& chosen = person.sites[c];
      chosen.clear();
      const auto& cands = by_cat[c];
      w.resize(cands.size());
      for (std::size_t n = 0; n < cands.size(); ++n) {
        const auto& s = sites[cands[n]];
        const double d = std::max(kMinDistance, haversine_m(person.lat, person.lon, s.lat, s.lon));
        w[n] = 1.0 / (d * d);
      }
      // Successive sampling without replacement.
      for (int k = 0; k < per_category_counts[c]; ++k) {
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        double u = uniform01(rng) * total;
        std::size_t pick = 0;
        for (std::size_t n = 0; n < w.size(); ++n) {
          if (w[n] <= 0.0) continue;
          pick = n;
          if (u < w[n]) break;
          u -= w[n];
        }
        chosen.push_back(cands[pick]);
        w[pick] = 0.0;
      }
    }
  }
}

double per_site_rate(const Individual& person, const MobilityTable& mobility, SiteCategory c) {
  const auto n = person.sites[index_of(c)].size();
  if (n == 0) return 0.0;
  return mobility.visits_per_week[index_of(person.age)][index_of(c)] / static_cast<double>(n) /
         kHoursPerWeek;
}

Trace generate_trace(const Individual& person, const MobilityTable& mobility, double t_max,
                     std::uint64_t seed) {
  if (!(t_max > 0.0)) throw InputError("generate_trace: horizon must be positive");
  Rng rng(seed);
  Trace candidates;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    const double rate = per_site_rate(person, mobility, static_cast<SiteCategory>(c));
    if (!(rate > 0.0)) continue;
    const double mean_h = mobility.mean_duration_min[c] / 60.0;
    for (SiteId site : person.sites[c]) {
      for (double t = exponential(rng, rate); t < t_max; t += exponential(rng, rate))
        candidates.push_back({person.id, site, t, t + exponential(rng, 1.0 / mean_h)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Visit& x, const Visit& y) { return x.arrive < y.arrive; });
  Trace trace;
  for (const auto& v : candidates)
    if (trace.empty() || v.arrive >= trace.back().depart) trace.push_back(v);
  return trace;
}

std::size_t visit_at(const Trace& trace, double t) {
  const std::size_t n = first_departing_after(trace, t);
  if (n < trace.size() && trace[n].arrive <= t) return n;
  return static_cast<std::size_t>(-1);
}

std::size_t first_departing_after(const Trace& trace, double t) {
  // Departures are sorted because visits are disjoint and sorted by arrival.
  auto it = std::upper_bound(trace.begin(), trace.end(), t,
                             [](double x, const Visit& v) { return x < v.depart; });
  return static_cast<std::size_t>(it - trace.begin());
}

double presence_integral(const Trace& trace_j, SiteId site, double t, double gamma, double delta) {
  double total = 0.0;
  for (std::size_t n = first_departing_after(trace_j, t - delta);
       n < trace_j.size() && trace_j[n].arrive < t; ++n)
    if (trace_j[n].site == site) total += decayed_presence(trace_j[n].interval(), t, gamma, delta);
  return total;
}

std::vector<Site> downscale_sites(std::span<const Site> sites, std::uint32_t k, std::uint64_t seed) {
  std::vector<Site> out(sites.begin(), sites.end());
  if (k > 1) {
    Rng rng(seed);
    std::shuffle(out.begin(), out.end(), rng);
    out.resize((out.size() + k - 1) / k);
    std::sort(out.begin(), out.end(),
              [](const Site& a, const Site& b) { return a.id < b.id; });
  }
  for (std::size_t s = 0; s < out.size(); ++s) out[s].id = static_cast<SiteId>(s);
  return out;
}

void index_site_visits(World& world) {
  world.site_visits.assign(world.sites.size(), {});
  for (const auto& trace : world.traces)
    for (std::uint32_t n = 0; n < trace.size(); ++n) {
      const auto& v = trace[n];
      auto& sv = world.site_visits[v.site];
      sv.visits.push_back({v.arrive, v.depart, v.person, n});
      sv.max_duration = std::max(sv.max_duration, v.depart - v.arrive);
    }
  for (auto& sv : world.site_visits)
    std::sort(sv.visits.begin(), sv.visits.end(), [](const auto& a, const auto& b) {
      return a.arrive < b.arrive || (a.arrive == b.arrive && a.person < b.person);
    });
}

World build_world(const WorldSpec& spec, std::uint64_t seed) {
  World world;
  world.t_max = spec.t_max;
  world.sites = downscale_sites(spec.sites, spec.site_downscale,
                                derive_seed(seed, {static_cast<std::uint64_t>(Stream::Downscale)}));
  world.population =
      build_population(spec.population, derive_seed(seed, {static_cast<std::uint64_t>(Stream::Population)}));

  PerCategory<int> counts = spec.mobility.sites_per_category;
  PerCategory<int> available{};
  for (const auto& s : world.sites) ++available[index_of(s.category)];
  for (std::size_t c = 0; c < kNumCategories; ++c) counts[c] = std::min(counts[c], available[c]);
  auto& people = world.population.individuals;
  assign_sites(people, world.sites, counts, derive_seed(seed, {static_cast<std::uint64_t>(Stream::Sites)}));

  Rng compliance(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Compliance)}));
  Rng curfew(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Curfew)}));
  const std::uint32_t groups = std::max<std::uint32_t>(1, spec.curfew_groups);
  for (auto& p : people) {
    p.compliant = uniform01(compliance) < spec.compliance;
    p.curfew_group = static_cast<std::uint32_t>(uniform01(curfew) * groups);
  }

  world.traces.resize(people.size());
  for (const auto& p : people)
    world.traces[p.id] = generate_trace(
        p, spec.mobility, spec.t_max,
        derive_seed(seed, {static_cast<std::uint64_t>(Stream::Traces), p.id}));
  index_site_visits(world);
  return world;
}

std::optional<SiteCategory> parse_category(std::string_view name) {
  for (std::size_t c = 0; c < kNumCategories; ++c)
    if (kCategoryNames[c] == name) return static_cast<SiteCategory>(c);
  if (name == "transportation") return SiteCategory::Transport;
  if (name == "groceries" || name == "supermarket") return SiteCategory::Grocery;
  if (name == "office") return SiteCategory::Work;
  return std::nullopt;
}

std::optional<AgeGroup> parse_age_group(std::string_view name) {
  for (std::size_t a = 0; a < kNumAgeGroups; ++a)
    if (kAgeGroupNames[a] == name) return static_cast<AgeGroup>(a);
  return std::nullopt;
}

}  // namespace hotspot
