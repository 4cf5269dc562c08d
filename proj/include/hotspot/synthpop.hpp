#pragma once

// Synthetic world: population placed on tiles, households, per-individual
// site sets and a-priori check-in traces over the simulation horizon.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hotspot/common.hpp"

namespace hotspot {

struct Tile {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  double population = 0.0;
};

struct Site {
  SiteId id = 0;           // dense index into the world's site vector
  std::string external_id; // id as given in sites.csv
  SiteCategory category = SiteCategory::Social;
  double lat = 0.0;
  double lon = 0.0;
};

struct Individual {
  PersonId id = 0;
  AgeGroup age = AgeGroup::A15_34;
  HouseholdId household = 0;
  double lat = 0.0;
  double lon = 0.0;
  PerCategory<std::vector<SiteId>> sites{};
  std::uint32_t curfew_group = 0;
  bool compliant = true;
};

struct Visit {
  PersonId person = kNoPerson;
  SiteId site = kNoSite;
  double arrive = 0.0;  // hours from simulation start
  double depart = 0.0;

  [[nodiscard]] Interval interval() const { return {arrive, depart}; }
};

/// Time-sorted, pairwise disjoint visits of one individual.
using Trace = std::vector<Visit>;

/// Household composition: distribution over sizes 1..N and, per size, the
/// relative weight of each age band among members (zero = inadmissible).
struct HouseholdTable {
  std::vector<double> size_fractions;
  std::vector<PerAge<double>> member_weights;
};

struct MobilityTable {
  PerAge<PerCategory<double>> visits_per_week{};
  PerCategory<double> mean_duration_min{};
  PerCategory<int> sites_per_category{};
};

/// Weekly visit rates by age band and category; dashes are zero.
MobilityTable default_mobility();
PerAge<double> default_age_fractions();
HouseholdTable default_household_table();

struct Population {
  std::vector<Individual> individuals;
  std::vector<std::vector<PersonId>> households;
};

struct PopulationSpec {
  std::vector<Tile> tiles;
  PerAge<double> age_fractions{};
  HouseholdTable households;
  std::uint64_t total = 0;
  std::uint32_t downscale = 1;
  double tile_size_deg = 0.01;
};

Population build_population(const PopulationSpec& spec, std::uint64_t seed);

/// Great-circle distance in meters.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

/// Samples per-category site sets without replacement, weights 1/d^2 with d
/// clamped below at 10 m.
void assign_sites(std::span<Individual> individuals, std::span<const Site> sites,
                  const PerCategory<int>& per_category_counts, std::uint64_t seed);

Trace generate_trace(const Individual& person, const MobilityTable& mobility, double t_max,
                     std::uint64_t seed);

/// Per-site visit rate (1/h) of an individual for a category.
double per_site_rate(const Individual& person, const MobilityTable& mobility, SiteCategory c);

/// Index of the visit covering t (arrive <= t < depart), or npos.
std::size_t visit_at(const Trace& trace, double t);
/// First visit index with depart > t.
std::size_t first_departing_after(const Trace& trace, double t);

/// Sum over visits of j to `site` of the decayed presence within [t - delta, t].
double presence_integral(const Trace& trace_j, SiteId site, double t, double gamma, double delta);

/// Visits to one site sorted by arrival, with the longest duration for range queries.
struct SiteVisits {
  struct Ref {
    double arrive;
    double depart;
    PersonId person;
    std::uint32_t visit;  // index into the person's trace
  };
  std::vector<Ref> visits;
  double max_duration = 0.0;
};

struct World {
  std::vector<Site> sites;
  Population population;
  std::vector<Trace> traces;
  std::vector<SiteVisits> site_visits;
  double t_max = 0.0;

  [[nodiscard]] std::size_t size() const { return population.individuals.size(); }
  [[nodiscard]] const Individual& person(PersonId i) const { return population.individuals[i]; }
};

struct WorldSpec {
  PopulationSpec population;
  std::vector<Site> sites;
  MobilityTable mobility;
  double t_max = 0.0;
  std::uint32_t site_downscale = 1;
  double compliance = 1.0;
  std::uint32_t curfew_groups = 1;
};

/// Keeps ceil(|sites| / k) sites chosen uniformly at random, re-indexed densely.
std::vector<Site> downscale_sites(std::span<const Site> sites, std::uint32_t k, std::uint64_t seed);

/// Builds population, site sets and traces; every stream derives from `seed`.
World build_world(const WorldSpec& spec, std::uint64_t seed);

/// Rebuilds the per-site visit index from traces.
void index_site_visits(World& world);

}  // namespace hotspot
