#include <doctest.h>

#include <random>

#include "hotspot/common.hpp"
#include "hotspot/sobol.hpp"

using namespace hotspot;

namespace {

// Warnock's closed form of the L2 star discrepancy.
double l2_star_discrepancy(const std::vector<std::vector<double>>& pts) {
  const auto d = static_cast<double>(pts.front().size());
  const auto n = static_cast<double>(pts.size());
  double s1 = 0.0;
  for (const auto& x : pts) {
    double prod = 1.0;
    for (double v : x) prod *= 1.0 - v * v;
    s1 += prod;
  }
  double s2 = 0.0;
  for (const auto& x : pts)
    for (const auto& y : pts) {
      double prod = 1.0;
      for (std::size_t k = 0; k < x.size(); ++k) prod *= 1.0 - std::max(x[k], y[k]);
      s2 += prod;
    }
  return std::sqrt(std::pow(3.0, -d) - std::pow(2.0, 1.0 - d) / n * s1 + s2 / (n * n));
}

}  // namespace

TEST_CASE("first point is the cube centre") {
  const auto pts = sobol_points(1, Box{{0, 0, 0}, {1, 1, 1}});
  REQUIRE(pts.size() == 1);
  for (double v : pts[0]) CHECK(v == 0.5);
}

TEST_CASE("leading points of the 2-D sequence") {
  Sobol s(2);
  const std::vector<std::vector<double>> want{{0.5, 0.5}, {0.75, 0.25}, {0.25, 0.75}, {0.375, 0.375}, {0.875, 0.875}};
  for (const auto& w : want) CHECK(s.next() == w);
}

TEST_CASE("skip matches repeated next") {
  Sobol a(5), b(5);
  for (int n = 0; n < 37; ++n) a.next();
  b.skip(37);
  CHECK(a.next() == b.next());
}

TEST_CASE("points stay inside the domain") {
  const Box box{{-1.0, 0.5, 10.0}, {2.0, 0.75, 20.0}};
  for (const auto& p : sobol_points(500, box))
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(p[k] >= box.lo[k]);
      CHECK(p[k] <= box.hi[k]);
    }
}

TEST_CASE("box scaling round-trips and validates") {
  const Box box{{0.0, 1.0}, {2.0, 3.0}};
  const auto x = box.scale({0.25, 0.5});
  CHECK(x == std::vector<double>{0.5, 2.0});
  CHECK(box.unscale(x) == std::vector<double>{0.25, 0.5});
  CHECK_THROWS_AS((Box{{1.0}, {0.0}}.validate()), InputError);
  CHECK_THROWS_AS(Sobol(0), InputError);
  CHECK_THROWS_AS(Sobol(Sobol::kMaxDim + 1), InputError);
}

TEST_CASE("lower discrepancy than uniform random points") {
  const auto sob = sobol_points(256, Box{{0, 0, 0}, {1, 1, 1}});
  const double d_sobol = l2_star_discrepancy(sob);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rnd(256, std::vector<double>(3));
    for (auto& p : rnd)
      for (auto& v : p) v = u(rng);
    CHECK(d_sobol < l2_star_discrepancy(rnd));
  }
}
