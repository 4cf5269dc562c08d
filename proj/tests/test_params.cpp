#include <doctest.h>

#include <algorithm>
#include <vector>

#include "hotspot/params.hpp"

using namespace hotspot;

TEST_CASE("lambda_max bound") {
  EpidemicParams p;
  p.beta.fill(0.0);
  CHECK(lambda_max(p) == 0.0);
  p.beta.fill(0.5);
  CHECK(lambda_max(p) == doctest::Approx(0.5 * 0.8 / 0.3465).epsilon(1e-4));
  CHECK(lambda_max(p) == doctest::Approx(1.1544).epsilon(1e-4));
  p.beta = {0.1, 0.9, 0.2, 0.3, 0.4};
  CHECK(p.beta_max() == 0.9);
}

TEST_CASE("process labels") {
  CHECK(parse_process("M") == Process::M);
  CHECK(parse_process("R") == Process::Rs);
  CHECK(parse_process("Ra") == Process::Ra);
  CHECK(parse_process("Z") == Process::Z);
  CHECK_THROWS_AS(parse_process("Q"), InputError);
}

TEST_CASE("log-normal delays in hours") {
  EpidemicParams p;
  Rng rng(derive_seed(3, {1}));
  SUBCASE("incubation mean") {
    double s = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) s += sample_transition_delay(Process::M, p, rng);
    const double want = std::exp(0.9470 + 0.6669 * 0.6669 / 2.0) * 24.0;
    CHECK(want / 24.0 == doctest::Approx(3.22).epsilon(0.01));
    CHECK(s / n == doctest::Approx(want).epsilon(0.02));
  }
  SUBCASE("presymptomatic median") {
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_transition_delay(Process::W, p, rng);
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    CHECK(v[v.size() / 2] / 24.0 == doctest::Approx(std::exp(0.7463)).epsilon(0.02));
  }
  SUBCASE("degenerate sdlog") {
    p.incubation.sdlog = 0.0;
    for (int k = 0; k < 10; ++k)
      CHECK(sample_transition_delay(Process::M, p, rng) == doctest::Approx(std::exp(0.9470) * 24.0));
  }
}

TEST_CASE("parameter validation") {
  EpidemicParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.alpha_a = 1.5;
  CHECK_THROWS_AS(p.validate(), InputError);
}
