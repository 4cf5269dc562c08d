#include <doctest.h>

#include <vector>

#include "hotspot/interventions.hpp"

using namespace hotspot;

namespace {

Visit visit_at_hour(double t) { return {0, 0, t, t + 1.0}; }

}  // namespace

TEST_CASE("social distancing") {
  Individual p;
  const VisitCoins coins{5};
  SUBCASE("rho = 0 admits everything") {
    PolicySet ps({SocialDistancing{0.0, {0.0, kInf}}});
    for (std::uint32_t n = 0; n < 200; ++n) CHECK(ps.visit_admitted(p, n, visit_at_hour(n), coins));
  }
  SUBCASE("rho = 1 blocks inside the window only") {
    PolicySet ps({SocialDistancing{1.0, {100.0, 200.0}}});
    for (std::uint32_t n = 0; n < 300; ++n)
      CHECK(ps.visit_admitted(p, n, visit_at_hour(n), coins) == (n < 100 || n >= 200));
  }
  SUBCASE("rho = 0.3 skips about 30 % of visits, the same ones every time") {
    PolicySet ps({SocialDistancing{0.3, {0.0, kInf}}});
    int skipped = 0;
    for (std::uint32_t n = 0; n < 20000; ++n) {
      const bool a = ps.visit_admitted(p, n, visit_at_hour(n), coins);
      CHECK(a == ps.visit_admitted(p, n, visit_at_hour(n), coins));
      skipped += !a;
    }
    CHECK(skipped / 20000.0 == doctest::Approx(0.3).epsilon(0.05));
  }
}

TEST_CASE("alternating curfew admits one group per day") {
  PolicySet ps({AlternatingCurfew{3, {0.0, kInf}}});
  const int days = 31;
  for (std::uint32_t g = 0; g < 3; ++g) {
    Individual p;
    p.curfew_group = g;
    int admitted = 0;
    for (int d = 0; d < days; ++d) admitted += ps.visit_admitted(p, d, visit_at_hour(24.0 * d + 9.0), {});
    CHECK(std::abs(admitted - days / 3) <= 1);
  }
}

TEST_CASE("vulnerable-group distancing only affects the old") {
  PolicySet ps({VulnerableDistancing{1.0, 60, {0.0, kInf}}});
  Individual young, old;
  young.age = AgeGroup::A35_59;
  old.age = AgeGroup::A80p;
  CHECK(ps.visit_admitted(young, 0, visit_at_hour(5), {}));
  CHECK_FALSE(ps.visit_admitted(old, 0, visit_at_hour(5), {}));
}

TEST_CASE("effective beta") {
  const PerCategory<double> beta{0.5, 0.5, 0.5, 0.5, 0.5};
  Site edu{0, "e", SiteCategory::Education, 0, 0};
  CHECK(effective_beta(edu, 10.0, PolicySet{}, beta) == 0.5);
  PolicySet half({BetaMultiplier{{0.5, 1, 1, 1, 1}, {0.0, 100.0}}});
  CHECK(effective_beta(edu, 10.0, half, beta) == doctest::Approx(0.25));
  CHECK(effective_beta(edu, 150.0, half, beta) == 0.5);
  PolicySet closed({BetaMultiplier{{0.0, 1, 1, 1, 1}, {0.0, kInf}}});
  CHECK(effective_beta(edu, 10.0, closed, beta) == 0.0);
}

TEST_CASE("conditional lockdown trigger") {
  std::vector<double> week(7, 0.0);
  week[0] = 51;
  CHECK(lockdown_triggered(week, 100000, 50));
  week[0] = 50;
  CHECK_FALSE(lockdown_triggered(week, 100000, 50));
  std::vector<double> small(7, 0.0);
  small[3] = 6;
  CHECK(lockdown_triggered(small, 10000, 50));

  ConditionalLockdown l;
  l.distancing.push_back({1.0, {}});
  l.multipliers.push_back({{0.5, 0.5, 0.5, 0.5, 0.5}, {}});
  conditional_lockdown_tick(l, 24.0, small, 10000);
  CHECK(l.controller.active());
  PolicySet ps({l});
  Individual p;
  CHECK_FALSE(ps.visit_admitted(p, 0, visit_at_hour(30.0), {}));
  CHECK(ps.visit_admitted(p, 0, visit_at_hour(10.0), {}));
  CHECK(ps.beta_multiplier(SiteCategory::Work, 30.0) == 0.5);

  auto& lock = std::get<ConditionalLockdown>(ps.policies()[0]);
  conditional_lockdown_tick(lock, 48.0, std::vector<double>(7, 0.0), 10000);
  CHECK_FALSE(lock.controller.active());
  CHECK(ps.visit_admitted(p, 0, visit_at_hour(50.0), {}));
  REQUIRE(lock.controller.history().size() == 1);
  CHECK(lock.controller.history()[0].from == 24.0);
  CHECK(lock.controller.history()[0].to == 48.0);
}
