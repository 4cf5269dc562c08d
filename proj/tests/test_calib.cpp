#include <doctest.h>

#include <random>

#include "hotspot/calib.hpp"
#include "hotspot/common.hpp"

using namespace hotspot;

namespace {

// Noisy 1-D, 2-output fixture on [0, 1] with a fixed GP.
struct Fixture {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  Eigen::VectorXd c;
  GpHyper h;
  Gp gp;
};

Fixture make_fixture() {
  Fixture f;
  f.X.resize(4, 1);
  f.X << 0.05, 0.3, 0.35, 0.9;
  f.Y.resize(4, 2);
  for (Eigen::Index i = 0; i < 4; ++i) {
    f.Y(i, 0) = std::sin(5.0 * f.X(i, 0));
    f.Y(i, 1) = 2.0 * f.X(i, 0);
  }
  f.c.resize(2);
  f.c << std::sin(3.5), 1.4;  // generated at x = 0.7
  f.h.lengthscales = Eigen::VectorXd::Constant(1, 0.2);
  f.h.signal_var = 1.0;
  f.h.noise_var = 1e-3;
  f.gp = Gp::condition(f.X, f.Y, f.h, false);
  return f;
}

Eigen::MatrixXd grid(int n) {
  Eigen::MatrixXd G(n, 1);
  for (int k = 0; k < n; ++k) G(k, 0) = (k + 0.5) / n;
  return G;
}

// KG by explicit re-conditioning on each fantasized observation.
double kg_oracle(const Fixture& f, double theta, const Eigen::MatrixXd& cand, const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd C(cand.rows() + 1, 1);
  C << cand, theta;
  const double now = expected_scores(f.gp, C, f.c).maxCoeff();
  Eigen::MatrixXd t(1, 1);
  t << theta;
  const Eigen::RowVectorXd mu = f.gp.mean(t).row(0);
  const double sd = std::sqrt(f.gp.latent_var(t)[0] + f.h.noise_var);
  Eigen::MatrixXd X2(f.X.rows() + 1, 1);
  X2 << f.X, theta;
  double total = 0.0;
  for (Eigen::Index k = 0; k < Z.rows(); ++k) {
    Eigen::MatrixXd Y2(f.Y.rows() + 1, f.Y.cols());
    Y2 << f.Y, mu + sd * Z.row(k);
    const Gp g2 = Gp::condition(X2, Y2, f.h, false);
    total += expected_scores(g2, C, f.c).maxCoeff() - now;
  }
  return total / static_cast<double>(Z.rows());
}

}  // namespace

TEST_CASE("score") {
  const std::vector<double> c{1, 2, 3}, zero{0, 0, 0};
  CHECK(score(c, c) == 0.0);
  CHECK(score(zero, c) == -14.0);
  const std::vector<double> swapped{2, 1, 3};
  CHECK(score(swapped, c) == -2.0);
  CHECK(score(std::vector<double>{3, 2, 1}, std::vector<double>{3, 2, 1}) == 0.0);
  CHECK_THROWS_AS(score(std::vector<double>{1}, c), InputError);
}

TEST_CASE("expected score") {
  const std::vector<double> c{1, 2, 3}, zero{0, 0, 0}, ones{1, 1, 1};
  CHECK(expected_score(c, zero, c) == 0.0);
  CHECK(expected_score(c, ones, c) == -3.0);

  const std::vector<double> mu{0.5, 2.5, 2.0}, var{0.3, 1.2, 0.05};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  double mc = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    std::vector<double> g(3);
    for (int t = 0; t < 3; ++t) g[t] = mu[t] + std::sqrt(var[t]) * z(rng);
    mc += score(g, c);
  }
  CHECK(mc / n == doctest::Approx(expected_score(mu, var, c)).epsilon(0.005));
}

TEST_CASE("knowledge gradient matches explicit re-conditioning") {
  const auto f = make_fixture();
  const auto cand = grid(20);
  const auto Z = fantasy_draws(32, 2, 9);
  for (double theta : {0.1, 0.5, 0.62, 0.8, 0.97}) {
    Eigen::VectorXd th(1);
    th << theta;
    const auto kg = knowledge_gradient(th, f.gp, f.c, cand, Z);
    CHECK(kg.value == doctest::Approx(kg_oracle(f, theta, cand, Z)).epsilon(1e-6));
  }
}

TEST_CASE("knowledge gradient is nonnegative up to Monte-Carlo error") {
  const auto f = make_fixture();
  const auto cand = grid(20);
  const auto Z = fantasy_draws(64, 2, 3);
  for (int k = 0; k <= 100; ++k) {
    Eigen::VectorXd th(1);
    th << k / 100.0;
    const auto kg = knowledge_gradient(th, f.gp, f.c, cand, Z);
    CHECK(kg.value >= -3.0 * kg.std_error - 1e-12);
  }
}

TEST_CASE("re-measuring a noise-free point has no value") {
  auto f = make_fixture();
  f.h.noise_var = 1e-10;
  f.gp = Gp::condition(f.X, f.Y, f.h, false);
  Eigen::VectorXd th(1);
  th << 0.3;
  const auto kg = knowledge_gradient(th, f.gp, f.c, grid(20), fantasy_draws(64, 2, 5));
  CHECK(std::abs(kg.value) < 1e-4);
}

TEST_CASE("knowledge gradient argmax agrees with a dense oracle") {
  const auto f = make_fixture();
  const auto cand = grid(20);
  const auto Z = fantasy_draws(64, 2, 11);
  const auto dense = fantasy_draws(4000, 2, 12);
  std::vector<double> oracle(20);
  double best_oracle = -kInf, ours_best = -kInf;
  int ours = 0;
  for (int k = 0; k < 20; ++k) {
    const double theta = cand(k, 0);
    oracle[k] = kg_oracle(f, theta, cand, dense);
    best_oracle = std::max(best_oracle, oracle[k]);
    Eigen::VectorXd th(1);
    th << theta;
    const double v = knowledge_gradient(th, f.gp, f.c, cand, Z).value;
    if (v > ours_best) {
      ours_best = v;
      ours = k;
    }
  }
  CHECK(oracle[ours] >= 0.8 * best_oracle);
}

TEST_CASE("calibration loop") {
  const std::vector<double> c_true{0.3 + 0.6, 0.3 * 0.6 * 2.0, 1.0};
  const BlackBox g = [](const std::vector<double>& th, std::size_t) {
    return std::vector<double>{th[0] + th[1], 2.0 * th[0] * th[1], 1.0};
  };
  const Box domain{{0.0, 0.0}, {1.0, 1.0}};

  SUBCASE("N = M is best-of-M") {
    CalibOptions o;
    o.steps = 8;
    o.init = 8;
    const auto r = calibrate(g, c_true, domain, o);
    REQUIRE(r.evaluations.size() == 8);
    double best = -kInf;
    for (const auto& e : r.evaluations) best = std::max(best, e.score);
    CHECK(r.best_score == best);
    const auto pts = sobol_points(8, domain);
    for (std::size_t n = 0; n < 8; ++n) CHECK(r.evaluations[n].theta == pts[n]);
  }
  SUBCASE("acquisition improves on the initial design") {
    CalibOptions o;
    o.steps = 20;
    o.init = 6;
    o.seed = 3;
    std::size_t seen = 0;
    o.on_evaluation = [&](const Evaluation&, std::size_t index) { CHECK(index == seen++); };
    const auto r = calibrate(g, c_true, domain, o);
    CHECK(seen == 20);
    double best_init = -kInf;
    for (std::size_t n = 0; n < 6; ++n) best_init = std::max(best_init, r.evaluations[n].score);
    CHECK(r.best_score >= best_init);
    CHECK(r.best_score > -0.01);
    for (double v : r.theta_star) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  SUBCASE("invalid budgets") {
    CalibOptions o;
    o.steps = 2;
    o.init = 3;
    CHECK_THROWS_AS(calibrate(g, c_true, domain, o), InputError);
  }
}
