#include <doctest.h>

#include "hotspot/gp.hpp"

using namespace hotspot;

TEST_CASE("two-point posterior matches the closed form") {
  Eigen::MatrixXd X(2, 1);
  X << 0.2, 0.7;
  Eigen::MatrixXd Y(2, 1);
  Y << 1.5, -0.5;
  GpHyper h;
  h.lengthscales = Eigen::VectorXd::Constant(1, 0.4);
  h.signal_var = 2.0;
  h.noise_var = 0.1;
  const Gp gp = Gp::condition(X, Y, h, false);

  const double x = 0.45;
  auto k = [&](double a, double b) { return 2.0 * std::exp(-0.5 * (a - b) * (a - b) / 0.16); };
  const double k11 = k(0.2, 0.2) + 0.1, k22 = k(0.7, 0.7) + 0.1, k12 = k(0.2, 0.7);
  const double det = k11 * k22 - k12 * k12;
  // Inverse of the 2x2 Gram matrix.
  const double i11 = k22 / det, i22 = k11 / det, i12 = -k12 / det;
  const double a = k(x, 0.2), b = k(x, 0.7);
  const double mean = a * (i11 * 1.5 + i12 * -0.5) + b * (i12 * 1.5 + i22 * -0.5);
  const double var = 2.0 - (a * a * i11 + 2 * a * b * i12 + b * b * i22);

  Eigen::MatrixXd Xs(1, 1);
  Xs << x;
  CHECK(std::abs(gp.mean(Xs)(0, 0) - mean) < 1e-9);
  CHECK(std::abs(gp.latent_var(Xs)[0] - var) < 1e-9);
  Eigen::VectorXd p(1);
  p << 0.3;
  const double cov = k(x, 0.3) - (a * (i11 * k(0.3, 0.2) + i12 * k(0.3, 0.7)) + b * (i12 * k(0.3, 0.2) + i22 * k(0.3, 0.7)));
  CHECK(std::abs(gp.latent_cov(Xs, p)[0] - cov) < 1e-9);
}

TEST_CASE("constant outputs give a constant posterior mean") {
  Eigen::MatrixXd X(5, 2);
  X << 0.1, 0.2, 0.4, 0.9, 0.5, 0.5, 0.8, 0.1, 0.3, 0.6;
  const Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(5, 3, 7.25);
  const Gp gp = Gp::fit(X, Y);
  Eigen::MatrixXd Xs(3, 2);
  Xs << 0.0, 0.0, 0.5, 0.25, 1.0, 1.0;
  const auto m = gp.mean(Xs);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index t = 0; t < m.cols(); ++t) CHECK(m(i, t) == doctest::Approx(7.25).epsilon(1e-9));
}

TEST_CASE("posterior variance at training inputs is below the noise") {
  Eigen::MatrixXd X(6, 1);
  X << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
  Eigen::MatrixXd Y(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i) {
    Y(i, 0) = std::sin(6.0 * X(i, 0));
    Y(i, 1) = X(i, 0) * X(i, 0);
  }
  const Gp gp = Gp::fit(X, Y);
  const auto var = gp.latent_var(X);
  for (Eigen::Index i = 0; i < var.size(); ++i) CHECK(var[i] <= gp.hyper().noise_var + 1e-12);
  // The fit interpolates smooth data closely.
  Eigen::MatrixXd Xs(1, 1);
  Xs << 0.5;
  CHECK(gp.mean(Xs)(0, 0) == doctest::Approx(std::sin(3.0)).epsilon(0.05));
}

TEST_CASE("singular Gram matrices are reported") {
  Eigen::MatrixXd X(2, 1);
  X << 0.5, 0.5;
  Eigen::MatrixXd Y(2, 1);
  Y << 1.0, 2.0;
  GpHyper h;
  h.lengthscales = Eigen::VectorXd::Constant(1, 0.3);
  h.noise_var = 0.0;
  CHECK_THROWS_AS(Gp::condition(X, Y, h, false), GpError);
  Eigen::MatrixXd one(1, 1);
  one << 0.1;
  CHECK_THROWS_AS(Gp::fit(one, Eigen::MatrixXd::Ones(1, 1)), GpError);
}
