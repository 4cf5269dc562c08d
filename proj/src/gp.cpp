#include "hotspot/gp.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace hotspot {

namespace {

constexpr double kLogEllMin = -4.6;  // ~0.01 of the unit box
constexpr double kLogEllMax = 2.3;   // ~10
constexpr double kLogSignalMin = -6.9;
constexpr double kLogSignalMax = 4.6;
constexpr double kLogNoiseMax = 0.0;

Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const GpHyper& h) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  const Eigen::ArrayXd inv_ell = h.lengthscales.array().inverse();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      const double r2 = ((A.row(i) - B.row(j)).transpose().array() * inv_ell).square().sum();
      K(i, j) = h.signal_var * std::exp(-0.5 * r2);
    }
  return K;
}

struct LikelihoodProblem {
  const Eigen::MatrixXd* X;
  const Eigen::MatrixXd* Ys;
  double noise_floor;
};

GpHyper unpack(const gsl_vector* v, std::size_t d, double noise_floor) {
  GpHyper h;
  h.lengthscales.resize(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k)
    h.lengthscales[static_cast<Eigen::Index>(k)] =
        std::exp(std::clamp(gsl_vector_get(v, k), kLogEllMin, kLogEllMax));
  h.signal_var = std::exp(std::clamp(gsl_vector_get(v, d), kLogSignalMin, kLogSignalMax));
  h.noise_var =
      std::exp(std::clamp(gsl_vector_get(v, d + 1), std::log(noise_floor), kLogNoiseMax));
  return h;
}

double negative_log_marginal(const gsl_vector* v, void* params) {
  const auto* p = static_cast<const LikelihoodProblem*>(params);
  const auto d = static_cast<std::size_t>(p->X->cols());
  // Quadratic penalty keeps the simplex near the box it is clamped to.
  double penalty = 0.0;
  auto excess = [&](double x, double lo, double hi) {
    if (x < lo) penalty += (lo - x) * (lo - x);
    if (x > hi) penalty += (x - hi) * (x - hi);
  };
  for (std::size_t k = 0; k < d; ++k) excess(gsl_vector_get(v, k), kLogEllMin, kLogEllMax);
  excess(gsl_vector_get(v, d), kLogSignalMin, kLogSignalMax);
  excess(gsl_vector_get(v, d + 1), std::log(p->noise_floor), kLogNoiseMax);
  const double lml = Gp::log_marginal(*p->X, *p->Ys, unpack(v, d, p->noise_floor));
  if (!std::isfinite(lml)) return std::numeric_limits<double>::max() / 4;
  return -lml + penalty;
}

}  // namespace

double Gp::log_marginal(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Ys, const GpHyper& hyper) {
  const auto n = X.rows();
  Eigen::MatrixXd K = gram(X, X, hyper);
  K.diagonal().array() += hyper.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd alpha = llt.solve(Ys);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const auto T = static_cast<double>(Ys.cols());
  return -0.5 * (Ys.array() * alpha.array()).sum() - 0.5 * T * log_det -
         0.5 * T * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Gp Gp::condition(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const GpHyper& hyper,
                 bool standardize) {
  if (X.rows() != Y.rows() || X.rows() < 1) throw GpError("GP data must have matching, nonzero rows");
  if (hyper.lengthscales.size() != X.cols()) throw GpError("GP lengthscale count must match inputs");
  if (!(hyper.signal_var > 0.0) || !(hyper.noise_var >= 0.0) || !(hyper.lengthscales.array() > 0.0).all())
    throw GpError("GP hyperparameters must be positive");
  Gp gp;
  gp.X_ = X;
  gp.hyper_ = hyper;
  const auto T = Y.cols();
  gp.y_mean_ = Eigen::VectorXd::Zero(T);
  gp.y_scale_ = Eigen::VectorXd::Ones(T);
  if (standardize) {
    gp.y_mean_ = Y.colwise().mean().transpose();
    for (Eigen::Index t = 0; t < T; ++t) {
      const double sd = std::sqrt((Y.col(t).array() - gp.y_mean_[t]).square().mean());
      gp.y_scale_[t] = sd > 1e-9 ? sd : 1.0;
    }
  }
  const Eigen::MatrixXd Ys =
      (Y.rowwise() - gp.y_mean_.transpose()).array().rowwise() / gp.y_scale_.transpose().array();
  Eigen::MatrixXd K = gram(X, X, hyper);
  K.diagonal().array() += hyper.noise_var;
  gp.llt_.compute(K);
  if (gp.llt_.info() != Eigen::Success)
    throw GpError("GP Gram matrix is not positive definite (duplicate inputs without noise?)");
  const Eigen::MatrixXd L = gp.llt_.matrixL();
  if (L.diagonal().minCoeff() <= 1e-12 * std::sqrt(K.diagonal().maxCoeff()))
    throw GpError("GP Gram matrix is ill-conditioned");
  gp.alpha_ = gp.llt_.solve(Ys);
  return gp;
}

Gp Gp::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const GpFitOptions& opt) {
  if (X.rows() < 2) throw GpError("GP fitting needs at least two points");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(Y.cols());
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(Y.cols());
  if (opt.standardize) {
    mean = Y.colwise().mean().transpose();
    for (Eigen::Index t = 0; t < Y.cols(); ++t) {
      const double sd = std::sqrt((Y.col(t).array() - mean[t]).square().mean());
      scale[t] = sd > 1e-9 ? sd : 1.0;
    }
  }
  const Eigen::MatrixXd Ys = (Y.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();

  const auto d = static_cast<std::size_t>(X.cols());
  LikelihoodProblem problem{&X, &Ys, opt.noise_floor};
  gsl_multimin_function fn{&negative_log_marginal, d + 2, &problem};
  gsl_set_error_handler_off();

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  GpHyper best_hyper;
  gsl_vector* x = gsl_vector_alloc(d + 2);
  gsl_vector* step = gsl_vector_alloc(d + 2);
  gsl_vector_set_all(step, 0.5);
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d + 2);
  for (int start = 0; start <= std::max(0, opt.restarts); ++start) {
    for (std::size_t k = 0; k < d; ++k)
      gsl_vector_set(x, k, start == 0 ? std::log(0.3) : std::log(0.05) + u01(rng) * std::log(40.0));
    gsl_vector_set(x, d, start == 0 ? 0.0 : -1.0 + 2.0 * u01(rng));
    gsl_vector_set(x, d + 1, start == 0 ? std::log(1e-2) : std::log(1e-5) + u01(rng) * std::log(1e4));
    gsl_multimin_fminimizer_set(solver, &fn, x, step);
    for (int iter = 0; iter < 400; ++iter) {
      if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-4) == GSL_SUCCESS) break;
    }
    if (solver->fval < best) {
      best = solver->fval;
      best_hyper = unpack(gsl_multimin_fminimizer_x(solver), d, opt.noise_floor);
    }
  }
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);
  if (!std::isfinite(best)) throw GpError("GP marginal likelihood could not be evaluated");
  return condition(X, Y, best_hyper, opt.standardize);
}

double Gp::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double r2 = ((a - b).array() / hyper_.lengthscales.array()).square().sum();
  return hyper_.signal_var * std::exp(-0.5 * r2);
}

Eigen::MatrixXd Gp::cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const {
  return gram(A, B, hyper_);
}

Eigen::MatrixXd Gp::mean(const Eigen::MatrixXd& Xs) const {
  const Eigen::MatrixXd standardized = cross(Xs, X_) * alpha_;
  return (standardized.array().rowwise() * y_scale_.transpose().array()).rowwise() +
         y_mean_.transpose().array();
}

Eigen::VectorXd Gp::latent_var(const Eigen::MatrixXd& Xs) const {
  const Eigen::MatrixXd V = llt_.matrixL().solve(cross(X_, Xs));
  const Eigen::VectorXd var = hyper_.signal_var - V.colwise().squaredNorm().transpose().array();
  return var.cwiseMax(0.0);
}

Eigen::VectorXd Gp::latent_cov(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) const {
  const Eigen::MatrixXd B = b.transpose();
  const Eigen::MatrixXd Va = llt_.matrixL().solve(cross(X_, A));
  const Eigen::VectorXd vb = llt_.matrixL().solve(cross(X_, B));
  return cross(A, B).col(0) - Va.transpose() * vb;
}

}  // namespace hotspot
