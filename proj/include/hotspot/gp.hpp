#pragma once

// Gaussian-process surrogate for a vector-valued black box: independent
// outputs sharing one squared-exponential kernel over unit-box inputs.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace hotspot {

class GpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel hyperparameters, in standardized output units.
struct GpHyper {
  Eigen::VectorXd lengthscales;
  double signal_var = 1.0;
  double noise_var = 1e-2;
};

struct GpFitOptions {
  bool standardize = true;
  int restarts = 4;
  double noise_floor = 1e-6;
  std::uint64_t seed = 0;
};

class Gp {
 public:
  /// Fits hyperparameters by multi-start Nelder-Mead on the log marginal likelihood.
  /// X is n x d (rows in the unit box), Y is n x T.
  static Gp fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const GpFitOptions& opt = {});
  /// Conditions on fixed hyperparameters. Throws GpError if the Gram matrix is singular.
  static Gp condition(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const GpHyper& hyper,
                      bool standardize = true);

  [[nodiscard]] const GpHyper& hyper() const { return hyper_; }
  [[nodiscard]] Eigen::Index outputs() const { return y_mean_.size(); }
  [[nodiscard]] Eigen::Index size() const { return X_.rows(); }
  [[nodiscard]] const Eigen::MatrixXd& inputs() const { return X_; }
  /// Per-output standardization scale s_t (original = mean + s_t * standardized).
  [[nodiscard]] const Eigen::VectorXd& scale() const { return y_scale_; }

  [[nodiscard]] double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Posterior means (m x T, original units) at the rows of Xs.
  [[nodiscard]] Eigen::MatrixXd mean(const Eigen::MatrixXd& Xs) const;
  /// Posterior latent variance in standardized units (shared by all outputs), length m.
  [[nodiscard]] Eigen::VectorXd latent_var(const Eigen::MatrixXd& Xs) const;
  /// Posterior latent covariance between rows of A and a single point b, standardized units.
  [[nodiscard]] Eigen::VectorXd latent_cov(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) const;

  /// Log marginal likelihood of the standardized data under the given hyperparameters.
  [[nodiscard]] static double log_marginal(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Ys,
                                           const GpHyper& hyper);

 private:
  Eigen::MatrixXd cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_mean_;
  Eigen::VectorXd y_scale_;
  GpHyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd alpha_;  // K^{-1} Y_standardized
};

}  // namespace hotspot
