#pragma once

// Bayesian-optimization calibration of a vector-valued simulator output
// against an observed daily series, with a knowledge-gradient acquisition.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hotspot/gp.hpp"
#include "hotspot/sobol.hpp"

namespace hotspot {

/// -sum_t (c_t - g_t)^2. Throws InputError on length mismatch.
double score(std::span<const double> g_hat, std::span<const double> c_true);

/// -sum_t [(c_t - mu_t)^2 + var_t], the expected score of a Gaussian output.
double expected_score(std::span<const double> mu, std::span<const double> var,
                      std::span<const double> c_true);

/// Expected score at each row of Xs under the GP posterior (original units).
Eigen::VectorXd expected_scores(const Gp& gp, const Eigen::MatrixXd& Xs,
                                const Eigen::VectorXd& c_true);

struct KgEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Standard-normal fantasy draws, one row per fantasy and one column per output.
Eigen::MatrixXd fantasy_draws(std::size_t n_fantasies, Eigen::Index outputs, std::uint64_t seed);

/// Discrete knowledge gradient of evaluating at theta (unit box): expected
/// increase of the best expected score over candidates after conditioning on
/// one fantasized observation per row of Z. theta joins the candidate set.
KgEstimate knowledge_gradient(const Eigen::VectorXd& theta, const Gp& gp,
                              const Eigen::VectorXd& c_true, const Eigen::MatrixXd& candidates,
                              const Eigen::MatrixXd& Z);

struct Evaluation {
  std::vector<double> theta;
  std::vector<double> g_hat;
  double score = 0.0;
};

/// Black-box evaluation: theta in domain units and the evaluation index.
using BlackBox = std::function<std::vector<double>(const std::vector<double>& theta, std::size_t index)>;

struct CalibOptions {
  std::size_t steps = 40;        // N, total evaluations
  std::size_t init = 20;         // M, quasi-random evaluations
  std::size_t fantasies = 16;
  std::size_t candidates = 128;
  std::uint64_t seed = 0;
  std::function<void(const Evaluation&, std::size_t)> on_evaluation;
};

struct CalibResult {
  std::vector<double> theta_star;
  double best_score = 0.0;
  std::vector<Evaluation> evaluations;
};

CalibResult calibrate(const BlackBox& g, const std::vector<double>& c_true, const Box& domain,
                      const CalibOptions& options);

}  // namespace hotspot
