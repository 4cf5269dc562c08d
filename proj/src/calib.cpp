#include "hotspot/calib.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hotspot/common.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

double score(std::span<const double> g_hat, std::span<const double> c_true) {
  if (g_hat.size() != c_true.size()) throw InputError("score: series lengths differ");
  double s = 0.0;
  for (std::size_t t = 0; t < g_hat.size(); ++t) s -= (c_true[t] - g_hat[t]) * (c_true[t] - g_hat[t]);
  return s;
}

double expected_score(std::span<const double> mu, std::span<const double> var,
                      std::span<const double> c_true) {
  if (mu.size() != c_true.size() || var.size() != c_true.size())
    throw InputError("expected_score: series lengths differ");
  double s = 0.0;
  for (std::size_t t = 0; t < mu.size(); ++t) s -= (c_true[t] - mu[t]) * (c_true[t] - mu[t]) + var[t];
  return s;
}

Eigen::VectorXd expected_scores(const Gp& gp, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& c_true) {
  const Eigen::MatrixXd mu = gp.mean(Xs);
  const Eigen::VectorXd var = gp.latent_var(Xs);
  const double s2 = gp.scale().squaredNorm();
  return -((mu.rowwise() - c_true.transpose()).rowwise().squaredNorm() + s2 * var);
}

Eigen::MatrixXd fantasy_draws(std::size_t n_fantasies, Eigen::Index outputs, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(n_fantasies), outputs);
  for (Eigen::Index f = 0; f < Z.rows(); ++f)
    for (Eigen::Index t = 0; t < Z.cols(); ++t) Z(f, t) = normal(rng);
  return Z;
}

namespace {

// KG from posterior quantities over a candidate set that already contains theta.
//   residual: m x T, c_t - mu_t(candidate)
//   var: m latent variances, cov: m latent covariances with theta
KgEstimate kg_from_posterior(const Eigen::MatrixXd& residual, const Eigen::VectorXd& var,
                             const Eigen::VectorXd& cov, double var_theta, double noise,
                             const Eigen::VectorXd& scale, const Eigen::MatrixXd& Z) {
  const double s2 = scale.squaredNorm();
  const Eigen::VectorXd base = -(residual.rowwise().squaredNorm() + s2 * var);
  const double best_now = base.maxCoeff();
  const double denom = var_theta + noise;
  if (!(denom > 0.0)) return {};
  const Eigen::VectorXd a = cov / std::sqrt(denom);

  // The updated mean shifts by s_t a_c z_t, so the squared residual becomes
  // |r_c|^2 - 2 a_c (r_c . s z) + a_c^2 |s z|^2 and the variance drops by a_c^2.
  const Eigen::MatrixXd SZ = Z.array().rowwise() * scale.transpose().array();  // F x T
  const Eigen::MatrixXd cross = residual * SZ.transpose();                     // m x F
  const Eigen::VectorXd sz2 = SZ.rowwise().squaredNorm();                      // F
  const auto F = Z.rows();
  Eigen::VectorXd gain(F);
  for (Eigen::Index f = 0; f < F; ++f) {
    const Eigen::VectorXd updated =
        base.array() + 2.0 * a.array() * cross.col(f).array() - a.array().square() * sz2[f] +
        s2 * a.array().square();
    gain[f] = updated.maxCoeff() - best_now;
  }
  const double mean = gain.mean();
  const double sd = F > 1 ? std::sqrt((gain.array() - mean).square().sum() / static_cast<double>(F - 1)) : 0.0;
  return {mean, sd / std::sqrt(static_cast<double>(F))};
}

}  // namespace

KgEstimate knowledge_gradient(const Eigen::VectorXd& theta, const Gp& gp,
                              const Eigen::VectorXd& c_true, const Eigen::MatrixXd& candidates,
                              const Eigen::MatrixXd& Z) {
  if (candidates.rows() == 0) throw InputError("knowledge_gradient: empty candidate set");
  if (Z.rows() == 0) throw InputError("knowledge_gradient: need at least one fantasy");
  Eigen::MatrixXd C(candidates.rows() + 1, candidates.cols());
  C << candidates, theta.transpose();
  const Eigen::MatrixXd residual = (-gp.mean(C)).rowwise() + c_true.transpose();
  const Eigen::VectorXd var = gp.latent_var(C);
  const Eigen::VectorXd cov = gp.latent_cov(C, theta);
  return kg_from_posterior(residual, var, cov, var[var.size() - 1], gp.hyper().noise_var,
                           gp.scale(), Z);
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return M;
}

}  // namespace

CalibResult calibrate(const BlackBox& g, const std::vector<double>& c_true, const Box& domain,
                      const CalibOptions& options) {
  domain.validate();
  if (options.init < 1) throw InputError("calibrate: need at least one initial point");
  if (options.steps < options.init) throw InputError("calibrate: steps must be >= init");
  if (c_true.empty()) throw InputError("calibrate: empty target series");

  CalibResult result;
  auto evaluate = [&](const std::vector<double>& theta) {
    Evaluation e;
    e.theta = theta;
    e.g_hat = g(theta, result.evaluations.size());
    e.score = score(e.g_hat, c_true);
    if (options.on_evaluation) options.on_evaluation(e, result.evaluations.size());
    result.evaluations.push_back(std::move(e));
  };

  Sobol sobol(domain.dim());
  for (std::size_t n = 0; n < options.init; ++n) evaluate(domain.scale(sobol.next()));

  // Candidate grid continues the same sequence past the initial design.
  std::vector<std::vector<double>> grid;
  for (std::size_t n = 0; n < options.candidates; ++n) grid.push_back(sobol.next());
  const Eigen::MatrixXd grid_m = grid.empty() ? Eigen::MatrixXd(0, static_cast<Eigen::Index>(domain.dim()))
                                              : to_matrix(grid);
  const Eigen::Map<const Eigen::VectorXd> c(c_true.data(), static_cast<Eigen::Index>(c_true.size()));

  for (std::size_t step = options.init; step < options.steps; ++step) {
    std::vector<std::vector<double>> xs;
    std::vector<std::vector<double>> ys;
    for (const auto& e : result.evaluations) {
      xs.push_back(domain.unscale(e.theta));
      ys.push_back(e.g_hat);
    }
    const Eigen::MatrixXd X = to_matrix(xs);
    const Eigen::MatrixXd Y = to_matrix(ys);
    GpFitOptions fit_opt;
    fit_opt.seed = derive_seed(options.seed, {step, 1});
    const Gp gp = Gp::fit(X, Y, fit_opt);
    const Eigen::MatrixXd Z =
        fantasy_draws(options.fantasies, Y.cols(), derive_seed(options.seed, {step, 2}));

    // Candidates: grid plus observed points; every candidate is also a proposal.
    Eigen::MatrixXd C(grid_m.rows() + X.rows(), X.cols());
    C << grid_m, X;
    const Eigen::MatrixXd residual = (-gp.mean(C)).rowwise() + c.transpose();
    const Eigen::VectorXd var = gp.latent_var(C);
    Eigen::Index best = 0;
    double best_kg = -kInf;
    for (Eigen::Index k = 0; k < grid_m.rows(); ++k) {
      const Eigen::VectorXd cov = gp.latent_cov(C, C.row(k).transpose());
      const auto kg = kg_from_posterior(residual, var, cov, var[k], gp.hyper().noise_var, gp.scale(), Z);
      if (kg.value > best_kg) {
        best_kg = kg.value;
        best = k;
      }
    }
    std::vector<double> next(static_cast<std::size_t>(C.cols()));
    for (Eigen::Index d = 0; d < C.cols(); ++d) next[static_cast<std::size_t>(d)] = C(best, d);
    evaluate(domain.scale(next));
  }

  const auto it = std::max_element(result.evaluations.begin(), result.evaluations.end(),
                                   [](const Evaluation& a, const Evaluation& b) { return a.score < b.score; });
  result.theta_star = it->theta;
  result.best_score = it->score;
  return result;
}

}  // namespace hotspot
