#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpof/covkernel.hpp"
#include "mfpof/hyperprior.hpp"
#include "mfpof/rng.hpp"

namespace mfpof {

/// Observations (x_i, t_i; z_i) of a multi-fidelity simulator, grouped by level.
class MfDataset {
 public:
  /// Validates and indexes the observations. `levels` lists the fidelity
  /// values the model knows about; when empty it is taken from the distinct
  /// t values. Levels are stored in decreasing order (level 0 is the lowest
  /// fidelity). `bounds`, when non-empty, is the input hyper-rectangle every
  /// x must lie in.
  static MfDataset create(Eigen::MatrixXd x, Eigen::VectorXd t, Eigen::VectorXd z, std::vector<double> levels = {},
                          std::vector<std::pair<double, double>> bounds = {});

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(z_.size()); }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& x() const noexcept { return x_; }
  [[nodiscard]] const Eigen::VectorXd& t() const noexcept { return t_; }
  [[nodiscard]] const Eigen::VectorXd& z() const noexcept { return z_; }
  [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }
  [[nodiscard]] const std::vector<std::size_t>& level_index() const noexcept { return level_index_; }
  [[nodiscard]] const std::vector<std::pair<double, double>>& bounds() const noexcept { return bounds_; }
  /// Lowest fidelity, i.e. the largest level value.
  [[nodiscard]] double t_lf() const noexcept { return levels_.front(); }
  /// Ordinal of level value t; throws DomainError if t is not a level.
  [[nodiscard]] std::size_t level_of(double t) const;
  [[nodiscard]] std::size_t count_at(std::size_t level) const;

  /// The observations made at level value t, as a one-level dataset.
  [[nodiscard]] MfDataset restrict_to_level(double t) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd t_;
  Eigen::VectorXd z_;
  std::vector<double> levels_;
  std::vector<std::size_t> level_index_;
  std::vector<std::pair<double, double>> bounds_;
};

/// Latent-process posterior at a set of targets.
struct Prediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Ordinary-kriging posterior given fixed hyper-parameters. Immutable after fit().
class GpPosterior {
 public:
  /// Factorizes K = k(X, X) + diag(lambda) once. Throws ModelError when the
  /// factorization fails after jitter escalation.
  static GpPosterior fit(const HyperParams& theta, std::shared_ptr<const MfDataset> data);
  static GpPosterior fit(const HyperParams& theta, const MfDataset& data);

  [[nodiscard]] const MfDataset& data() const noexcept { return *data_; }
  [[nodiscard]] const KernelParams& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const HyperParams& theta() const noexcept { return theta_; }
  /// Generalized-least-squares estimate of the constant mean.
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double one_kinv_one() const noexcept { return one_kinv_one_; }
  [[nodiscard]] double jitter() const noexcept { return jitter_; }
  /// log of the likelihood integrated over the constant mean (improper uniform prior).
  [[nodiscard]] double integrated_log_likelihood() const noexcept { return log_likelihood_; }
  /// Lower Cholesky factor of the (jittered) covariance of the observations.
  [[nodiscard]] const Eigen::MatrixXd& cholesky_factor() const noexcept { return lower_; }

  /// Posterior of the latent xi at the targets (no observation noise added).
  [[nodiscard]] Prediction predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const;

  /// q joint draws of xi at the targets, one per row.
  [[nodiscard]] Eigen::MatrixXd sample_paths(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, std::size_t q,
                                             RngStream& rng) const;

 private:
  GpPosterior() = default;

  std::shared_ptr<const MfDataset> data_;
  HyperParams theta_;
  KernelParams kernel_;
  Eigen::MatrixXd lower_;  // Cholesky factor, zero above the diagonal
  double jitter_ = 0.0;
  Eigen::VectorXd l_inv_one_;    // L^{-1} 1
  Eigen::VectorXd l_inv_resid_;  // L^{-1} (z - beta 1)
  double one_kinv_one_ = 0.0;
  double beta_ = 0.0;
  double log_likelihood_ = 0.0;
};

/// Per-observation noise variances lambda(t_i) under theta.
[[nodiscard]] std::vector<double> observation_noise(const HyperParams& theta, const MfDataset& data);

/// log of the integral over m of N(z; m 1, K), including the (n-1)/2 log 2pi term.
/// Throws ModelError when K cannot be factorized.
[[nodiscard]] double integrated_log_likelihood(const HyperParams& theta, const MfDataset& data);

/// Draws q rows from N(mean, cov) using a jittered Cholesky factor; a zero
/// covariance yields q copies of the mean.
[[nodiscard]] Eigen::MatrixXd sample_gaussian_rows(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                                   std::size_t q, RngStream& rng);

}  // namespace mfpof
