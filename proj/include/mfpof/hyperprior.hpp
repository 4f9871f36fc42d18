#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpof/covkernel.hpp"
#include "mfpof/rng.hpp"

namespace mfpof {

/// Multi-fidelity (all levels, distorted-Brownian error process) or
/// single-level (stationary GP on the reference level only).
enum class ModelKind { kMultiFidelity, kSingleLevel };

/// Log-scale hyper-parameter vector.
///
/// Multi-fidelity layout, D = 2d + 3 + S:
///   [0]                 log sigma0^2
///   [1, d]              log rho0_1 .. log rho0_d
///   [d+1]               log G
///   [d+2, 2d+1]         log rho_eps_1 .. log rho_eps_d
///   [2d+2]              log L
///   [2d+3, 2d+2+S]      log lambda(t_1) .. log lambda(t_S)
///
/// Single-level layout, D = d + 2:
///   [0] log sigma0^2, [1, d] log rho0, [d+1] log lambda(t_ref)
class HyperParams {
 public:
  HyperParams() = default;
  HyperParams(ModelKind kind, std::size_t d, std::size_t levels, Eigen::VectorXd log_theta);

  [[nodiscard]] static std::size_t dimension(ModelKind kind, std::size_t d, std::size_t levels) noexcept;

  [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t input_dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t levels() const noexcept { return levels_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(log_theta_.size()); }
  [[nodiscard]] const Eigen::VectorXd& log_theta() const noexcept { return log_theta_; }
  [[nodiscard]] Eigen::VectorXd natural() const { return log_theta_.array().exp(); }

  /// True when exp(log_theta) is finite and strictly positive.
  [[nodiscard]] bool valid() const;

  /// Kernel parameters; t_lf is the lowest fidelity (largest t) of the dataset.
  [[nodiscard]] KernelParams kernel(double t_lf) const;
  /// Noise variance lambda at level ordinal s (0 = lowest fidelity).
  [[nodiscard]] double noise_variance(std::size_t level) const;

  /// Human-readable coordinate names in layout order, e.g. "log_rho0_1".
  [[nodiscard]] std::vector<std::string> names() const;

  [[nodiscard]] std::size_t noise_offset() const noexcept;

 private:
  ModelKind kind_ = ModelKind::kMultiFidelity;
  std::size_t d_ = 0;
  std::size_t levels_ = 0;
  Eigen::VectorXd log_theta_;
};

/// Multivariate normal prior over the log-scale hyper-parameters.
struct PriorSpec {
  ModelKind kind = ModelKind::kMultiFidelity;
  std::size_t d = 0;
  std::size_t levels = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double noise_correlation = 0.99;
  double r_out = 1.0;
  std::vector<std::pair<double, double>> bounds;

  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean.size()); }
  [[nodiscard]] Eigen::VectorXd marginal_sd() const { return cov.diagonal().array().sqrt(); }
  [[nodiscard]] HyperParams at(const Eigen::VectorXd& log_theta) const { return {kind, d, levels, log_theta}; }
};

/// Weakly-informative default prior. For kSingleLevel, `levels` must be 1 and
/// the entries are those of sigma0^2, the rho0 ranges and one noise variance.
[[nodiscard]] PriorSpec default_prior(std::size_t d, std::size_t levels, double r_out,
                                      const std::vector<std::pair<double, double>>& bounds,
                                      double noise_correlation = 0.99, ModelKind kind = ModelKind::kMultiFidelity);

/// Exact log-density of h.log_theta() under N(mean, cov).
[[nodiscard]] double log_prior_density(const PriorSpec& prior, const HyperParams& h);
[[nodiscard]] double log_prior_density(const PriorSpec& prior, const Eigen::VectorXd& log_theta);

/// n iid draws from the prior.
[[nodiscard]] std::vector<HyperParams> sample_prior(const PriorSpec& prior, std::size_t n, RngStream& rng);

}  // namespace mfpof
