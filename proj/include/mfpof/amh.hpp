#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mfpof/hyperprior.hpp"
#include "mfpof/mfgp.hpp"
#include "mfpof/rng.hpp"

namespace mfpof {

/// Log of an unnormalized target density; may return -inf outside its support.
using LogTarget = std::function<double(const Eigen::VectorXd&)>;

/// Adaptive Metropolis (Haario et al. 2001) settings.
///
/// Retained sample size is (n_iterations - burn_in) / thin. After
/// `adaptation_start` iterations the random-walk proposal covariance becomes
/// scale * (empirical covariance of the chain so far) + scale * eps * I.
struct AmhConfig {
  std::size_t n_iterations = 20000;
  std::size_t burn_in = 5000;
  std::size_t thin = 15;
  std::size_t adaptation_start = 1000;
  /// s_d; 0 selects 2.4^2 / D.
  double scale = 0.0;
  double eps = 1e-6;
  /// Proposal covariance before adaptation; empty selects 0.01 * prior covariance.
  Eigen::MatrixXd initial_cov;
  bool adapt = true;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t retained() const noexcept { return burn_in < n_iterations ? (n_iterations - burn_in) / thin : 0; }
  /// Throws ConfigError on burn_in >= n_iterations, thin == 0, eps <= 0 or no retained sample.
  void validate() const;

  /// Chain length for p retained draws with the default burn-in and thinning.
  [[nodiscard]] static AmhConfig for_retained(std::size_t p, std::uint64_t seed);
};

/// Raw chain output over a plain vector space.
struct ChainResult {
  Eigen::MatrixXd states;           // retained states, one per row
  std::vector<double> log_target;   // log target at each retained state
  std::vector<std::size_t> iteration;
  double acceptance_rate = 0.0;
  Eigen::MatrixXd final_proposal_cov;
};

/// Metropolis chain with Gaussian random-walk proposals and recursive
/// covariance adaptation. Non-finite target values at a proposal reject it.
[[nodiscard]] ChainResult run_adaptive_metropolis(const LogTarget& target, const Eigen::VectorXd& initial,
                                                  const AmhConfig& cfg);

struct PosteriorSample {
  std::vector<HyperParams> thetas;
  double acceptance_rate = 0.0;
  std::vector<double> log_posterior;
  std::vector<std::size_t> iteration;
};

/// log pi(chi_n | theta) + log pi(theta); -inf when the GP cannot be factorized.
[[nodiscard]] double log_posterior(const MfDataset& data, const PriorSpec& prior, const Eigen::VectorXd& log_theta);

/// Samples pi(theta | data). Starts at the prior mean, re-drawing the start
/// from the prior (up to 100 attempts) while the posterior is not finite.
[[nodiscard]] PosteriorSample run_amh(const MfDataset& data, const PriorSpec& prior, const AmhConfig& cfg);

/// Coordinate-wise pattern search maximizing `target` from each start; steps
/// shrink by half when no coordinate move improves, until all are below
/// `min_step`. Returns the best point over all starts.
struct PatternSearchResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  std::size_t evaluations = 0;
};
[[nodiscard]] PatternSearchResult maximize_pattern_search(const LogTarget& target,
                                                          const std::vector<Eigen::VectorXd>& starts,
                                                          const Eigen::VectorXd& initial_steps, double min_step = 1e-4);

/// MAP estimate of theta: pattern search from the prior mean and `restarts`
/// prior draws, initial step 0.5 prior SD per coordinate.
[[nodiscard]] HyperParams map_estimate(const MfDataset& data, const PriorSpec& prior, std::size_t restarts,
                                       RngStream& rng);

/// CSV trace: iteration,log_posterior,<coordinate names>.
void write_trace_csv(std::ostream& os, const PosteriorSample& sample);

}  // namespace mfpof
