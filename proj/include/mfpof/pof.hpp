#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpof/hyperprior.hpp"
#include "mfpof/mfgp.hpp"
#include "mfpof/rng.hpp"

namespace mfpof {

/// Draws m inputs from f_X, one per row.
using InputSampler = std::function<Eigen::MatrixXd(std::size_t m, RngStream& rng)>;

/// Uniform distribution on prod [a_k, b_k].
[[nodiscard]] InputSampler uniform_inputs(std::vector<std::pair<double, double>> bounds);

struct PofConfig {
  double z_crit = 1.0;
  /// Reference fidelity at which the failure probability is estimated.
  double t_ref = 0.01;
  std::size_t m_inputs = 500;
  std::size_t q_paths = 20;
  InputSampler input_sampler;
  std::uint64_t seed = 0;

  void validate() const;
};

/// q joint draws of the latent process at m inputs plus the observation noise
/// variance at the reference level, for one hyper-parameter sample.
struct PathDraw {
  Eigen::MatrixXd paths;  // q x m
  double noise_variance = 0.0;
};

/// Produces the PathDraw of hyper-parameter sample j at the given inputs.
/// Throws ModelError when the sample cannot be used.
using PathModel = std::function<PathDraw(std::size_t j, const Eigen::MatrixXd& inputs, std::size_t q, RngStream& rng)>;

struct PofSampleSet {
  Eigen::MatrixXd samples;               // p_used x q, entries in [0, 1]
  std::vector<std::size_t> theta_index;  // row -> index of the originating theta
  std::vector<std::string> warnings;     // one per skipped theta
  double z_crit = 0.0;
  double t_ref = 0.0;
  std::size_t m_inputs = 0;
  std::size_t q_paths = 0;

  /// Row-major flattening of all P_{j,l}.
  [[nodiscard]] std::vector<double> flattened() const;
};

/// P_{j,l} = mean_i Phi((xi_l(x_i^{(j)}, t_ref) - z_crit) / sqrt(lambda_j)) for
/// fresh inputs x^{(j)} per sample j. Samples whose model throws ModelError are
/// skipped with a warning; more than 10% skipped is an error.
[[nodiscard]] PofSampleSet sample_pof(const PathModel& model, std::size_t p, const PofConfig& cfg);

/// GP-backed sampler: one ordinary-kriging posterior per theta on `data`.
[[nodiscard]] PofSampleSet sample_pof(const MfDataset& data, const std::vector<HyperParams>& thetas,
                                      const PofConfig& cfg);

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
[[nodiscard]] double quantile_sorted(const std::vector<double>& sorted, double prob);

struct CredibleInterval {
  double level = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double length() const noexcept { return upper - lower; }
  [[nodiscard]] bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

struct PofSummary {
  double median = 0.0;
  std::vector<CredibleInterval> intervals;
  [[nodiscard]] const CredibleInterval& at(double level) const;
};

/// Median and equal-tailed intervals over the flattened sample.
[[nodiscard]] PofSummary summarize(const PofSampleSet& samples, const std::vector<double>& levels);
[[nodiscard]] PofSummary summarize(std::vector<double> values, const std::vector<double>& levels);

struct CoveragePoint {
  double level = 0.0;
  double coverage = 0.0;
  std::size_t hits = 0;
};

/// Fraction of experiments whose level-gamma interval contains `reference`.
[[nodiscard]] std::vector<CoveragePoint> coverage_report(const std::vector<PofSummary>& experiments, double reference,
                                                         const std::vector<double>& levels);

/// 0.05, 0.10, ..., 0.95, 0.99.
[[nodiscard]] std::vector<double> default_level_grid();

/// CSV "j,l,p" with j the theta index and l the path index.
void write_pof_csv(std::ostream& os, const PofSampleSet& set);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double x);

}  // namespace mfpof
