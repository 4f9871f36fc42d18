#pragma once

#include <Eigen/Dense>

#include "mfpof/amh.hpp"

namespace testutil {

// Correlated 5-D Gaussian with known moments.
struct GaussianTarget {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::LLT<Eigen::MatrixXd> llt;

  GaussianTarget() : mean(5), cov(5, 5) {
    mean << 1.0, -2.0, 0.5, 10.0, 0.0;
    const Eigen::VectorXd sd = (Eigen::VectorXd(5) << 1.0, 0.5, 2.0, 3.0, 0.2).finished();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(5, 5);
    corr(0, 1) = corr(1, 0) = 0.6;
    corr(2, 3) = corr(3, 2) = -0.4;
    corr(0, 4) = corr(4, 0) = 0.3;
    cov = sd.asDiagonal() * corr * sd.asDiagonal();
    llt.compute(cov);
  }

  [[nodiscard]] mfpof::LogTarget target() const {
    return [this](const Eigen::VectorXd& x) {
      const Eigen::VectorXd w = llt.matrixL().solve(x - mean);
      return -0.5 * w.squaredNorm();
    };
  }
};

struct ChainCheck {
  double worst_mean = 0.0;  // max |mean error| / marginal SD
  double worst_cov = 0.0;   // max |cov error| / sqrt(C_ii C_jj)
};

inline ChainCheck check_chain(const GaussianTarget& g, const Eigen::MatrixXd& states) {
  const Eigen::RowVectorXd m = states.colwise().mean();
  const Eigen::MatrixXd c = states.rowwise() - m;
  const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(states.rows() - 1);
  ChainCheck out;
  for (Eigen::Index i = 0; i < 5; ++i) {
    out.worst_mean = std::max(out.worst_mean, std::fabs(m[i] - g.mean[i]) / std::sqrt(g.cov(i, i)));
    for (Eigen::Index j = 0; j < 5; ++j)
      out.worst_cov = std::max(out.worst_cov, std::fabs(cov(i, j) - g.cov(i, j)) / std::sqrt(g.cov(i, i) * g.cov(j, j)));
  }
  return out;
}

inline mfpof::AmhConfig gaussian_chain_config(std::uint64_t seed) {
  mfpof::AmhConfig cfg;
  cfg.n_iterations = 100000;
  cfg.burn_in = 5000;
  cfg.thin = 1;
  cfg.adaptation_start = 1000;
  cfg.initial_cov = 0.1 * Eigen::MatrixXd::Identity(5, 5);
  cfg.seed = seed;
  return cfg;
}

}  // namespace testutil
