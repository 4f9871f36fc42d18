#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mfpof/covkernel.hpp"
#include "mfpof/hyperprior.hpp"
#include "mfpof/mfgp.hpp"
#include "mfpof/rng.hpp"
#include "oracles.hpp"

namespace testutil {

inline mfpof::KernelParams random_kernel(std::size_t d, mfpof::RngStream& rng, double t_lf = 1.0) {
  mfpof::KernelParams p;
  p.sigma0_sq = rng.uniform(0.2, 3.0);
  p.g_ratio = rng.uniform(0.1, 2.0);
  p.degree_L = rng.uniform(0.5, 5.0);
  p.t_lf = t_lf;
  for (std::size_t k = 0; k < d; ++k) {
    p.rho0.push_back(rng.uniform(0.1, 1.5));
    p.rho_eps.push_back(rng.uniform(0.1, 1.5));
  }
  return p;
}

inline oracle::Kernel to_oracle(const mfpof::KernelParams& p) {
  return {p.sigma0_sq, p.rho0, p.g_ratio, p.rho_eps, p.degree_L, p.t_lf, p.stationary};
}

inline Eigen::MatrixXd random_points(std::size_t n, std::size_t d, mfpof::RngStream& rng) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = rng.uniform();
  return x;
}

inline Eigen::VectorXd random_fidelities(std::size_t n, mfpof::RngStream& rng, double t_lf = 1.0) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  for (auto& v : t) v = rng.uniform(1e-3, t_lf);
  return t;
}

inline double max_rel_diff(const Eigen::MatrixXd& a, const oracle::LMatrix& b) {
  const double scale = std::max(1.0, static_cast<double>(b.cwiseAbs().maxCoeff()));
  return (a - b.cast<double>()).cwiseAbs().maxCoeff() / scale;
}

// Log-scale parameter vector for a multi-fidelity kernel plus per-level noise.
inline mfpof::HyperParams mf_theta(const mfpof::KernelParams& p, const std::vector<double>& noise) {
  const std::size_t d = p.dim();
  Eigen::VectorXd l(static_cast<Eigen::Index>(2 * d + 3 + noise.size()));
  Eigen::Index i = 0;
  l[i++] = std::log(p.sigma0_sq);
  for (double r : p.rho0) l[i++] = std::log(r);
  l[i++] = std::log(p.g_ratio);
  for (double r : p.rho_eps) l[i++] = std::log(r);
  l[i++] = std::log(p.degree_L);
  for (double v : noise) l[i++] = std::log(v);
  return {mfpof::ModelKind::kMultiFidelity, d, noise.size(), l};
}

// n observations spread over the given levels (each level used at least once
// when n allows), with smooth-plus-noise outputs.
inline mfpof::MfDataset random_dataset(std::size_t n, std::size_t d, const std::vector<double>& levels,
                                       mfpof::RngStream& rng) {
  Eigen::MatrixXd x = random_points(n, d, rng);
  Eigen::VectorXd t(static_cast<Eigen::Index>(n)), z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    t[static_cast<Eigen::Index>(i)] = levels[i % levels.size()];
    z[static_cast<Eigen::Index>(i)] = std::sin(3.0 * x(static_cast<Eigen::Index>(i), 0)) + 0.3 * rng.normal();
  }
  return mfpof::MfDataset::create(std::move(x), std::move(t), std::move(z), levels);
}

inline std::vector<double> level_noise(const mfpof::HyperParams& h, const mfpof::MfDataset& data) {
  std::vector<double> out;
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(h.noise_variance(data.level_index()[i]));
  return out;
}

// K of the dataset from the oracle kernel, noise on the diagonal.
inline oracle::LMatrix oracle_k(const mfpof::HyperParams& h, const mfpof::MfDataset& data) {
  oracle::LMatrix k = oracle::gram(to_oracle(h.kernel(data.t_lf())), data.x(), data.t(), data.x(), data.t());
  const auto noise = level_noise(h, data);
  for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, i) += noise[static_cast<std::size_t>(i)];
  return k;
}

}  // namespace testutil
