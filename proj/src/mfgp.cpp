#include "mfpof/mfgp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mfpof/error.hpp"
#include "mfpof/fpenv.hpp"

namespace mfpof {

MfDataset MfDataset::create(Eigen::MatrixXd x, Eigen::VectorXd t, Eigen::VectorXd z, std::vector<double> levels,
                            std::vector<std::pair<double, double>> bounds) {
  const auto n = z.size();
  if (x.rows() != n || t.size() != n) throw ConfigError("MfDataset: x, t and z lengths differ");
  if (n < 2) throw ConfigError("MfDataset: at least two observations are required");
  if (x.cols() < 1) throw ConfigError("MfDataset: inputs need at least one dimension");
  if (!x.allFinite() || !z.allFinite() || !t.allFinite()) throw ConfigError("MfDataset: non-finite observation");

  if (levels.empty()) levels.assign(t.data(), t.data() + n);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.back() <= 0.0) throw ConfigError("MfDataset: fidelity levels must be positive");

  if (!bounds.empty()) {
    if (bounds.size() != static_cast<std::size_t>(x.cols())) throw ConfigError("MfDataset: one bound per dimension");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const auto& [a, b] = bounds[static_cast<std::size_t>(k)];
        if (x(i, k) < a || x(i, k) > b)
          throw ConfigError("MfDataset: observation " + std::to_string(i) + " lies outside the input domain");
      }
  }

  MfDataset out;
  out.x_ = std::move(x);
  out.t_ = std::move(t);
  out.z_ = std::move(z);
  out.levels_ = std::move(levels);
  out.bounds_ = std::move(bounds);
  out.level_index_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = std::find(out.levels_.begin(), out.levels_.end(), out.t_[i]);
    if (it == out.levels_.end())
      throw ConfigError("MfDataset: observation " + std::to_string(i) + " is not at a declared level");
    out.level_index_[static_cast<std::size_t>(i)] = static_cast<std::size_t>(it - out.levels_.begin());
  }
  return out;
}

std::size_t MfDataset::level_of(double t) const {
  const auto it = std::find(levels_.begin(), levels_.end(), t);
  if (it == levels_.end()) throw DomainError("fidelity " + std::to_string(t) + " is not an observed level");
  return static_cast<std::size_t>(it - levels_.begin());
}

std::size_t MfDataset::count_at(std::size_t level) const {
  return static_cast<std::size_t>(std::count(level_index_.begin(), level_index_.end(), level));
}

MfDataset MfDataset::restrict_to_level(double t) const {
  const std::size_t level = level_of(t);
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < size(); ++i)
    if (level_index_[i] == level) rows.push_back(static_cast<Eigen::Index>(i));
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(m, x_.cols());
  Eigen::VectorXd tt(m), z(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    x.row(r) = x_.row(rows[static_cast<std::size_t>(r)]);
    tt[r] = t_[rows[static_cast<std::size_t>(r)]];
    z[r] = z_[rows[static_cast<std::size_t>(r)]];
  }
  return create(std::move(x), std::move(tt), std::move(z), {t}, bounds_);
}

std::vector<double> observation_noise(const HyperParams& theta, const MfDataset& data) {
  if (theta.levels() != data.levels().size())
    throw ConfigError("hyper-parameter level count (" + std::to_string(theta.levels()) +
                      ") does not match dataset levels (" + std::to_string(data.levels().size()) + ")");
  if (theta.input_dim() != data.dim()) throw ConfigError("hyper-parameter input dimension does not match dataset");
  std::vector<double> noise(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) noise[i] = theta.noise_variance(data.level_index()[i]);
  return noise;
}

namespace {

struct LikelihoodTerms {
  double one_kinv_one = 0.0;
  double beta = 0.0;
  double log_likelihood = 0.0;
};

// Kriging quantities from the factor in the lower triangle of `lower`.
LikelihoodTerms score(const Eigen::MatrixXd& lower, const Eigen::VectorXd& z, Eigen::VectorXd& l_inv_one,
                      Eigen::VectorXd& l_inv_resid) {
  const auto n = lower.rows();
  const auto tri = lower.triangularView<Eigen::Lower>();
  l_inv_one.setOnes(n);
  tri.solveInPlace(l_inv_one);
  l_inv_resid = z;
  tri.solveInPlace(l_inv_resid);  // L^{-1} z for now

  LikelihoodTerms out;
  out.one_kinv_one = l_inv_one.squaredNorm();
  if (!(out.one_kinv_one > 0.0) || !std::isfinite(out.one_kinv_one)) throw ModelError("1' K^-1 1 is not positive");
  out.beta = l_inv_one.dot(l_inv_resid) / out.one_kinv_one;
  l_inv_resid -= out.beta * l_inv_one;

  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  out.log_likelihood = -0.5 * (static_cast<double>(n - 1) * std::log(2.0 * std::numbers::pi) + log_det +
                               std::log(out.one_kinv_one) + l_inv_resid.squaredNorm());
  if (!std::isfinite(out.log_likelihood)) throw ModelError("integrated log-likelihood is not finite");
  return out;
}

KernelParams checked_kernel(const HyperParams& theta, const MfDataset& data) {
  if (!theta.valid()) throw ModelError("hyper-parameters are not finite and positive");
  KernelParams k = theta.kernel(data.t_lf());
  k.validate();
  return k;
}

}  // namespace

GpPosterior GpPosterior::fit(const HyperParams& theta, std::shared_ptr<const MfDataset> data) {
  if (!data) throw ConfigError("GpPosterior::fit: null dataset");
  const FlushDenormals ftz;
  GpPosterior gp;
  gp.data_ = std::move(data);
  gp.theta_ = theta;
  gp.kernel_ = checked_kernel(theta, *gp.data_);
  fill_cov_matrix(gp.kernel_, gp.data_->x(), gp.data_->t(), observation_noise(theta, *gp.data_), gp.lower_);
  gp.jitter_ = cholesky_in_place(gp.lower_);
  gp.lower_.triangularView<Eigen::StrictlyUpper>().setZero();
  const LikelihoodTerms terms = score(gp.lower_, gp.data_->z(), gp.l_inv_one_, gp.l_inv_resid_);
  gp.one_kinv_one_ = terms.one_kinv_one;
  gp.beta_ = terms.beta;
  gp.log_likelihood_ = terms.log_likelihood;
  return gp;
}

GpPosterior GpPosterior::fit(const HyperParams& theta, const MfDataset& data) {
  return fit(theta, std::make_shared<const MfDataset>(data));
}

Prediction GpPosterior::predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) const {
  if (x.rows() == 0) throw DomainError("predict: no targets");
  const FlushDenormals ftz;
  if (static_cast<std::size_t>(x.cols()) != data_->dim()) throw DomainError("predict: target dimension mismatch");
  if (t.size() != x.rows()) throw DomainError("predict: fidelity count mismatch");

  const Eigen::MatrixXd k_cross = cross_cov(kernel_, data_->x(), data_->t(), x, t);  // n x m
  const Eigen::MatrixXd v = lower_.triangularView<Eigen::Lower>().solve(k_cross);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(x.rows()) - v.transpose() * l_inv_one_;

  Prediction out;
  out.mean = Eigen::VectorXd::Constant(x.rows(), beta_) + v.transpose() * l_inv_resid_;
  out.cov = cross_cov(kernel_, x, t, x, t);
  out.cov.noalias() -= v.transpose() * v;
  out.cov.noalias() += (u * u.transpose()) / one_kinv_one_;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Eigen::MatrixXd GpPosterior::sample_paths(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, std::size_t q,
                                          RngStream& rng) const {
  const Prediction pred = predict(x, t);
  return sample_gaussian_rows(pred.mean, pred.cov, q, rng);
}

double integrated_log_likelihood(const HyperParams& theta, const MfDataset& data) {
  // Called once per sampler step: keep the n x n buffer per thread instead of
  // allocating it every time.
  thread_local Eigen::MatrixXd k;
  thread_local Eigen::VectorXd l_inv_one, l_inv_resid;
  const FlushDenormals ftz;
  const KernelParams kernel = checked_kernel(theta, data);
  fill_cov_matrix(kernel, data.x(), data.t(), observation_noise(theta, data), k);
  cholesky_in_place(k);
  return score(k, data.z(), l_inv_one, l_inv_resid).log_likelihood;
}

Eigen::MatrixXd sample_gaussian_rows(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t q,
                                     RngStream& rng) {
  if (q == 0) throw ConfigError("sample_paths: q must be at least 1");
  const FlushDenormals ftz;
  const auto m = mean.size();
  Eigen::MatrixXd out = mean.transpose().replicate(static_cast<Eigen::Index>(q), 1);
  if (cov.diagonal().maxCoeff() <= 0.0) return out;

  const JitteredCholesky factor = cholesky_with_jitter(cov);
  const Eigen::MatrixXd& lower = factor.lower;
  Eigen::MatrixXd e(m, static_cast<Eigen::Index>(q));
  for (Eigen::Index r = 0; r < e.cols(); ++r)
    for (Eigen::Index i = 0; i < m; ++i) e(i, r) = rng.normal();
  out.noalias() += (lower.triangularView<Eigen::Lower>() * e).transpose();
  return out;
}

}  // namespace mfpof
