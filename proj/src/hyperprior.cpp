#include "mfpof/hyperprior.hpp"

#include <cmath>
#include <numbers>

#include "mfpof/error.hpp"

namespace mfpof {

HyperParams::HyperParams(ModelKind kind, std::size_t d, std::size_t levels, Eigen::VectorXd log_theta)
    : kind_(kind), d_(d), levels_(levels), log_theta_(std::move(log_theta)) {
  if (d == 0 || levels == 0) throw ConfigError("HyperParams: d and S must be positive");
  if (kind == ModelKind::kSingleLevel && levels != 1) throw ConfigError("HyperParams: single-level model has one level");
  if (static_cast<std::size_t>(log_theta_.size()) != dimension(kind, d, levels))
    throw ConfigError("HyperParams: vector length does not match layout");
}

std::size_t HyperParams::dimension(ModelKind kind, std::size_t d, std::size_t levels) noexcept {
  return kind == ModelKind::kMultiFidelity ? 2 * d + 3 + levels : d + 2;
}

bool HyperParams::valid() const {
  for (Eigen::Index i = 0; i < log_theta_.size(); ++i) {
    const double v = std::exp(log_theta_[i]);
    if (!std::isfinite(v) || !(v > 0.0)) return false;
  }
  return log_theta_.size() > 0;
}

std::size_t HyperParams::noise_offset() const noexcept {
  return kind_ == ModelKind::kMultiFidelity ? 2 * d_ + 3 : d_ + 1;
}

KernelParams HyperParams::kernel(double t_lf) const {
  const auto& l = log_theta_;
  KernelParams p;
  p.sigma0_sq = std::exp(l[0]);
  p.rho0.resize(d_);
  for (std::size_t k = 0; k < d_; ++k) p.rho0[k] = std::exp(l[static_cast<Eigen::Index>(1 + k)]);
  p.t_lf = t_lf;
  if (kind_ == ModelKind::kSingleLevel) {
    p.stationary = true;
    return p;
  }
  p.g_ratio = std::exp(l[static_cast<Eigen::Index>(d_ + 1)]);
  p.rho_eps.resize(d_);
  for (std::size_t k = 0; k < d_; ++k) p.rho_eps[k] = std::exp(l[static_cast<Eigen::Index>(d_ + 2 + k)]);
  p.degree_L = std::exp(l[static_cast<Eigen::Index>(2 * d_ + 2)]);
  return p;
}

double HyperParams::noise_variance(std::size_t level) const {
  if (level >= levels_) throw DomainError("noise_variance: level out of range");
  return std::exp(log_theta_[static_cast<Eigen::Index>(noise_offset() + level)]);
}

std::vector<std::string> HyperParams::names() const {
  std::vector<std::string> out{"log_sigma0_sq"};
  for (std::size_t k = 0; k < d_; ++k) out.push_back("log_rho0_" + std::to_string(k + 1));
  if (kind_ == ModelKind::kMultiFidelity) {
    out.emplace_back("log_G");
    for (std::size_t k = 0; k < d_; ++k) out.push_back("log_rho_eps_" + std::to_string(k + 1));
    out.emplace_back("log_L");
  }
  for (std::size_t s = 0; s < levels_; ++s) out.push_back("log_lambda_" + std::to_string(s + 1));
  return out;
}

PriorSpec default_prior(std::size_t d, std::size_t levels, double r_out,
                        const std::vector<std::pair<double, double>>& bounds, double noise_correlation,
                        ModelKind kind) {
  if (d == 0 || levels == 0) throw ConfigError("default_prior: d and S must be positive");
  if (!(r_out > 0.0) || !std::isfinite(r_out)) throw ConfigError("default_prior: r_out must be positive");
  if (bounds.size() != d) throw ConfigError("default_prior: need one (a, b) bound per input dimension");
  for (const auto& [a, b] : bounds)
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("default_prior: bounds need a < b");
  if (!(noise_correlation >= 0.0 && noise_correlation < 1.0))
    throw ConfigError("default_prior: noise correlation must lie in [0, 1)");
  if (kind == ModelKind::kSingleLevel && levels != 1) throw ConfigError("default_prior: single-level prior has S = 1");

  const double log100 = std::log(100.0);
  const double log10 = std::log(10.0);
  const double log3 = std::log(3.0);
  const double scale_mean = std::log(r_out * r_out / (100.0 * 100.0));

  PriorSpec prior;
  prior.kind = kind;
  prior.d = d;
  prior.levels = levels;
  prior.noise_correlation = noise_correlation;
  prior.r_out = r_out;
  prior.bounds = bounds;

  const auto dim = static_cast<Eigen::Index>(HyperParams::dimension(kind, d, levels));
  prior.mean = Eigen::VectorXd::Zero(dim);
  prior.cov = Eigen::MatrixXd::Zero(dim, dim);
  auto set = [&](Eigen::Index i, double mean, double sd) {
    prior.mean[i] = mean;
    prior.cov(i, i) = sd * sd;
  };

  Eigen::Index i = 0;
  set(i++, scale_mean, log100);
  for (std::size_t k = 0; k < d; ++k) set(i++, std::log((bounds[k].second - bounds[k].first) / 2.0), log10);
  if (kind == ModelKind::kMultiFidelity) {
    set(i++, 0.0, log100);
    for (std::size_t k = 0; k < d; ++k) set(i++, std::log((bounds[k].second - bounds[k].first) / 2.0), log10);
    set(i++, std::log(4.0), log3);
  }
  const Eigen::Index noise = i;
  const auto s_count = static_cast<Eigen::Index>(levels);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    prior.mean[noise + s] = scale_mean;
    for (Eigen::Index u = 0; u < s_count; ++u)
      prior.cov(noise + s, noise + u) = log100 * log100 * (s == u ? 1.0 : noise_correlation);
  }
  return prior;
}

double log_prior_density(const PriorSpec& prior, const Eigen::VectorXd& log_theta) {
  if (log_theta.size() != prior.mean.size()) throw ConfigError("log_prior_density: dimension mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(prior.cov);
  if (llt.info() != Eigen::Success) throw ConfigError("log_prior_density: prior covariance is not positive definite");
  const Eigen::VectorXd w = llt.matrixL().solve(log_theta - prior.mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const auto dim = static_cast<double>(log_theta.size());
  return -0.5 * (dim * std::log(2.0 * std::numbers::pi) + log_det + w.squaredNorm());
}

double log_prior_density(const PriorSpec& prior, const HyperParams& h) {
  return log_prior_density(prior, h.log_theta());
}

std::vector<HyperParams> sample_prior(const PriorSpec& prior, std::size_t n, RngStream& rng) {
  if (n == 0) throw ConfigError("sample_prior: n must be at least 1");
  const Eigen::LLT<Eigen::MatrixXd> llt(prior.cov);
  if (llt.info() != Eigen::Success) throw ConfigError("sample_prior: prior covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  std::vector<HyperParams> out;
  out.reserve(n);
  Eigen::VectorXd e(prior.mean.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = rng.normal();
    out.push_back(prior.at(prior.mean + chol * e));
  }
  return out;
}

}  // namespace mfpof
