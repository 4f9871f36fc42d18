#include "mfpof/covkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfpof/error.hpp"
#include "mfpof/simd/kernels.hpp"

namespace mfpof {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Dimension-major copy of x with column k divided by rho[k].
std::vector<double> scaled_columns(const Eigen::MatrixXd& x, std::span<const double> rho) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  std::vector<double> out(n * d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < n; ++j) out[k * n + j] = x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) / rho[k];
  return out;
}

void check_fidelity(double t, double t_lf) {
  if (!(t >= 0.0) || t > t_lf)
    throw DomainError("fidelity value " + std::to_string(t) + " outside [0, t_lf = " + std::to_string(t_lf) + "]");
}

}  // namespace

void KernelParams::validate() const {
  if (!positive_finite(sigma0_sq)) throw DomainError("sigma0_sq must be positive");
  if (rho0.empty()) throw DomainError("kernel dimension must be at least 1");
  for (double r : rho0)
    if (!positive_finite(r)) throw DomainError("rho0 entries must be positive");
  if (stationary) return;
  if (rho_eps.size() != rho0.size()) throw DomainError("rho_eps and rho0 lengths differ");
  for (double r : rho_eps)
    if (!positive_finite(r)) throw DomainError("rho_eps entries must be positive");
  if (!positive_finite(g_ratio)) throw DomainError("g_ratio must be positive");
  if (!positive_finite(degree_L)) throw DomainError("degree_L must be positive");
  if (!positive_finite(t_lf)) throw DomainError("t_lf must be positive");
}

double matern52(double h) {
  if (!(h >= 0.0)) throw DomainError("matern52: negative or NaN distance");
  const double s = std::sqrt(5.0) * h;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double scaled_distance(std::span<const double> x, std::span<const double> x2, std::span<const double> rho) {
  if (x.size() != x2.size() || x.size() != rho.size()) throw DomainError("scaled_distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!positive_finite(rho[k])) throw DomainError("scaled_distance: range must be positive");
    const double h = (x[k] - x2[k]) / rho[k];
    acc += h * h;
  }
  return std::sqrt(acc);
}

double fidelity_cov(double t, double t2, double degree_L, double t_lf) {
  check_fidelity(t, t_lf);
  check_fidelity(t2, t_lf);
  return std::pow(std::min(t, t2) / t_lf, degree_L);
}

double mf_cov(const KernelParams& p, std::span<const double> x, double t, std::span<const double> x2, double t2) {
  const double c0 = p.sigma0_sq * matern52(scaled_distance(x, x2, p.rho0));
  if (p.stationary) return c0;
  const double r = fidelity_cov(t, t2, p.degree_L, p.t_lf);
  return c0 + r * p.sigma0_sq * p.g_ratio * matern52(scaled_distance(x, x2, p.rho_eps));
}

namespace {

// Fills column i of `out` with k(b_j, a_i). With `lower` set only rows j >= i
// are written, which is enough for the symmetric case a == b.
void fill_columns(const KernelParams& p, const Eigen::MatrixXd& xa, const Eigen::VectorXd& ta,
                  const Eigen::MatrixXd& xb, const Eigen::VectorXd& tb, bool lower, Eigen::MatrixXd& out) {
  const auto d = static_cast<std::size_t>(p.dim());
  if (static_cast<std::size_t>(xa.cols()) != d || static_cast<std::size_t>(xb.cols()) != d)
    throw DomainError("cross_cov: input dimension does not match kernel");
  if (ta.size() != xa.rows() || tb.size() != xb.rows()) throw DomainError("cross_cov: fidelity count mismatch");
  if (!p.stationary) {
    for (double t : ta) check_fidelity(t, p.t_lf);
    for (double t : tb) check_fidelity(t, p.t_lf);
  }

  const auto nb = static_cast<std::size_t>(xb.rows());
  const std::vector<double> b0 = scaled_columns(xb, p.rho0);
  const std::vector<double> be = p.stationary ? std::vector<double>{} : scaled_columns(xb, p.rho_eps);

  // Fidelity levels are few, so r(min(t_a, t_b)) is tabulated per column over
  // the distinct values of tb.
  std::vector<double> levels;
  std::vector<std::size_t> level_of(p.stationary ? 0 : nb);
  if (!p.stationary) {
    levels.assign(tb.begin(), tb.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (std::size_t j = 0; j < nb; ++j)
      level_of[j] = static_cast<std::size_t>(
          std::lower_bound(levels.begin(), levels.end(), tb[static_cast<Eigen::Index>(j)]) - levels.begin());
  }

  out.resize(xb.rows(), xa.rows());
  std::vector<double> q0(d), qe(d), fe(p.stationary ? 0 : nb), table(levels.size());
  const double ge = p.sigma0_sq * p.g_ratio;
  for (Eigen::Index i = 0; i < xa.rows(); ++i) {
    const std::size_t first = lower ? static_cast<std::size_t>(i) : 0;
    for (std::size_t k = 0; k < d; ++k) {
      q0[k] = xa(i, static_cast<Eigen::Index>(k)) / p.rho0[k];
      if (!p.stationary) qe[k] = xa(i, static_cast<Eigen::Index>(k)) / p.rho_eps[k];
    }
    if (!p.stationary) {
      for (std::size_t l = 0; l < levels.size(); ++l)
        table[l] = ge * std::pow(std::min(ta[i], levels[l]) / p.t_lf, p.degree_L);
      for (std::size_t j = first; j < nb; ++j) fe[j] = table[level_of[j]];
    }
    simd::MaternRowTask task;
    task.n = nb - first;
    task.d = d;
    task.ld = nb;
    task.q0 = q0.data();
    task.x0 = b0.data() + first;
    task.qe = qe.data();
    task.xe = p.stationary ? nullptr : be.data() + first;
    task.a0 = p.sigma0_sq;
    task.fe = p.stationary ? nullptr : fe.data() + first;
    task.out = out.col(i).data() + first;
    simd::matern_row(task);
  }
}

}  // namespace

Eigen::MatrixXd cross_cov(const KernelParams& p, const Eigen::MatrixXd& xa, const Eigen::VectorXd& ta,
                          const Eigen::MatrixXd& xb, const Eigen::VectorXd& tb) {
  // Column i of the work matrix holds row i of the result.
  Eigen::MatrixXd kt;
  fill_columns(p, xa, ta, xb, tb, false, kt);
  return kt.transpose();
}

void fill_cov_matrix(const KernelParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                     std::span<const double> noise, Eigen::MatrixXd& out) {
  if (noise.size() != static_cast<std::size_t>(x.rows())) throw DomainError("cov_matrix: noise length mismatch");
  fill_columns(p, x, t, x, t, true, out);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) += noise[static_cast<std::size_t>(i)];
}

Eigen::MatrixXd cov_matrix(const KernelParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                           std::span<const double> noise) {
  Eigen::MatrixXd k;
  fill_cov_matrix(p, x, t, noise, k);
  return k;
}

Eigen::MatrixXd cov_matrix(const KernelParams& p, std::span<const MfPoint> points, std::span<const double> noise) {
  const auto d = p.dim();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(d));
  Eigen::VectorXd t(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].x.size() != d) throw DomainError("cov_matrix: point dimension mismatch");
    for (std::size_t k = 0; k < d; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = points[i].x[k];
    t[static_cast<Eigen::Index>(i)] = points[i].t;
  }
  return cov_matrix(p, x, t, noise);
}

double cholesky_in_place(Eigen::MatrixXd& k) {
  if (k.rows() == 0 || k.rows() != k.cols()) throw ModelError("cholesky of an empty or non-square matrix");
  const Eigen::VectorXd diag = k.diagonal();
  // Only the lower triangle is overwritten, so a failed attempt is undone
  // from the upper triangle and the saved diagonal.
  const auto attempt = [&](double jitter) {
    if (jitter > 0.0) {
      k.triangularView<Eigen::StrictlyLower>() = k.transpose();
      k.diagonal() = diag.array() + jitter;
    }
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(k);
    return llt.info() == Eigen::Success;
  };
  if (attempt(0.0)) return 0.0;
  const double mean_diag = diag.mean();
  if (!std::isfinite(mean_diag) || mean_diag <= 0.0) throw ModelError("covariance matrix has non-positive diagonal");
  for (double rel = 1e-10; rel <= 1.000001e-6; rel *= 10.0)
    if (attempt(rel * mean_diag)) return rel * mean_diag;
  throw ModelError("Cholesky factorization failed after jitter escalation");
}

JitteredCholesky cholesky_with_jitter(const Eigen::MatrixXd& k) {
  JitteredCholesky out;
  out.lower = k;
  out.jitter = cholesky_in_place(out.lower);
  out.lower.triangularView<Eigen::StrictlyUpper>().setZero();
  return out;
}

}  // namespace mfpof
