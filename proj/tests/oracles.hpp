#pragma once

// Straightforward reference implementations used to check the library. They
// share no code with it: long-double arithmetic, explicit inverses and plain
// loops instead of Cholesky factors and SIMD rows.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

inline long double matern52(long double h) {
  const long double s = std::sqrt(5.0L) * h;
  return (1.0L + s + 5.0L * h * h / 3.0L) * std::exp(-s);
}

struct Kernel {
  double sigma0_sq = 1.0;
  std::vector<double> rho0;
  double g_ratio = 0.0;
  std::vector<double> rho_eps;
  double degree_L = 1.0;
  double t_lf = 1.0;
  bool stationary = false;
};

inline long double distance(const double* a, const double* b, const std::vector<double>& rho) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const long double h = (static_cast<long double>(a[k]) - b[k]) / rho[k];
    acc += h * h;
  }
  return std::sqrt(acc);
}

inline long double cov(const Kernel& p, const double* x, double t, const double* x2, double t2) {
  const long double c0 = p.sigma0_sq * matern52(distance(x, x2, p.rho0));
  if (p.stationary) return c0;
  const long double r = std::pow(static_cast<long double>(std::min(t, t2)) / p.t_lf, static_cast<long double>(p.degree_L));
  return c0 + r * p.sigma0_sq * p.g_ratio * matern52(distance(x, x2, p.rho_eps));
}

// Rows of x are points.
inline LMatrix gram(const Kernel& p, const Eigen::MatrixXd& xa, const Eigen::VectorXd& ta, const Eigen::MatrixXd& xb,
                    const Eigen::VectorXd& tb) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ra = xa, rb = xb;
  LMatrix k(xa.rows(), xb.rows());
  for (Eigen::Index i = 0; i < xa.rows(); ++i)
    for (Eigen::Index j = 0; j < xb.rows(); ++j) k(i, j) = cov(p, ra.row(i).data(), ta[i], rb.row(j).data(), tb[j]);
  return k;
}

struct Kriging {
  long double beta = 0.0L;
  LVector mean;
  LMatrix cov;
};

// Ordinary kriging with an explicit inverse of K.
inline Kriging ordinary_kriging(const LMatrix& k, const LVector& z, const LMatrix& k_cross, const LMatrix& k_targets) {
  const LMatrix kinv = k.fullPivLu().inverse();
  const LVector one = LVector::Ones(k.rows());
  const long double a = one.dot(kinv * one);
  Kriging out;
  out.beta = one.dot(kinv * z) / a;
  const LMatrix w = kinv * k_cross;  // n x m
  out.mean = LVector::Constant(k_cross.cols(), out.beta) + w.transpose() * (z - out.beta * one);
  const LVector u = LVector::Ones(k_cross.cols()) - w.transpose() * one;
  out.cov = k_targets - k_cross.transpose() * w + u * u.transpose() / a;
  return out;
}

// log of the integral over m of N(z; m 1, K), by composite Simpson quadrature
// in m. The integrand is a Gaussian bump; the window covers +-40 of its widths
// and is clipped to [-1e6, 1e6].
inline long double integrated_log_likelihood_quadrature(const LMatrix& k, const LVector& z, int intervals = 20000) {
  const auto n = k.rows();
  const LMatrix kinv = k.fullPivLu().inverse();
  const long double log_det = std::log(k.fullPivLu().determinant());
  const LVector one = LVector::Ones(n);
  const long double a = one.dot(kinv * one);
  const long double centre = one.dot(kinv * z) / a;
  const long double width = 1.0L / std::sqrt(a);
  const long double lo = std::max(-1e6L, centre - 40.0L * width);
  const long double hi = std::min(1e6L, centre + 40.0L * width);
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double log_norm = -0.5L * (n * std::log(2.0L * pi) + log_det);
  // Integrand relative to its peak value to avoid underflow.
  const LVector rc = z - centre * one;
  const long double q0 = rc.dot(kinv * rc);
  const auto f = [&](long double m) {
    const LVector r = z - m * one;
    return std::exp(-0.5L * (r.dot(kinv * r) - q0));
  };
  const long double h = (hi - lo) / intervals;
  long double acc = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0L : 2.0L) * f(lo + i * h);
  return log_norm - 0.5L * q0 + std::log(acc * h / 3.0L);
}

// exp(M) for a 2x2 matrix by scaling and squaring with a long Taylor series.
inline Eigen::Matrix<long double, 2, 2> expm2(const Eigen::Matrix<long double, 2, 2>& m) {
  int squarings = 0;
  long double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.01L) {
    norm /= 2.0L;
    ++squarings;
  }
  const Eigen::Matrix<long double, 2, 2> a = m / std::ldexp(1.0L, squarings);
  Eigen::Matrix<long double, 2, 2> term = Eigen::Matrix<long double, 2, 2>::Identity();
  Eigen::Matrix<long double, 2, 2> sum = term;
  for (int i = 1; i < 30; ++i) {
    term = term * a / static_cast<long double>(i);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace oracle
