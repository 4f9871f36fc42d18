#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mfpof {

/// Natural-scale parameters of the multi-fidelity covariance
///   k((x,t),(x',t')) = c0(x - x') + r(t,t') * c_eps(x - x')
/// with c0 = sigma0_sq * M52(|h / rho0|), c_eps = sigma0_sq * g_ratio * M52(|h / rho_eps|)
/// and r(t,t') = (min(t,t') / t_lf)^degree_L.
///
/// When `stationary` is set only c0 is used (single-level model) and the
/// error-process fields are ignored.
struct KernelParams {
  double sigma0_sq = 1.0;
  std::vector<double> rho0;
  double g_ratio = 1.0;
  std::vector<double> rho_eps;
  double degree_L = 4.0;
  double t_lf = 1.0;
  bool stationary = false;

  [[nodiscard]] std::size_t dim() const noexcept { return rho0.size(); }
  /// Throws DomainError unless every field is finite and strictly positive.
  void validate() const;
};

/// A point of the joint input/fidelity space.
struct MfPoint {
  std::vector<double> x;
  double t = 0.0;
};

/// Matérn 5/2 correlation (1 + sqrt5 h + 5/3 h^2) exp(-sqrt5 h); h >= 0.
[[nodiscard]] double matern52(double h);

/// sqrt(sum_k ((x_k - x2_k) / rho_k)^2).
[[nodiscard]] double scaled_distance(std::span<const double> x, std::span<const double> x2,
                                     std::span<const double> rho);

/// (min(t, t2) / t_lf)^degree_L for 0 <= t, t2 <= t_lf.
[[nodiscard]] double fidelity_cov(double t, double t2, double degree_L, double t_lf);

[[nodiscard]] double mf_cov(const KernelParams& p, std::span<const double> x, double t, std::span<const double> x2,
                            double t2);

/// Gram matrix between two point sets, each given as an n x d input matrix and
/// n fidelity values. Rows are evaluated with the dispatched SIMD kernel.
[[nodiscard]] Eigen::MatrixXd cross_cov(const KernelParams& p, const Eigen::MatrixXd& xa, const Eigen::VectorXd& ta,
                                        const Eigen::MatrixXd& xb, const Eigen::VectorXd& tb);

/// Symmetric Gram matrix of one point set with `noise` added on the diagonal.
[[nodiscard]] Eigen::MatrixXd cov_matrix(const KernelParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                         std::span<const double> noise);

/// cov_matrix into a caller-owned buffer, reusing its storage when the size matches.
void fill_cov_matrix(const KernelParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                     std::span<const double> noise, Eigen::MatrixXd& out);

/// Convenience overload for a list of points.
[[nodiscard]] Eigen::MatrixXd cov_matrix(const KernelParams& p, std::span<const MfPoint> points,
                                         std::span<const double> noise);

/// Cholesky factorization with diagonal jitter escalation: tries the matrix as
/// given, then adds 1e-10, 1e-9, ..., 1e-6 times the mean diagonal. Throws
/// ModelError if every attempt fails.
struct JitteredCholesky {
  Eigen::MatrixXd lower;  // L with a zero upper triangle
  double jitter = 0.0;
};
[[nodiscard]] JitteredCholesky cholesky_with_jitter(const Eigen::MatrixXd& k);

/// Same escalation, in place: on return the lower triangle of k holds L and the
/// strict upper triangle is left as it was. The upper triangle must mirror the
/// lower one on entry. Returns the jitter used.
double cholesky_in_place(Eigen::MatrixXd& k);

}  // namespace mfpof
