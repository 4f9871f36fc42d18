#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "mfpof/covkernel.hpp"
#include "mfpof/error.hpp"

using namespace mfpof;

TEST_SUITE("covkernel") {

TEST_CASE("matern52 reference values") {
  CHECK(matern52(0.0) == 1.0);
  // (1 + sqrt5 + 5/3) exp(-sqrt5), evaluated in long double.
  CHECK(matern52(1.0) == doctest::Approx(static_cast<double>(oracle::matern52(1.0L))).epsilon(1e-14));
  CHECK(matern52(1.0) == doctest::Approx(0.5239941088318203).epsilon(1e-14));
  CHECK(matern52(50.0) < 1e-40);
  CHECK_THROWS_AS((void)matern52(-1e-12), DomainError);
  CHECK_THROWS_AS((void)matern52(std::nan("")), DomainError);
}

TEST_CASE("matern52 decreases with distance") {
  double prev = matern52(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double v = matern52(0.025 * i);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("scaled_distance") {
  const std::vector<double> rho{2.0, 1.0};
  CHECK(scaled_distance(std::vector{1.0, 0.0}, std::vector{0.0, 0.0}, rho) == 0.5);
  CHECK(scaled_distance(std::vector{3.0, 4.0}, std::vector{0.0, 0.0}, std::vector{1.0, 1.0}) == 5.0);
  CHECK(scaled_distance(std::vector{0.3, 0.7}, std::vector{0.3, 0.7}, rho) == 0.0);
  CHECK_THROWS_AS((void)scaled_distance(std::vector{1.0}, std::vector{0.0, 0.0}, rho), DomainError);
}

TEST_CASE("fidelity_cov limits") {
  CHECK(fidelity_cov(1.0, 1.0, 3.7, 1.0) == 1.0);
  CHECK(fidelity_cov(0.0, 0.4, 3.7, 1.0) == 0.0);
  CHECK(fidelity_cov(0.5, 0.5, 4.0, 1.0) == 0.0625);
  CHECK(fidelity_cov(0.2, 0.5, 2.0, 1.0) == doctest::Approx(0.04));
  CHECK_THROWS_AS((void)fidelity_cov(1.5, 0.5, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS((void)fidelity_cov(-0.1, 0.5, 2.0, 1.0), DomainError);
}

TEST_CASE("mf_cov variance and composition") {
  RngStream rng(11);
  const KernelParams p = testutil::random_kernel(2, rng);
  const std::vector<double> x{0.2, 0.9};
  CHECK(mf_cov(p, x, p.t_lf, x, p.t_lf) == doctest::Approx(p.sigma0_sq * (1.0 + p.g_ratio)).epsilon(1e-14));
  CHECK(mf_cov(p, x, 0.0, x, 0.0) == doctest::Approx(p.sigma0_sq).epsilon(1e-14));
  CHECK(mf_cov(p, x, 1e-9, x, 1e-9) == doctest::Approx(p.sigma0_sq).epsilon(1e-9));

  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()};
    const double ta = rng.uniform(0.0, 1.0), tb = rng.uniform(0.0, 1.0);
    const double expected = p.sigma0_sq * matern52(scaled_distance(a, b, p.rho0)) +
                            fidelity_cov(ta, tb, p.degree_L, p.t_lf) * p.sigma0_sq * p.g_ratio *
                                matern52(scaled_distance(a, b, p.rho_eps));
    CHECK(mf_cov(p, a, ta, b, tb) == doctest::Approx(expected).epsilon(1e-14));
    const auto o = testutil::to_oracle(p);
    CHECK(mf_cov(p, a, ta, b, tb) == doctest::Approx(static_cast<double>(oracle::cov(o, a.data(), ta, b.data(), tb))).epsilon(1e-13));
  }
}

TEST_CASE("cov_matrix small cases") {
  KernelParams p;
  p.rho0 = {0.5};
  p.rho_eps = {0.3};
  p.sigma0_sq = 2.0;
  p.g_ratio = 0.5;
  const std::vector<MfPoint> one{{{0.4}, 0.7}};
  const std::vector<double> no_noise{0.0};
  const Eigen::MatrixXd k1 = cov_matrix(p, one, no_noise);
  REQUIRE(k1.rows() == 1);
  CHECK(k1(0, 0) == doctest::Approx(mf_cov(p, one[0].x, 0.7, one[0].x, 0.7)).epsilon(1e-15));

  const std::vector<MfPoint> twin{{{0.4}, 0.7}, {{0.4}, 0.7}};
  const std::vector<double> v{0.3, 0.3};
  const Eigen::MatrixXd k2 = cov_matrix(p, twin, v);
  CHECK(k2(0, 1) == doctest::Approx(k2(0, 0) - 0.3).epsilon(1e-15));
  CHECK(k2(1, 0) == k2(0, 1));
  CHECK_THROWS_AS((void)cov_matrix(p, twin, no_noise), DomainError);
}

TEST_CASE("cross_cov matches the long-double oracle") {
  RngStream rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 1 + rep % 3;
    KernelParams p = testutil::random_kernel(d, rng);
    p.stationary = rep % 5 == 0;
    const Eigen::MatrixXd xa = testutil::random_points(7 + rep, d, rng);
    const Eigen::MatrixXd xb = testutil::random_points(3 + rep % 9, d, rng);
    const Eigen::VectorXd ta = testutil::random_fidelities(xa.rows(), rng);
    const Eigen::VectorXd tb = testutil::random_fidelities(xb.rows(), rng);
    const Eigen::MatrixXd k = cross_cov(p, xa, ta, xb, tb);
    CHECK(testutil::max_rel_diff(k, oracle::gram(testutil::to_oracle(p), xa, ta, xb, tb)) < 1e-13);
  }
}

TEST_CASE("cov_matrix is symmetric, stationary in x and positive semi-definite") {
  RngStream rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    const KernelParams p = testutil::random_kernel(2, rng);
    const Eigen::MatrixXd x = testutil::random_points(20, 2, rng);
    const Eigen::VectorXd t = testutil::random_fidelities(20, rng);
    const std::vector<double> noise(20, 0.0);
    const Eigen::MatrixXd k = cov_matrix(p, x, t, noise);
    CHECK(k == k.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * k.diagonal().maxCoeff());

    // Shifting every input by the same vector leaves K unchanged.
    Eigen::MatrixXd shifted = x;
    shifted.col(0).array() += 3.25;
    shifted.col(1).array() -= 1.5;
    CHECK((cov_matrix(p, shifted, t, noise) - k).cwiseAbs().maxCoeff() < 1e-12 * k.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("cholesky_with_jitter") {
  // Rank-one matrix: needs jitter.
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, 3.0;
  const Eigen::MatrixXd k = v * v.transpose();
  const JitteredCholesky f = cholesky_with_jitter(k);
  CHECK(f.jitter > 0.0);
  CHECK(f.jitter <= 1e-6 * k.diagonal().mean() * (1 + 1e-12));
  const Eigen::MatrixXd rebuilt = f.lower * f.lower.transpose();
  CHECK((rebuilt - k - f.jitter * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  // Well-conditioned: no jitter and an exact lower factor.
  const Eigen::MatrixXd spd = k + Eigen::MatrixXd::Identity(3, 3);
  const JitteredCholesky g = cholesky_with_jitter(spd);
  CHECK(g.jitter == 0.0);
  CHECK(g.lower.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0));

  Eigen::MatrixXd bad = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS((void)cholesky_with_jitter(bad), ModelError);

  // The in-place variant leaves the strict upper triangle alone.
  Eigen::MatrixXd inplace = spd;
  CHECK(cholesky_in_place(inplace) == 0.0);
  CHECK(inplace(0, 2) == spd(0, 2));
  CHECK(inplace.triangularView<Eigen::Lower>().toDenseMatrix().isApprox(g.lower, 1e-15));
}

TEST_CASE("kernel validation") {
  KernelParams p;
  p.rho0 = {1.0};
  p.rho_eps = {1.0};
  CHECK_NOTHROW(p.validate());
  p.g_ratio = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.g_ratio = 1.0;
  p.rho_eps = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.stationary = true;
  CHECK_NOTHROW(p.validate());
}

}
