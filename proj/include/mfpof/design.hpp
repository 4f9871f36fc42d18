#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpof/rng.hpp"

namespace mfpof {

/// Nested Latin hypercube design on the unit cube.
///
/// Level 0 is the largest (lowest-fidelity) design; level s holds the first
/// sizes[s] rows of `points`, so every level is a subset of the level before
/// it. Each level is a Latin hypercube: in every dimension its n_s points
/// occupy the n_s equal-width strata of [0, 1) once each.
struct NestedDesign {
  std::vector<std::size_t> sizes;
  Eigen::MatrixXd points;  // sizes[0] x d

  [[nodiscard]] std::size_t level_count() const noexcept { return sizes.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
  [[nodiscard]] Eigen::MatrixXd level(std::size_t s) const;
  /// Throws ConfigError unless sizes are strictly decreasing with exact
  /// divisibility and every level is a Latin hypercube.
  void validate() const;
};

/// Stratum index of u in [0, 1] for n equal-width strata.
[[nodiscard]] std::size_t stratum(double u, std::size_t n) noexcept;

/// Throws ConfigError unless sizes are positive, strictly decreasing and each
/// a multiple of the next.
void validate_design_sizes(const std::vector<std::size_t>& sizes);

/// Builds the design bottom-up: an LHS of the smallest size, then each larger
/// level refines every stratum and fills the empty sub-strata with new points.
[[nodiscard]] NestedDesign generate_nlhs(std::size_t d, const std::vector<std::size_t>& sizes, RngStream& rng);

/// Smallest and second-smallest pairwise Euclidean distance at level 0
/// (+inf when fewer points).
[[nodiscard]] std::pair<double, double> maximin_criterion(const Eigen::MatrixXd& points);

/// Random nesting-preserving moves (within-stratum jitter on the finest grid,
/// coordinate swaps between points of the same nesting depth), accepting only
/// lexicographic improvements of maximin_criterion.
[[nodiscard]] NestedDesign maximin_improve(const NestedDesign& design, std::size_t iterations, RngStream& rng);

/// Affine map of unit-cube rows onto prod [a_k, b_k].
[[nodiscard]] Eigen::MatrixXd map_to_domain(const Eigen::MatrixXd& unit, const std::vector<std::pair<double, double>>& bounds);

/// CSV with header "level,x_1,..,x_d"; levels are 1-based and every level lists all its points.
void write_design_csv(std::ostream& os, const NestedDesign& design);
[[nodiscard]] NestedDesign read_design_csv(std::istream& is);

}  // namespace mfpof
