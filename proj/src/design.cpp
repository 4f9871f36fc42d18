#include "mfpof/design.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "mfpof/error.hpp"

namespace mfpof {

namespace {

// Uniform position inside stratum j of n, kept clear of the edges so that
// floor(u * n) recovers j after rounding.
double draw_in_stratum(std::size_t j, std::size_t n, RngStream& rng) {
  constexpr double kMargin = 1e-9;
  const double u = kMargin + rng.uniform() * (1.0 - 2.0 * kMargin);
  return (static_cast<double>(j) + u) / static_cast<double>(n);
}

// Deepest level containing row i.
std::size_t depth_of(const std::vector<std::size_t>& sizes, std::size_t row) {
  std::size_t depth = 0;
  while (depth + 1 < sizes.size() && row < sizes[depth + 1]) ++depth;
  return depth;
}

bool better(const std::pair<double, double>& a, const std::pair<double, double>& b) {
  return a.first > b.first || (a.first == b.first && a.second > b.second);
}

}  // namespace

void validate_design_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw ConfigError("design: at least one level is required");
  if (sizes.back() == 0) throw ConfigError("design: level sizes must be positive");
  for (std::size_t s = 0; s + 1 < sizes.size(); ++s) {
    if (sizes[s] <= sizes[s + 1]) throw ConfigError("design: level sizes must be strictly decreasing");
    if (sizes[s] % sizes[s + 1] != 0)
      throw ConfigError("design: size " + std::to_string(sizes[s]) + " is not a multiple of " +
                        std::to_string(sizes[s + 1]));
  }
}

std::size_t stratum(double u, std::size_t n) noexcept {
  const double scaled = std::floor(u * static_cast<double>(n));
  if (scaled <= 0.0) return 0;
  return std::min(n - 1, static_cast<std::size_t>(scaled));
}

Eigen::MatrixXd NestedDesign::level(std::size_t s) const {
  if (s >= sizes.size()) throw DomainError("design level out of range");
  return points.topRows(static_cast<Eigen::Index>(sizes[s]));
}

void NestedDesign::validate() const {
  validate_design_sizes(sizes);
  if (static_cast<std::size_t>(points.rows()) != sizes.front()) throw ConfigError("design: point count mismatch");
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const std::size_t n = sizes[s];
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      std::vector<char> seen(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = points(static_cast<Eigen::Index>(i), k);
        if (!(u >= 0.0 && u <= 1.0)) throw ConfigError("design: point outside the unit cube");
        char& slot = seen[stratum(u, n)];
        if (slot) throw ConfigError("design: level " + std::to_string(s + 1) + " is not a Latin hypercube");
        slot = 1;
      }
    }
  }
}

NestedDesign generate_nlhs(std::size_t d, const std::vector<std::size_t>& sizes, RngStream& rng) {
  if (d == 0) throw ConfigError("design: dimension must be positive");
  validate_design_sizes(sizes);
  NestedDesign out;
  out.sizes = sizes;
  out.points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes.front()), static_cast<Eigen::Index>(d));

  std::size_t filled = 0;
  for (std::size_t s = sizes.size(); s-- > 0;) {
    const std::size_t n = sizes[s];
    for (std::size_t k = 0; k < d; ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      std::vector<char> occupied(n, 0);
      for (std::size_t i = 0; i < filled; ++i) occupied[stratum(out.points(static_cast<Eigen::Index>(i), col), n)] = 1;
      std::vector<std::size_t> empty;
      for (std::size_t j = 0; j < n; ++j)
        if (!occupied[j]) empty.push_back(j);
      std::shuffle(empty.begin(), empty.end(), rng.engine());
      for (std::size_t i = filled; i < n; ++i)
        out.points(static_cast<Eigen::Index>(i), col) = draw_in_stratum(empty[i - filled], n, rng);
    }
    filled = n;
  }
  return out;
}

std::pair<double, double> maximin_criterion(const Eigen::MatrixXd& points) {
  double first = std::numeric_limits<double>::infinity();
  double second = first;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      const double dist = (points.row(i) - points.row(j)).norm();
      if (dist < first) {
        second = first;
        first = dist;
      } else if (dist < second) {
        second = dist;
      }
    }
  return {first, second};
}

NestedDesign maximin_improve(const NestedDesign& design, std::size_t iterations, RngStream& rng) {
  design.validate();
  NestedDesign best = design;
  const auto n = static_cast<std::size_t>(best.points.rows());
  if (iterations == 0 || n < 2) return best;

  const std::size_t d = best.dim();
  const std::size_t finest = best.sizes.front();
  auto score = maximin_criterion(best.points);
  Eigen::MatrixXd trial = best.points;

  for (std::size_t it = 0; it < iterations; ++it) {
    const std::size_t row = rng.index(n);
    const auto k = static_cast<Eigen::Index>(rng.index(d));
    const auto r = static_cast<Eigen::Index>(row);
    const bool swap_move = rng.uniform() < 0.5;
    Eigen::Index partner = -1;
    if (swap_move) {
      const std::size_t depth = depth_of(best.sizes, row);
      const std::size_t hi = best.sizes[depth];
      const std::size_t lo = depth + 1 < best.sizes.size() ? best.sizes[depth + 1] : 0;
      if (hi - lo < 2) continue;
      std::size_t other = lo + rng.index(hi - lo - 1);
      if (other >= row) ++other;
      partner = static_cast<Eigen::Index>(other);
      std::swap(trial(r, k), trial(partner, k));
    } else {
      trial(r, k) = draw_in_stratum(stratum(best.points(r, k), finest), finest, rng);
    }

    const auto candidate = maximin_criterion(trial);
    if (better(candidate, score)) {
      score = candidate;
      best.points(r, k) = trial(r, k);
      if (partner >= 0) best.points(partner, k) = trial(partner, k);
    } else {
      trial(r, k) = best.points(r, k);
      if (partner >= 0) trial(partner, k) = best.points(partner, k);
    }
  }
  return best;
}

Eigen::MatrixXd map_to_domain(const Eigen::MatrixXd& unit, const std::vector<std::pair<double, double>>& bounds) {
  if (bounds.size() != static_cast<std::size_t>(unit.cols())) throw ConfigError("map_to_domain: one bound per dimension");
  Eigen::MatrixXd out(unit.rows(), unit.cols());
  for (Eigen::Index k = 0; k < unit.cols(); ++k) {
    const auto& [a, b] = bounds[static_cast<std::size_t>(k)];
    out.col(k) = (a + (b - a) * unit.col(k).array()).matrix();
  }
  return out;
}

void write_design_csv(std::ostream& os, const NestedDesign& design) {
  os << "level";
  for (std::size_t k = 0; k < design.dim(); ++k) os << ",x_" << (k + 1);
  os << '\n' << std::setprecision(17);
  for (std::size_t s = 0; s < design.level_count(); ++s)
    for (std::size_t i = 0; i < design.sizes[s]; ++i) {
      os << (s + 1);
      for (Eigen::Index k = 0; k < design.points.cols(); ++k) os << ',' << design.points(static_cast<Eigen::Index>(i), k);
      os << '\n';
    }
}

NestedDesign read_design_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("level", 0) != 0) throw ConfigError("design CSV: missing header");
  const auto d = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (d == 0) throw ConfigError("design CSV: no coordinate columns");

  std::vector<std::vector<std::vector<double>>> levels;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const std::size_t level = std::stoul(cell);
    if (level == 0) throw ConfigError("design CSV: levels are 1-based");
    std::vector<double> x;
    while (std::getline(ss, cell, ',')) x.push_back(std::stod(cell));
    if (x.size() != d) throw ConfigError("design CSV: wrong column count");
    if (levels.size() < level) levels.resize(level);
    levels[level - 1].push_back(std::move(x));
  }
  if (levels.empty()) throw ConfigError("design CSV: no points");

  // Rebuild the nested ordering: deepest level first, then each shallower level's extra points.
  std::vector<std::vector<double>> master;
  NestedDesign out;
  for (const auto& lvl : levels) out.sizes.push_back(lvl.size());
  for (std::size_t s = levels.size(); s-- > 0;) {
    for (const auto& p : levels[s])
      if (std::find(master.begin(), master.end(), p) == master.end()) master.push_back(p);
    if (master.size() != levels[s].size()) throw ConfigError("design CSV: levels are not nested");
  }
  out.points.resize(static_cast<Eigen::Index>(master.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < master.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) out.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = master[i][k];
  out.validate();
  return out;
}

}  // namespace mfpof
