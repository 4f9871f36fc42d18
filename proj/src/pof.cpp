#include "mfpof/pof.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>

#include "mfpof/error.hpp"
#include "mfpof/parallel.hpp"

namespace mfpof {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

InputSampler uniform_inputs(std::vector<std::pair<double, double>> bounds) {
  if (bounds.empty()) throw ConfigError("uniform_inputs: no bounds");
  for (const auto& [a, b] : bounds)
    if (!(a < b)) throw ConfigError("uniform_inputs: bounds need a < b");
  return [bounds = std::move(bounds)](std::size_t m, RngStream& rng) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(bounds.size()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const auto& [a, b] = bounds[static_cast<std::size_t>(k)];
        x(i, k) = rng.uniform(a, b);
      }
    return x;
  };
}

void PofConfig::validate() const {
  if (m_inputs == 0) throw ConfigError("PofConfig: m_inputs must be at least 1");
  if (q_paths == 0) throw ConfigError("PofConfig: q_paths must be at least 1");
  if (!input_sampler) throw ConfigError("PofConfig: no input sampler");
  if (!std::isfinite(z_crit)) throw ConfigError("PofConfig: z_crit must be finite");
}

std::vector<double> PofSampleSet::flattened() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index r = 0; r < samples.rows(); ++r)
    for (Eigen::Index c = 0; c < samples.cols(); ++c) out.push_back(samples(r, c));
  return out;
}

PofSampleSet sample_pof(const PathModel& model, std::size_t p, const PofConfig& cfg) {
  cfg.validate();
  if (p == 0) throw ConfigError("sample_pof: no hyper-parameter samples");
  const RngStream root(cfg.seed);
  const auto q = static_cast<Eigen::Index>(cfg.q_paths);

  std::vector<Eigen::VectorXd> rows(p);
  std::vector<std::string> failures(p);
  parallel_for(p, [&](std::size_t j) {
    const RngStream stream = root.derive(j);
    RngStream input_rng = stream.derive(0);
    RngStream path_rng = stream.derive(1);
    const Eigen::MatrixXd inputs = cfg.input_sampler(cfg.m_inputs, input_rng);
    try {
      const PathDraw draw = model(j, inputs, cfg.q_paths, path_rng);
      if (draw.paths.rows() != q || draw.paths.cols() != inputs.rows())
        throw ConfigError("sample_pof: path model returned a matrix of the wrong shape");
      if (!(draw.noise_variance > 0.0)) throw ModelError("non-positive noise variance at the reference level");
      const double inv_sd = 1.0 / std::sqrt(draw.noise_variance);
      Eigen::VectorXd row(q);
      for (Eigen::Index l = 0; l < q; ++l) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < draw.paths.cols(); ++i) acc += normal_cdf((draw.paths(l, i) - cfg.z_crit) * inv_sd);
        row[l] = std::clamp(acc / static_cast<double>(draw.paths.cols()), 0.0, 1.0);
      }
      rows[j] = std::move(row);
    } catch (const ModelError& e) {
      failures[j] = "theta " + std::to_string(j) + " skipped: " + e.what();
    }
  });

  PofSampleSet out;
  out.z_crit = cfg.z_crit;
  out.t_ref = cfg.t_ref;
  out.m_inputs = cfg.m_inputs;
  out.q_paths = cfg.q_paths;
  for (std::size_t j = 0; j < p; ++j)
    if (!failures[j].empty()) out.warnings.push_back(failures[j]);
  if (static_cast<double>(out.warnings.size()) > 0.1 * static_cast<double>(p))
    throw ModelError("sample_pof: " + std::to_string(out.warnings.size()) + " of " + std::to_string(p) +
                     " hyper-parameter samples failed");
  out.samples.resize(static_cast<Eigen::Index>(p - out.warnings.size()), q);
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < p; ++j) {
    if (!failures[j].empty()) continue;
    out.samples.row(r++) = rows[j].transpose();
    out.theta_index.push_back(j);
  }
  return out;
}

PofSampleSet sample_pof(const MfDataset& data, const std::vector<HyperParams>& thetas, const PofConfig& cfg) {
  const std::size_t ref_level = data.level_of(cfg.t_ref);
  const auto shared = std::make_shared<const MfDataset>(data);
  const PathModel model = [&](std::size_t j, const Eigen::MatrixXd& inputs, std::size_t q, RngStream& rng) {
    const GpPosterior gp = GpPosterior::fit(thetas[j], shared);
    PathDraw draw;
    draw.noise_variance = thetas[j].noise_variance(ref_level);
    draw.paths = gp.sample_paths(inputs, Eigen::VectorXd::Constant(inputs.rows(), cfg.t_ref), q, rng);
    return draw;
  };
  return sample_pof(model, thetas.size(), cfg);
}

double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile probability outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

const CredibleInterval& PofSummary::at(double level) const {
  for (const auto& ci : intervals)
    if (std::fabs(ci.level - level) < 1e-12) return ci;
  throw DomainError("summary has no interval at level " + std::to_string(level));
}

PofSummary summarize(std::vector<double> values, const std::vector<double>& levels) {
  if (values.empty()) throw ConfigError("summarize: empty sample");
  std::sort(values.begin(), values.end());
  PofSummary out;
  out.median = quantile_sorted(values, 0.5);
  for (double g : levels) {
    if (!(g > 0.0 && g < 1.0)) throw DomainError("summarize: interval level must lie in (0, 1)");
    out.intervals.push_back({g, quantile_sorted(values, (1.0 - g) / 2.0), quantile_sorted(values, (1.0 + g) / 2.0)});
  }
  return out;
}

PofSummary summarize(const PofSampleSet& samples, const std::vector<double>& levels) {
  return summarize(samples.flattened(), levels);
}

std::vector<CoveragePoint> coverage_report(const std::vector<PofSummary>& experiments, double reference,
                                           const std::vector<double>& levels) {
  if (experiments.empty()) throw ConfigError("coverage_report: no experiments");
  std::vector<CoveragePoint> out;
  for (double g : levels) {
    CoveragePoint pt;
    pt.level = g;
    for (const auto& e : experiments)
      if (e.at(g).contains(reference)) ++pt.hits;
    pt.coverage = static_cast<double>(pt.hits) / static_cast<double>(experiments.size());
    out.push_back(pt);
  }
  return out;
}

std::vector<double> default_level_grid() {
  std::vector<double> out;
  for (int k = 5; k <= 95; k += 5) out.push_back(k / 100.0);
  out.push_back(0.99);
  return out;
}

void write_pof_csv(std::ostream& os, const PofSampleSet& set) {
  os << "j,l,p\n" << std::setprecision(17);
  for (Eigen::Index r = 0; r < set.samples.rows(); ++r)
    for (Eigen::Index l = 0; l < set.samples.cols(); ++l)
      os << set.theta_index[static_cast<std::size_t>(r)] << ',' << l << ',' << set.samples(r, l) << '\n';
}

}  // namespace mfpof
