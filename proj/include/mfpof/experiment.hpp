#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mfpof/amh.hpp"
#include "mfpof/oscillator.hpp"
#include "mfpof/pof.hpp"

namespace mfpof {

enum class Variant { kMfFb, kMfMap, kSlFb, kSlMap };

[[nodiscard]] std::string variant_name(Variant v);
[[nodiscard]] Variant parse_variant(const std::string& name);
[[nodiscard]] inline bool is_multi_fidelity(Variant v) { return v == Variant::kMfFb || v == Variant::kMfMap; }
[[nodiscard]] inline bool is_fully_bayesian(Variant v) { return v == Variant::kMfFb || v == Variant::kSlFb; }

/// Settings of the replicated FB-vs-MAP study. Defaults reproduce the
/// damped-oscillator testbed.
struct ExperimentConfig {
  std::vector<std::pair<double, double>> bounds{{0.0, 30.0}, {0.0, 1.0}};
  std::vector<double> levels{1.0, 0.5, 0.1, 0.05, 0.01};
  std::vector<std::size_t> design_sizes{168, 56, 28, 14, 7};
  std::size_t maximin_iterations = 2000;
  double r_out = 40.0;
  double noise_correlation = 0.99;
  double z_crit = 1.0;
  double t_ref = 0.01;
  double t_end = 30.0;
  std::vector<Variant> variants{Variant::kMfFb, Variant::kMfMap, Variant::kSlFb, Variant::kSlMap};
  NoiseScheme scheme = NoiseScheme::kExponentialEuler;
  SpectralConvention convention = SpectralConvention::kTwoPi;
  // Chain settings; the seed field is ignored (derived per replication).
  AmhConfig amh;
  std::size_t map_restarts = 10;
  std::size_t m_inputs = 500;
  std::size_t q_paths = 20;
  std::size_t replications = 240;
  std::uint64_t master_seed = 0;
  std::size_t reference_runs = 1000000;
  /// When set, used as the reference PoF instead of recomputing it.
  std::optional<double> reference_value;
  std::vector<double> coverage_levels = default_level_grid();

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  [[nodiscard]] SimulatorOptions simulator() const;
  [[nodiscard]] std::size_t dim() const noexcept { return bounds.size(); }
};

/// Parses the JSON config schema; unknown keys are errors.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
[[nodiscard]] nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

struct ReferenceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_runs = 0;
};

/// Direct Monte Carlo of P(f(x, t_ref) > z_crit) with x uniform on the bounds.
[[nodiscard]] ReferenceEstimate reference_pof(const ExperimentConfig& cfg, std::size_t n_runs, const RngStream& rng);

/// Gaussian KDE with Silverman's bandwidth 1.06 min(sd, IQR / 1.34) n^(-1/5).
[[nodiscard]] double silverman_bandwidth(const std::vector<double>& samples);
[[nodiscard]] std::vector<double> kde_density(const std::vector<double>& samples, const std::vector<double>& grid);

struct ReplicationRecord {
  std::size_t index = 0;
  std::string status = "ok";
  std::size_t n_observations = 0;
  std::size_t p_used = 0;
  double median = 0.0;
  std::vector<CredibleInterval> intervals;
  std::optional<double> acceptance_rate;
  std::string theta_file;
  std::string pof_file;

  [[nodiscard]] bool ok() const noexcept { return status == "ok"; }
};

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

struct DensityCurve {
  std::vector<double> grid;
  std::optional<std::vector<double>> all;
  std::optional<std::vector<double>> contained;
  std::optional<std::vector<double>> missed;
};

struct VariantReport {
  Variant variant = Variant::kMfFb;
  std::vector<ReplicationRecord> replications;
  std::vector<CoveragePoint> coverage;
  std::size_t failures = 0;
  Histogram median_histogram;
  DensityCurve length_density;  // of the 95% interval lengths

  [[nodiscard]] double coverage_at(double level) const;
};

struct ExperimentReport {
  ExperimentConfig config;
  ReferenceEstimate reference;
  double nominal_reference = 0.0573;  // target value of the oscillator study
  std::vector<VariantReport> variants;
  bool aborted = false;

  [[nodiscard]] const VariantReport& variant(Variant v) const;
};

[[nodiscard]] nlohmann::ordered_json report_to_json(const ExperimentReport& report);
[[nodiscard]] ExperimentReport report_from_json(const nlohmann::ordered_json& j);

/// Per-replication design and observations: fresh nested design (maximin
/// improved) mapped onto the bounds and simulated at each level.
[[nodiscard]] MfDataset replication_dataset(const ExperimentConfig& cfg, std::size_t replication);

/// Runs every replication and variant. When `out_dir` is given, theta samples
/// and PoF samples are written there as CSV and referenced from the report.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Runs one variant on one dataset; exposed for the CLI fit/pof commands.
struct VariantFit {
  std::vector<HyperParams> thetas;
  std::optional<double> acceptance_rate;
  PosteriorSample chain;  // empty for MAP
};
[[nodiscard]] VariantFit fit_variant(const ExperimentConfig& cfg, Variant v, const MfDataset& data, std::uint64_t seed);
[[nodiscard]] PriorSpec variant_prior(const ExperimentConfig& cfg, Variant v);
[[nodiscard]] MfDataset variant_data(const ExperimentConfig& cfg, Variant v, const MfDataset& data);
[[nodiscard]] PofConfig pof_config(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace mfpof
