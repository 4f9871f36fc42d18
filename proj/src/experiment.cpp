#include "mfpof/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "mfpof/design.hpp"
#include "mfpof/error.hpp"
#include "mfpof/parallel.hpp"

namespace mfpof {

using json = nlohmann::ordered_json;

namespace {

// Stream labels under a replication seed.
constexpr std::uint64_t kDesignStream = 0;
constexpr std::uint64_t kMaximinStream = 1;
constexpr std::uint64_t kSimulationStream = 2;
constexpr std::uint64_t kVariantStream = 16;
constexpr std::uint64_t kReferenceStream = 0x5245460000000000ULL;

std::string scheme_name(NoiseScheme s) { return s == NoiseScheme::kExponentialEuler ? "euler" : "exact"; }
NoiseScheme parse_scheme(const std::string& s) {
  if (s == "euler") return NoiseScheme::kExponentialEuler;
  if (s == "exact") return NoiseScheme::kExactOu;
  throw ConfigError("unknown simulator scheme '" + s + "' (expected euler or exact)");
}
std::string convention_name(SpectralConvention c) { return c == SpectralConvention::kTwoPi ? "two_pi" : "unit"; }
SpectralConvention parse_convention(const std::string& s) {
  if (s == "two_pi") return SpectralConvention::kTwoPi;
  if (s == "unit") return SpectralConvention::kUnit;
  throw ConfigError("unknown spectral convention '" + s + "' (expected two_pi or unit)");
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
}

json interval_json(const CredibleInterval& ci) {
  return json{{"level", ci.level}, {"lower", ci.lower}, {"upper", ci.upper}, {"length", ci.length()}};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins));
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

bool has_spread(const std::vector<double>& v) {
  return v.size() >= 2 && *std::max_element(v.begin(), v.end()) > *std::min_element(v.begin(), v.end());
}

DensityCurve length_density(const std::vector<ReplicationRecord>& reps, double reference) {
  std::vector<double> all, in, out;
  for (const auto& r : reps) {
    if (!r.ok()) continue;
    for (const auto& ci : r.intervals)
      if (ci.level == 0.95) {
        all.push_back(ci.length());
        (ci.contains(reference) ? in : out).push_back(ci.length());
      }
  }
  DensityCurve d;
  if (!has_spread(all)) return d;
  const double bw = silverman_bandwidth(all);
  const double lo = std::max(0.0, *std::min_element(all.begin(), all.end()) - 4.0 * bw);
  const double hi = *std::max_element(all.begin(), all.end()) + 4.0 * bw;
  constexpr int kPoints = 101;
  for (int i = 0; i < kPoints; ++i) d.grid.push_back(lo + (hi - lo) * i / (kPoints - 1));
  d.all = kde_density(all, d.grid);
  if (has_spread(in)) d.contained = kde_density(in, d.grid);
  if (has_spread(out)) d.missed = kde_density(out, d.grid);
  return d;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kMfFb:
      return "mf-fb";
    case Variant::kMfMap:
      return "mf-map";
    case Variant::kSlFb:
      return "sl-fb";
    case Variant::kSlMap:
      return "sl-map";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::kMfFb, Variant::kMfMap, Variant::kSlFb, Variant::kSlMap})
    if (variant_name(v) == name) return v;
  throw ConfigError("unknown model variant '" + name + "' (expected mf-fb, mf-map, sl-fb or sl-map)");
}

void ExperimentConfig::validate() const {
  if (bounds.empty()) throw ConfigError("config: bounds must list at least one dimension");
  for (const auto& [a, b] : bounds)
    if (!(a < b)) throw ConfigError("config: bounds need a < b");
  if (levels.empty()) throw ConfigError("config: at least one fidelity level");
  for (std::size_t s = 0; s + 1 < levels.size(); ++s)
    if (!(levels[s] > levels[s + 1])) throw ConfigError("config: levels must be strictly decreasing");
  if (!(levels.back() > 0.0)) throw ConfigError("config: levels must be positive");
  if (design_sizes.size() != levels.size()) throw ConfigError("config: one design size per level");
  validate_design_sizes(design_sizes);
  if (std::find(levels.begin(), levels.end(), t_ref) == levels.end())
    throw ConfigError("config: t_ref must be one of the levels");
  if (!(r_out > 0.0)) throw ConfigError("config: r_out must be positive");
  if (!(noise_correlation >= 0.0 && noise_correlation < 1.0))
    throw ConfigError("config: noise_correlation must lie in [0, 1)");
  if (variants.empty()) throw ConfigError("config: no model variant selected");
  if (replications == 0) throw ConfigError("config: replications must be at least 1");
  if (map_restarts == 0) throw ConfigError("config: map_restarts must be at least 1");
  if (m_inputs == 0 || q_paths == 0) throw ConfigError("config: m_inputs and q_paths must be at least 1");
  if (!reference_value && reference_runs < 1000) throw ConfigError("config: reference_runs must be at least 1000");
  for (double g : coverage_levels)
    if (!(g > 0.0 && g < 1.0)) throw ConfigError("config: coverage levels must lie in (0, 1)");
  if (std::find(coverage_levels.begin(), coverage_levels.end(), 0.95) == coverage_levels.end())
    throw ConfigError("config: coverage_levels must include 0.95");
  amh.validate();
}

SimulatorOptions ExperimentConfig::simulator() const {
  SimulatorOptions opt;
  opt.scheme = scheme;
  opt.intensity = noise_intensity(convention);
  return opt;
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> kKeys{
      "bounds", "levels", "design_sizes", "maximin_iterations", "r_out", "noise_correlation", "z_crit",
      "t_ref", "t_end", "variants", "simulator", "amh", "map_restarts", "pof", "replications", "master_seed",
      "reference_runs", "reference_value", "coverage_levels"};
  reject_unknown(j, kKeys, "");
  ExperimentConfig cfg;
  if (j.contains("bounds")) cfg.bounds = get_as<std::vector<std::pair<double, double>>>(j["bounds"], "bounds");
  if (j.contains("levels")) cfg.levels = get_as<std::vector<double>>(j["levels"], "levels");
  if (j.contains("design_sizes")) cfg.design_sizes = get_as<std::vector<std::size_t>>(j["design_sizes"], "design_sizes");
  if (j.contains("maximin_iterations"))
    cfg.maximin_iterations = get_as<std::size_t>(j["maximin_iterations"], "maximin_iterations");
  if (j.contains("r_out")) cfg.r_out = get_as<double>(j["r_out"], "r_out");
  if (j.contains("noise_correlation")) cfg.noise_correlation = get_as<double>(j["noise_correlation"], "noise_correlation");
  if (j.contains("z_crit")) cfg.z_crit = get_as<double>(j["z_crit"], "z_crit");
  if (j.contains("t_ref")) cfg.t_ref = get_as<double>(j["t_ref"], "t_ref");
  if (j.contains("t_end")) cfg.t_end = get_as<double>(j["t_end"], "t_end");
  if (j.contains("variants")) {
    cfg.variants.clear();
    for (const auto& name : get_as<std::vector<std::string>>(j["variants"], "variants"))
      cfg.variants.push_back(parse_variant(name));
  }
  if (j.contains("simulator")) {
    const json& s = j["simulator"];
    reject_unknown(s, {"scheme", "convention"}, "simulator.");
    if (s.contains("scheme")) cfg.scheme = parse_scheme(get_as<std::string>(s["scheme"], "simulator.scheme"));
    if (s.contains("convention"))
      cfg.convention = parse_convention(get_as<std::string>(s["convention"], "simulator.convention"));
  }
  if (j.contains("amh")) {
    const json& a = j["amh"];
    reject_unknown(a, {"n_iterations", "burn_in", "thin", "adaptation_start", "scale", "eps"}, "amh.");
    if (a.contains("n_iterations")) cfg.amh.n_iterations = get_as<std::size_t>(a["n_iterations"], "amh.n_iterations");
    if (a.contains("burn_in")) cfg.amh.burn_in = get_as<std::size_t>(a["burn_in"], "amh.burn_in");
    if (a.contains("thin")) cfg.amh.thin = get_as<std::size_t>(a["thin"], "amh.thin");
    if (a.contains("adaptation_start"))
      cfg.amh.adaptation_start = get_as<std::size_t>(a["adaptation_start"], "amh.adaptation_start");
    if (a.contains("scale")) cfg.amh.scale = get_as<double>(a["scale"], "amh.scale");
    if (a.contains("eps")) cfg.amh.eps = get_as<double>(a["eps"], "amh.eps");
  }
  if (j.contains("map_restarts")) cfg.map_restarts = get_as<std::size_t>(j["map_restarts"], "map_restarts");
  if (j.contains("pof")) {
    const json& p = j["pof"];
    reject_unknown(p, {"m_inputs", "q_paths"}, "pof.");
    if (p.contains("m_inputs")) cfg.m_inputs = get_as<std::size_t>(p["m_inputs"], "pof.m_inputs");
    if (p.contains("q_paths")) cfg.q_paths = get_as<std::size_t>(p["q_paths"], "pof.q_paths");
  }
  if (j.contains("replications")) cfg.replications = get_as<std::size_t>(j["replications"], "replications");
  if (j.contains("master_seed")) cfg.master_seed = get_as<std::uint64_t>(j["master_seed"], "master_seed");
  if (j.contains("reference_runs")) cfg.reference_runs = get_as<std::size_t>(j["reference_runs"], "reference_runs");
  if (j.contains("reference_value")) cfg.reference_value = optional_from<double>(j["reference_value"]);
  if (j.contains("coverage_levels")) cfg.coverage_levels = get_as<std::vector<double>>(j["coverage_levels"], "coverage_levels");
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json variants = json::array();
  for (Variant v : cfg.variants) variants.push_back(variant_name(v));
  return json{{"bounds", cfg.bounds},
              {"levels", cfg.levels},
              {"design_sizes", cfg.design_sizes},
              {"maximin_iterations", cfg.maximin_iterations},
              {"r_out", cfg.r_out},
              {"noise_correlation", cfg.noise_correlation},
              {"z_crit", cfg.z_crit},
              {"t_ref", cfg.t_ref},
              {"t_end", cfg.t_end},
              {"variants", variants},
              {"simulator", {{"scheme", scheme_name(cfg.scheme)}, {"convention", convention_name(cfg.convention)}}},
              {"amh",
               {{"n_iterations", cfg.amh.n_iterations},
                {"burn_in", cfg.amh.burn_in},
                {"thin", cfg.amh.thin},
                {"adaptation_start", cfg.amh.adaptation_start},
                {"scale", cfg.amh.scale},
                {"eps", cfg.amh.eps}}},
              {"map_restarts", cfg.map_restarts},
              {"pof", {{"m_inputs", cfg.m_inputs}, {"q_paths", cfg.q_paths}}},
              {"replications", cfg.replications},
              {"master_seed", cfg.master_seed},
              {"reference_runs", cfg.reference_runs},
              {"reference_value", optional_json(cfg.reference_value)},
              {"coverage_levels", cfg.coverage_levels}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

ReferenceEstimate reference_pof(const ExperimentConfig& cfg, std::size_t n_runs, const RngStream& rng) {
  if (n_runs < 1000) throw ConfigError("reference_pof: n_runs must be at least 1000");
  if (cfg.bounds.size() != 2) throw ConfigError("reference_pof: the oscillator has two inputs");
  RngStream input_rng = rng.derive(0);
  std::vector<OscillatorInput> inputs(n_runs);
  for (auto& in : inputs) {
    in.omega0 = input_rng.uniform(cfg.bounds[0].first, cfg.bounds[0].second);
    in.zeta = input_rng.uniform(cfg.bounds[1].first, cfg.bounds[1].second);
    in.dt = cfg.t_ref;
    in.t_end = cfg.t_end;
  }
  const std::vector<double> z = batch_simulate(inputs, rng.derive(1), cfg.simulator());
  const auto hits = static_cast<double>(std::count_if(z.begin(), z.end(), [&](double v) { return v > cfg.z_crit; }));
  ReferenceEstimate out;
  out.n_runs = n_runs;
  out.estimate = hits / static_cast<double>(n_runs);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n_runs));
  return out;
}

double silverman_bandwidth(const std::vector<double>& samples) {
  if (!has_spread(samples)) throw DomainError("kde: need at least two distinct samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 1.06 * spread * std::pow(n, -0.2);
}

std::vector<double> kde_density(const std::vector<double>& samples, const std::vector<double>& grid) {
  const double h = silverman_bandwidth(samples);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    double acc = 0.0;
    for (double s : samples) {
      const double u = (g - s) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.push_back(acc * norm);
  }
  return out;
}

double VariantReport::coverage_at(double level) const {
  for (const auto& c : coverage)
    if (std::fabs(c.level - level) < 1e-12) return c.coverage;
  throw DomainError("no coverage recorded at level " + std::to_string(level));
}

const VariantReport& ExperimentReport::variant(Variant v) const {
  for (const auto& r : variants)
    if (r.variant == v) return r;
  throw DomainError("report has no variant " + variant_name(v));
}

PriorSpec variant_prior(const ExperimentConfig& cfg, Variant v) {
  if (is_multi_fidelity(v))
    return default_prior(cfg.dim(), cfg.levels.size(), cfg.r_out, cfg.bounds, cfg.noise_correlation,
                         ModelKind::kMultiFidelity);
  return default_prior(cfg.dim(), 1, cfg.r_out, cfg.bounds, cfg.noise_correlation, ModelKind::kSingleLevel);
}

MfDataset variant_data(const ExperimentConfig& cfg, Variant v, const MfDataset& data) {
  return is_multi_fidelity(v) ? data : data.restrict_to_level(cfg.t_ref);
}

PofConfig pof_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  PofConfig p;
  p.z_crit = cfg.z_crit;
  p.t_ref = cfg.t_ref;
  p.m_inputs = cfg.m_inputs;
  p.q_paths = cfg.q_paths;
  p.input_sampler = uniform_inputs(cfg.bounds);
  p.seed = seed;
  return p;
}

VariantFit fit_variant(const ExperimentConfig& cfg, Variant v, const MfDataset& data, std::uint64_t seed) {
  const PriorSpec prior = variant_prior(cfg, v);
  VariantFit out;
  if (is_fully_bayesian(v)) {
    AmhConfig amh = cfg.amh;
    amh.seed = seed;
    out.chain = run_amh(data, prior, amh);
    out.thetas = out.chain.thetas;
    out.acceptance_rate = out.chain.acceptance_rate;
  } else {
    RngStream rng(seed);
    out.thetas = {map_estimate(data, prior, cfg.map_restarts, rng)};
  }
  return out;
}

MfDataset replication_dataset(const ExperimentConfig& cfg, std::size_t replication) {
  const RngStream rep(derive_seed(cfg.master_seed, {replication}));
  RngStream design_rng = rep.derive(kDesignStream);
  RngStream maximin_rng = rep.derive(kMaximinStream);
  const NestedDesign raw = generate_nlhs(cfg.dim(), cfg.design_sizes, design_rng);
  const NestedDesign design = maximin_improve(raw, cfg.maximin_iterations, maximin_rng);

  std::vector<OscillatorInput> inputs;
  Eigen::MatrixXd x(0, static_cast<Eigen::Index>(cfg.dim()));
  std::vector<double> t;
  for (std::size_t s = 0; s < cfg.levels.size(); ++s) {
    const Eigen::MatrixXd pts = map_to_domain(design.level(s), cfg.bounds);
    const Eigen::Index old = x.rows();
    x.conservativeResize(old + pts.rows(), Eigen::NoChange);
    x.bottomRows(pts.rows()) = pts;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      OscillatorInput in;
      if (cfg.dim() != 2) throw ConfigError("the oscillator testbed has two inputs");
      in.omega0 = pts(i, 0);
      in.zeta = pts(i, 1);
      in.dt = cfg.levels[s];
      in.t_end = cfg.t_end;
      inputs.push_back(in);
      t.push_back(cfg.levels[s]);
    }
  }
  const std::vector<double> z = batch_simulate(inputs, rep.derive(kSimulationStream), cfg.simulator());
  return MfDataset::create(std::move(x), Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())),
                           Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())), cfg.levels,
                           cfg.bounds);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  if (cfg.reference_value) {
    report.reference.estimate = *cfg.reference_value;
  } else {
    report.reference = reference_pof(cfg, cfg.reference_runs, RngStream(derive_seed(cfg.master_seed, {kReferenceStream})));
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir / "thetas");
    std::filesystem::create_directories(*out_dir / "pof");
  }

  const std::size_t nv = cfg.variants.size();
  std::vector<std::vector<ReplicationRecord>> records(nv, std::vector<ReplicationRecord>(cfg.replications));
  parallel_for(cfg.replications, [&](std::size_t r) {
    const RngStream rep(derive_seed(cfg.master_seed, {r}));
    std::optional<MfDataset> data;
    std::string data_error;
    try {
      data = replication_dataset(cfg, r);
    } catch (const Error& e) {
      data_error = e.what();
    }
    for (std::size_t vi = 0; vi < nv; ++vi) {
      const Variant v = cfg.variants[vi];
      ReplicationRecord& rec = records[vi][r];
      rec.index = r;
      if (!data) {
        rec.status = "failed: " + data_error;
        continue;
      }
      try {
        const MfDataset vdata = variant_data(cfg, v, *data);
        rec.n_observations = vdata.size();
        const RngStream vs = rep.derive(kVariantStream + static_cast<std::uint64_t>(v));
        const VariantFit fit = fit_variant(cfg, v, vdata, vs.derive(0).seed());
        rec.acceptance_rate = fit.acceptance_rate;
        const PofSampleSet pof = sample_pof(vdata, fit.thetas, pof_config(cfg, vs.derive(1).seed()));
        rec.p_used = static_cast<std::size_t>(pof.samples.rows());
        const PofSummary summary = summarize(pof, cfg.coverage_levels);
        rec.median = summary.median;
        rec.intervals = summary.intervals;
        if (out_dir) {
          const std::string stem = "rep" + std::to_string(r) + "_" + variant_name(v) + ".csv";
          rec.theta_file = "thetas/" + stem;
          rec.pof_file = "pof/" + stem;
          PosteriorSample trace = fit.chain;
          if (trace.thetas.empty()) {
            trace.thetas = fit.thetas;
            const PriorSpec prior = variant_prior(cfg, v);
            for (const auto& th : fit.thetas) trace.log_posterior.push_back(log_posterior(vdata, prior, th.log_theta()));
          }
          std::ofstream tf(*out_dir / rec.theta_file);
          write_trace_csv(tf, trace);
          std::ofstream pf(*out_dir / rec.pof_file);
          write_pof_csv(pf, pof);
        }
      } catch (const Error& e) {
        rec.status = std::string("failed: ") + e.what();
      }
    }
  });

  for (std::size_t vi = 0; vi < nv; ++vi) {
    VariantReport vr;
    vr.variant = cfg.variants[vi];
    vr.replications = std::move(records[vi]);
    std::vector<PofSummary> summaries;
    std::vector<double> medians;
    for (const auto& rec : vr.replications) {
      if (!rec.ok()) {
        ++vr.failures;
        continue;
      }
      summaries.push_back({rec.median, rec.intervals});
      medians.push_back(rec.median);
    }
    if (static_cast<double>(vr.failures) > 0.1 * static_cast<double>(cfg.replications)) report.aborted = true;
    if (!summaries.empty()) vr.coverage = coverage_report(summaries, report.reference.estimate, cfg.coverage_levels);
    vr.median_histogram = histogram(medians, 20);
    vr.length_density = length_density(vr.replications, report.reference.estimate);
    report.variants.push_back(std::move(vr));
  }
  return report;
}

json report_to_json(const ExperimentReport& report) {
  json variants = json::array();
  for (const auto& vr : report.variants) {
    json reps = json::array();
    for (const auto& rec : vr.replications) {
      json intervals = json::array();
      for (const auto& ci : rec.intervals) intervals.push_back(interval_json(ci));
      reps.push_back(json{{"index", rec.index},
                          {"status", rec.status},
                          {"n_observations", rec.n_observations},
                          {"p_used", rec.p_used},
                          {"median", rec.median},
                          {"intervals", intervals},
                          {"acceptance_rate", optional_json(rec.acceptance_rate)},
                          {"theta_file", rec.theta_file},
                          {"pof_file", rec.pof_file}});
    }
    json coverage = json::array();
    for (const auto& c : vr.coverage) coverage.push_back(json{{"level", c.level}, {"coverage", c.coverage}, {"hits", c.hits}});
    const auto& ld = vr.length_density;
    variants.push_back(json{
        {"variant", variant_name(vr.variant)},
        {"failures", vr.failures},
        {"coverage", coverage},
        {"median_histogram", {{"edges", vr.median_histogram.edges}, {"counts", vr.median_histogram.counts}}},
        {"length_density",
         {{"grid", ld.grid}, {"all", optional_json(ld.all)}, {"contained", optional_json(ld.contained)},
          {"missed", optional_json(ld.missed)}}},
        {"replications", reps}});
  }
  return json{{"schema", "mfpof.experiment_report/1"},
              {"config", config_to_json(report.config)},
              {"reference",
               {{"estimate", report.reference.estimate},
                {"std_error", report.reference.std_error},
                {"n_runs", report.reference.n_runs},
                {"nominal_value", report.nominal_reference}}},
              {"aborted", report.aborted},
              {"variants", variants}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != "mfpof.experiment_report/1") throw ConfigError("unknown report schema");
    ExperimentReport report;
    report.config = config_from_json(j.at("config"));
    const json& ref = j.at("reference");
    report.reference.estimate = ref.at("estimate").get<double>();
    report.reference.std_error = ref.at("std_error").get<double>();
    report.reference.n_runs = ref.at("n_runs").get<std::size_t>();
    report.nominal_reference = ref.at("nominal_value").get<double>();
    report.aborted = j.at("aborted").get<bool>();
    for (const json& vj : j.at("variants")) {
      VariantReport vr;
      vr.variant = parse_variant(vj.at("variant").get<std::string>());
      vr.failures = vj.at("failures").get<std::size_t>();
      for (const json& c : vj.at("coverage"))
        vr.coverage.push_back({c.at("level").get<double>(), c.at("coverage").get<double>(), c.at("hits").get<std::size_t>()});
      vr.median_histogram.edges = vj.at("median_histogram").at("edges").get<std::vector<double>>();
      vr.median_histogram.counts = vj.at("median_histogram").at("counts").get<std::vector<std::size_t>>();
      const json& ld = vj.at("length_density");
      vr.length_density.grid = ld.at("grid").get<std::vector<double>>();
      vr.length_density.all = optional_from<std::vector<double>>(ld.at("all"));
      vr.length_density.contained = optional_from<std::vector<double>>(ld.at("contained"));
      vr.length_density.missed = optional_from<std::vector<double>>(ld.at("missed"));
      for (const json& rj : vj.at("replications")) {
        ReplicationRecord rec;
        rec.index = rj.at("index").get<std::size_t>();
        rec.status = rj.at("status").get<std::string>();
        rec.n_observations = rj.at("n_observations").get<std::size_t>();
        rec.p_used = rj.at("p_used").get<std::size_t>();
        rec.median = rj.at("median").get<double>();
        for (const json& ci : rj.at("intervals"))
          rec.intervals.push_back({ci.at("level").get<double>(), ci.at("lower").get<double>(), ci.at("upper").get<double>()});
        rec.acceptance_rate = optional_from<double>(rj.at("acceptance_rate"));
        rec.theta_file = rj.at("theta_file").get<std::string>();
        rec.pof_file = rj.at("pof_file").get<std::string>();
        vr.replications.push_back(std::move(rec));
      }
      report.variants.push_back(std::move(vr));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment report: ") + e.what());
  }
}

}  // namespace mfpof
