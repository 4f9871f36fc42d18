// Command-line front end: design, simulate, fit, pof, experiment, reference, kde.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfpof/amh.hpp"
#include "mfpof/design.hpp"
#include "mfpof/error.hpp"
#include "mfpof/experiment.hpp"
#include "mfpof/io.hpp"
#include "mfpof/oscillator.hpp"
#include "mfpof/parallel.hpp"
#include "mfpof/pof.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string variant;
  std::optional<std::size_t> replications;
  unsigned threads = 1;

  // design
  std::size_t dim = 2;
  std::vector<std::size_t> sizes;
  std::size_t maximin_iterations = 2000;
  // simulate / kde / fit / pof inputs
  std::string input;
  std::string data;
  std::string thetas;
  std::string column;
  std::size_t grid_points = 201;
  std::optional<std::size_t> runs;
};

mfpof::ExperimentConfig load(const Options& o) {
  mfpof::ExperimentConfig cfg = o.config.empty() ? mfpof::ExperimentConfig{} : mfpof::load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (!o.variant.empty()) cfg.variants = {mfpof::parse_variant(o.variant)};
  if (o.replications) cfg.replications = *o.replications;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw mfpof::ConfigError(std::string("missing --") + what);
  std::ifstream in(path);
  if (!in) throw mfpof::ConfigError("cannot open " + path);
  return in;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

json summary_json(const mfpof::PofSummary& s) {
  json intervals = json::array();
  for (const auto& ci : s.intervals)
    intervals.push_back({{"level", ci.level}, {"lower", ci.lower}, {"upper", ci.upper}, {"length", ci.length()}});
  return {{"median", s.median}, {"intervals", intervals}};
}

int cmd_design(const Options& o) {
  if (o.sizes.empty()) throw mfpof::ConfigError("missing --sizes");
  mfpof::RngStream rng(o.seed.value_or(0));
  mfpof::RngStream maximin_rng = rng.derive(1);
  const auto raw = mfpof::generate_nlhs(o.dim, o.sizes, rng);
  const auto design = mfpof::maximin_improve(raw, o.maximin_iterations, maximin_rng);
  if (o.out_dir.empty()) {
    mfpof::write_design_csv(std::cout, design);
  } else {
    std::ofstream out(out_dir(o) / "design.csv");
    mfpof::write_design_csv(out, design);
  }
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto cfg = load(o);
  auto in = open_input(o.input, "input");
  const auto requests = mfpof::read_simulation_csv(in);
  std::vector<double> z(requests.size());
  mfpof::parallel_for(requests.size(), [&](std::size_t i) {
    mfpof::RngStream rng(requests[i].seed);
    z[i] = mfpof::simulate(requests[i].input, rng, cfg.simulator());
  });
  std::ostringstream os;
  os << "omega0,zeta,dt,seed,z,cost_ms\n" << std::setprecision(17);
  double total = 0.0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    const double c = mfpof::cost(r.input.dt);
    total += c;
    os << r.input.omega0 << ',' << r.input.zeta << ',' << r.input.dt << ',' << r.seed << ',' << z[i] << ',' << c << '\n';
  }
  if (o.out_dir.empty()) {
    std::cout << os.str();
  } else {
    const fs::path dir = out_dir(o);
    std::ofstream(dir / "simulations.csv") << os.str();
    std::cout << json{{"runs", requests.size()}, {"total_cost_ms", total}}.dump() << '\n';
  }
  return 0;
}

int cmd_fit(const Options& o) {
  const auto cfg = load(o);
  if (cfg.variants.size() != 1) throw mfpof::ConfigError("fit needs a single --variant");
  const auto v = cfg.variants.front();
  auto in = open_input(o.data, "data");
  const auto data = mfpof::variant_data(cfg, v, mfpof::read_dataset_csv(in, cfg.levels, cfg.bounds));
  const auto fit = mfpof::fit_variant(cfg, v, data, cfg.master_seed);
  mfpof::PosteriorSample trace = fit.chain;
  if (trace.thetas.empty()) {
    trace.thetas = fit.thetas;
    trace.log_posterior = {mfpof::log_posterior(data, mfpof::variant_prior(cfg, v), fit.thetas.front().log_theta())};
  }
  const fs::path dir = out_dir(o);
  std::ofstream out(dir / ("thetas_" + mfpof::variant_name(v) + ".csv"));
  mfpof::write_trace_csv(out, trace);
  json info{{"variant", mfpof::variant_name(v)}, {"n_observations", data.size()}, {"p", fit.thetas.size()},
            {"acceptance_rate", fit.acceptance_rate ? json(*fit.acceptance_rate) : json(nullptr)}};
  std::cout << info.dump() << '\n';
  return 0;
}

int cmd_pof(const Options& o) {
  const auto cfg = load(o);
  if (cfg.variants.size() != 1) throw mfpof::ConfigError("pof needs a single --variant");
  const auto v = cfg.variants.front();
  auto din = open_input(o.data, "data");
  const auto data = mfpof::variant_data(cfg, v, mfpof::read_dataset_csv(din, cfg.levels, cfg.bounds));
  auto tin = open_input(o.thetas, "thetas");
  const auto thetas = mfpof::read_trace_csv(tin, mfpof::variant_prior(cfg, v));
  const auto set = mfpof::sample_pof(data, thetas, mfpof::pof_config(cfg, cfg.master_seed));
  const auto summary = mfpof::summarize(set, cfg.coverage_levels);
  const fs::path dir = out_dir(o);
  std::ofstream out(dir / "pof_samples.csv");
  mfpof::write_pof_csv(out, set);
  json s = summary_json(summary);
  s["p_used"] = set.samples.rows();
  s["warnings"] = set.warnings;
  write_json(dir / "pof_summary.json", s);
  std::cout << s.dump() << '\n';
  return 0;
}

int cmd_experiment(const Options& o) {
  const auto cfg = load(o);
  const fs::path dir = out_dir(o);
  const auto report = mfpof::run_experiment(cfg, dir);
  write_json(dir / "report.json", mfpof::report_to_json(report));
  json brief{{"reference", report.reference.estimate}, {"aborted", report.aborted}};
  for (const auto& vr : report.variants)
    brief[mfpof::variant_name(vr.variant)] = {{"coverage_95", vr.coverage.empty() ? json(nullptr) : json(vr.coverage_at(0.95))},
                                               {"failures", vr.failures}};
  std::cout << brief.dump() << '\n';
  if (report.aborted) throw mfpof::ModelError("more than 10% of the replications failed; report marked aborted");
  return 0;
}

int cmd_reference(const Options& o) {
  const auto cfg = load(o);
  const std::size_t runs = o.runs.value_or(cfg.reference_runs);
  const auto est = mfpof::reference_pof(cfg, runs, mfpof::RngStream(cfg.master_seed));
  json j{{"estimate", est.estimate}, {"std_error", est.std_error}, {"n_runs", est.n_runs}};
  if (!o.out_dir.empty()) write_json(out_dir(o) / "reference.json", j);
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_kde(const Options& o) {
  auto in = open_input(o.input, "input");
  const auto table = mfpof::read_csv(in);
  const std::size_t col = o.column.empty() ? table.header.size() - 1 : table.column(o.column);
  std::vector<double> samples;
  for (const auto& row : table.rows) samples.push_back(row[col]);
  const double bw = mfpof::silverman_bandwidth(samples);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  std::vector<double> grid;
  const std::size_t n = std::max<std::size_t>(o.grid_points, 2);
  for (std::size_t i = 0; i < n; ++i)
    grid.push_back(*lo - 4.0 * bw + (*hi - *lo + 8.0 * bw) * static_cast<double>(i) / static_cast<double>(n - 1));
  const auto dens = mfpof::kde_density(samples, grid);
  std::ostringstream os;
  os << "x,density\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << ',' << dens[i] << '\n';
  if (o.out_dir.empty())
    std::cout << os.str();
  else
    std::ofstream(out_dir(o) / "kde.csv") << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior distribution of a probability of failure with a multi-fidelity Gaussian process"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment configuration");
    sub->add_option("--seed", o.seed, "Seed (overrides master_seed)");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
    sub->add_option("--variant", o.variant, "Model variant")->check(CLI::IsMember({"mf-fb", "mf-map", "sl-fb", "sl-map"}));
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  };

  auto* design = app.add_subcommand("design", "Emit a maximin nested Latin hypercube design as CSV");
  design->add_option("--d", o.dim, "Input dimension");
  design->add_option("--sizes", o.sizes, "Level sizes, largest first")->delimiter(',');
  design->add_option("--maximin-iterations", o.maximin_iterations, "Maximin improvement iterations");
  common(design);

  auto* simulate = app.add_subcommand("simulate", "Run the oscillator on omega0,zeta,dt,seed rows");
  simulate->add_option("--input", o.input, "Input CSV")->required();
  common(simulate);

  auto* fit = app.add_subcommand("fit", "Sample (FB) or maximize (MAP) the hyper-parameter posterior");
  fit->add_option("--data", o.data, "Dataset CSV x_1..x_d,t,z")->required();
  common(fit);

  auto* pof = app.add_subcommand("pof", "Sample the posterior of the probability of failure");
  pof->add_option("--data", o.data, "Dataset CSV x_1..x_d,t,z")->required();
  pof->add_option("--thetas", o.thetas, "Hyper-parameter trace CSV")->required();
  common(pof);

  auto* experiment = app.add_subcommand("experiment", "Replicated FB vs MAP study");
  experiment->add_option("--replications", o.replications, "Number of replications");
  common(experiment);

  auto* reference = app.add_subcommand("reference", "Direct Monte Carlo reference probability");
  reference->add_option("--runs", o.runs, "Number of simulator runs");
  common(reference);

  auto* kde = app.add_subcommand("kde", "Gaussian kernel density of a CSV column");
  kde->add_option("--input", o.input, "Input CSV")->required();
  kde->add_option("--column", o.column, "Column name (default: last)");
  kde->add_option("--grid-points", o.grid_points, "Number of grid points");
  common(kde);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    mfpof::set_thread_count(o.threads);
    if (*design) return cmd_design(o);
    if (*simulate) return cmd_simulate(o);
    if (*fit) return cmd_fit(o);
    if (*pof) return cmd_pof(o);
    if (*experiment) return cmd_experiment(o);
    if (*reference) return cmd_reference(o);
    if (*kde) return cmd_kde(o);
  } catch (const mfpof::Error& e) {
    std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return 0;
}
