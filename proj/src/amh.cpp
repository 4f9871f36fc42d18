#include "mfpof/amh.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mfpof/error.hpp"
#include "mfpof/parallel.hpp"

namespace mfpof {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd proposal_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw ModelError("adaptive Metropolis: proposal covariance lost definiteness");
  return llt.matrixL();
}

}  // namespace

void AmhConfig::validate() const {
  if (burn_in >= n_iterations) throw ConfigError("AmhConfig: burn_in must be smaller than n_iterations");
  if (thin == 0) throw ConfigError("AmhConfig: thin must be at least 1");
  if (!(eps > 0.0)) throw ConfigError("AmhConfig: eps must be positive");
  if (scale < 0.0) throw ConfigError("AmhConfig: scale must be non-negative");
  if (retained() == 0) throw ConfigError("AmhConfig: no iterations retained after burn-in and thinning");
}

AmhConfig AmhConfig::for_retained(std::size_t p, std::uint64_t seed) {
  AmhConfig cfg;
  cfg.n_iterations = cfg.burn_in + p * cfg.thin;
  cfg.seed = seed;
  return cfg;
}

ChainResult run_adaptive_metropolis(const LogTarget& target, const Eigen::VectorXd& initial, const AmhConfig& cfg) {
  cfg.validate();
  const Eigen::Index dim = initial.size();
  if (dim == 0) throw ConfigError("adaptive Metropolis: empty state");
  if (cfg.initial_cov.rows() != dim || cfg.initial_cov.cols() != dim)
    throw ConfigError("adaptive Metropolis: initial proposal covariance has the wrong shape");

  const double sd = cfg.scale > 0.0 ? cfg.scale : 2.4 * 2.4 / static_cast<double>(dim);
  RngStream rng(cfg.seed);

  Eigen::VectorXd x = initial;
  double fx = target(x);
  if (!std::isfinite(fx)) throw ModelError("adaptive Metropolis: target is not finite at the initial state");

  // Running mean and scatter of all chain states visited so far (Welford).
  Eigen::VectorXd mean = x;
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  std::size_t visited = 1;

  Eigen::MatrixXd proposal_cov = cfg.initial_cov;
  Eigen::MatrixXd factor = proposal_factor(proposal_cov);

  ChainResult out;
  out.states.resize(static_cast<Eigen::Index>(cfg.retained()), dim);
  out.log_target.reserve(cfg.retained());
  out.iteration.reserve(cfg.retained());

  std::size_t accepted = 0;
  Eigen::VectorXd e(dim);
  for (std::size_t it = 1; it <= cfg.n_iterations; ++it) {
    for (Eigen::Index k = 0; k < dim; ++k) e[k] = rng.normal();
    const Eigen::VectorXd y = x + factor * e;
    const double fy = target(y);
    const double log_u = std::log(rng.uniform());
    if (std::isfinite(fy) && log_u < fy - fx) {
      x = y;
      fx = fy;
      ++accepted;
    }

    ++visited;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(visited);
    scatter.noalias() += delta * (x - mean).transpose();

    if (cfg.adapt && it >= cfg.adaptation_start) {
      proposal_cov = sd * scatter / static_cast<double>(visited - 1);
      proposal_cov.diagonal().array() += sd * cfg.eps;
      proposal_cov = 0.5 * (proposal_cov + proposal_cov.transpose()).eval();
      factor = proposal_factor(proposal_cov);
    }

    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      const auto row = static_cast<Eigen::Index>(out.log_target.size());
      if (row < out.states.rows()) {
        out.states.row(row) = x.transpose();
        out.log_target.push_back(fx);
        out.iteration.push_back(it);
      }
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_iterations);
  out.final_proposal_cov = proposal_cov;
  return out;
}

double log_posterior(const MfDataset& data, const PriorSpec& prior, const Eigen::VectorXd& log_theta) {
  if (!log_theta.allFinite()) return kNegInf;
  const HyperParams theta = prior.at(log_theta);
  if (!theta.valid()) return kNegInf;
  double ll = kNegInf;
  try {
    ll = integrated_log_likelihood(theta, data);
  } catch (const ModelError&) {
    return kNegInf;
  } catch (const DomainError&) {
    return kNegInf;
  }
  return ll + log_prior_density(prior, log_theta);
}

PosteriorSample run_amh(const MfDataset& data, const PriorSpec& prior, const AmhConfig& cfg) {
  cfg.validate();
  const LogTarget target = [&](const Eigen::VectorXd& l) { return log_posterior(data, prior, l); };

  Eigen::VectorXd start = prior.mean;
  if (!std::isfinite(target(start))) {
    RngStream init_rng = RngStream(cfg.seed).derive(0x1417);
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      start = sample_prior(prior, 1, init_rng).front().log_theta();
      found = std::isfinite(target(start));
    }
    if (!found) throw ModelError("run_amh: no finite starting point after 100 prior draws");
  }

  AmhConfig chain_cfg = cfg;
  if (chain_cfg.initial_cov.size() == 0) chain_cfg.initial_cov = 0.01 * prior.cov;
  const ChainResult chain = run_adaptive_metropolis(target, start, chain_cfg);

  PosteriorSample out;
  out.acceptance_rate = chain.acceptance_rate;
  out.log_posterior = chain.log_target;
  out.iteration = chain.iteration;
  out.thetas.reserve(static_cast<std::size_t>(chain.states.rows()));
  for (Eigen::Index r = 0; r < chain.states.rows(); ++r) out.thetas.push_back(prior.at(chain.states.row(r).transpose()));
  return out;
}

PatternSearchResult maximize_pattern_search(const LogTarget& target, const std::vector<Eigen::VectorXd>& starts,
                                            const Eigen::VectorXd& initial_steps, double min_step) {
  if (starts.empty()) throw ConfigError("pattern search: no starting point");
  if (!(min_step > 0.0)) throw ConfigError("pattern search: min_step must be positive");
  constexpr std::size_t kMaxEvaluations = 200000;

  std::vector<PatternSearchResult> local(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    PatternSearchResult& res = local[s];
    Eigen::VectorXd x = starts[s];
    double fx = target(x);
    res.evaluations = 1;
    if (!std::isfinite(fx)) {
      res.argmax = x;
      res.value = kNegInf;
      return;
    }
    Eigen::VectorXd step = initial_steps;
    while (step.maxCoeff() >= min_step && res.evaluations < kMaxEvaluations) {
      bool improved = false;
      const Eigen::VectorXd base = x;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (step[k] < min_step) continue;
        for (const double dir : {1.0, -1.0}) {
          Eigen::VectorXd y = x;
          y[k] += dir * step[k];
          const double fy = target(y);
          ++res.evaluations;
          if (std::isfinite(fy) && fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        continue;
      }
      // Extrapolate along the sweep's net move while it keeps paying off.
      Eigen::VectorXd move = x - base;
      while (res.evaluations < kMaxEvaluations) {
        Eigen::VectorXd y = x + move;
        const double fy = target(y);
        ++res.evaluations;
        if (!(std::isfinite(fy) && fy > fx)) break;
        x = std::move(y);
        fx = fy;
        move *= 2.0;
      }
    }
    res.argmax = x;
    res.value = fx;
  });

  PatternSearchResult best = local.front();
  std::size_t total = 0;
  for (const auto& r : local) {
    total += r.evaluations;
    if (r.value > best.value) best = r;
  }
  best.evaluations = total;
  if (!std::isfinite(best.value)) throw ModelError("pattern search: target not finite at any start");
  return best;
}

HyperParams map_estimate(const MfDataset& data, const PriorSpec& prior, std::size_t restarts, RngStream& rng) {
  if (restarts == 0) throw ConfigError("map_estimate: restarts must be at least 1");
  std::vector<Eigen::VectorXd> starts{prior.mean};
  for (const auto& h : sample_prior(prior, restarts, rng)) starts.push_back(h.log_theta());
  const LogTarget target = [&](const Eigen::VectorXd& l) { return log_posterior(data, prior, l); };
  // Coarse search from every start, then refine only the winner.
  constexpr double kCoarseStep = 0.1;
  const PatternSearchResult coarse = maximize_pattern_search(target, starts, 0.5 * prior.marginal_sd(), kCoarseStep);
  const Eigen::VectorXd fine_steps = Eigen::VectorXd::Constant(coarse.argmax.size(), 2.0 * kCoarseStep);
  const PatternSearchResult best = maximize_pattern_search(target, {coarse.argmax}, fine_steps);
  return prior.at(best.argmax);
}

void write_trace_csv(std::ostream& os, const PosteriorSample& sample) {
  if (sample.thetas.empty()) return;
  os << "iteration,log_posterior";
  for (const auto& name : sample.thetas.front().names()) os << ',' << name;
  os << '\n' << std::setprecision(17);
  for (std::size_t j = 0; j < sample.thetas.size(); ++j) {
    os << (j < sample.iteration.size() ? sample.iteration[j] : j) << ','
       << (j < sample.log_posterior.size() ? sample.log_posterior[j] : 0.0);
    const auto& l = sample.thetas[j].log_theta();
    for (Eigen::Index k = 0; k < l.size(); ++k) os << ',' << l[k];
    os << '\n';
  }
}

}  // namespace mfpof
