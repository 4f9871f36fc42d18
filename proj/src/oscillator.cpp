#include "mfpof/oscillator.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mfpof/error.hpp"
#include "mfpof/parallel.hpp"
#include "mfpof/simd/kernels.hpp"

namespace mfpof {

namespace {

constexpr std::size_t kChunk = 512;
constexpr std::size_t kLanes = simd::OscillatorLanes::kWidth;

std::string describe(const OscillatorInput& in) {
  std::ostringstream os;
  os.precision(17);
  os << "(omega0=" << in.omega0 << ", zeta=" << in.zeta << ", dt=" << in.dt << ", t_end=" << in.t_end << ")";
  return os.str();
}

// cos(w t) and sin(w t) / w with w^2 = q, continued analytically to q <= 0.
void trig_pair(double q, double t, double& c, double& s, double a) {
  // Returns e^{-a t} C and e^{-a t} S to avoid cosh overflow when q < 0.
  const double x = q * t * t;
  if (std::fabs(x) < 1e-2) {
    double term_c = 1.0, term_s = 1.0, sum_c = 1.0, sum_s = 1.0;
    for (int k = 1; k <= 6; ++k) {
      term_c *= -x / static_cast<double>((2 * k - 1) * (2 * k));
      term_s *= -x / static_cast<double>((2 * k) * (2 * k + 1));
      sum_c += term_c;
      sum_s += term_s;
    }
    const double damp = std::exp(-a * t);
    c = damp * sum_c;
    s = damp * t * sum_s;
  } else if (q > 0.0) {
    const double w = std::sqrt(q);
    const double damp = std::exp(-a * t);
    c = damp * std::cos(w * t);
    s = damp * std::sin(w * t) / w;
  } else {
    const double w = std::sqrt(-q);
    const double up = std::exp((w - a) * t);
    const double down = std::exp(-(w + a) * t);
    c = 0.5 * (up + down);
    s = 0.5 * (up - down) / w;
  }
}

void load_lane(simd::OscillatorLanes& lanes, std::size_t lane, const OscillatorInput& in,
               const SimulatorOptions& opt) {
  const Matrix2 e = propagator(in.omega0, in.zeta, in.dt);
  const Matrix2 l = noise_loading(in, opt);
  lanes.e00[lane] = e[0];
  lanes.e01[lane] = e[1];
  lanes.e10[lane] = e[2];
  lanes.e11[lane] = e[3];
  lanes.l00[lane] = l[0];
  lanes.l10[lane] = l[2];
  lanes.l11[lane] = l[3];
  lanes.x[lane] = 0.0;
  lanes.v[lane] = 0.0;
  lanes.peak[lane] = 0.0;
}

// Advances the active lanes over `steps` steps, drawing each lane's noise from its own stream.
void run_lanes(simd::OscillatorLanes& lanes, std::vector<RngStream>& streams, std::size_t steps, bool vectorized) {
  const bool two = lanes.two_noises;
  std::vector<double> n1(kChunk * kLanes, 0.0), n2(two ? kChunk * kLanes : 0, 0.0);
  for (std::size_t done = 0; done < steps; done += kChunk) {
    const std::size_t len = std::min(kChunk, steps - done);
    for (std::size_t lane = 0; lane < streams.size(); ++lane) {
      RngStream& rng = streams[lane];
      for (std::size_t i = 0; i < len; ++i) {
        n1[i * kLanes + lane] = rng.normal();
        if (two) n2[i * kLanes + lane] = rng.normal();
      }
    }
    if (vectorized)
      simd::oscillator_advance(lanes, n1.data(), two ? n2.data() : nullptr, len);
    else
      simd::oscillator_advance_scalar(lanes, n1.data(), two ? n2.data() : nullptr, len);
  }
}

Trajectory finish_lane(const simd::OscillatorLanes& lanes, std::size_t lane, const OscillatorInput& in) {
  if (!std::isfinite(lanes.x[lane]) || !std::isfinite(lanes.v[lane]) || !std::isfinite(lanes.peak[lane]))
    throw Error("oscillator state overflowed for input " + describe(in));
  Trajectory out;
  out.peak_abs = lanes.peak[lane];
  out.all_zero = out.peak_abs == 0.0;
  out.log_amplitude = std::log(out.peak_abs);
  return out;
}

}  // namespace

void OscillatorInput::validate() const {
  if (!(omega0 >= 0.0 && omega0 <= 30.0)) throw DomainError("omega0 outside [0, 30]: " + describe(*this));
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("zeta outside [0, 1]: " + describe(*this));
  if (!(dt > 0.0 && dt <= 1.0)) throw DomainError("dt outside (0, 1]: " + describe(*this));
  if (!(t_end > 0.0) || !std::isfinite(t_end) || dt > t_end) throw DomainError("need 0 < dt <= t_end: " + describe(*this));
}

std::size_t OscillatorInput::steps() const {
  // Guards against t_end / dt landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

double noise_intensity(SpectralConvention c) noexcept {
  return c == SpectralConvention::kTwoPi ? 2.0 * std::numbers::pi : 1.0;
}

Matrix2 propagator(double omega0, double zeta, double dt) {
  const double a = zeta * omega0;
  const double q = omega0 * omega0 * (1.0 - zeta * zeta);
  double c = 0.0, s = 0.0;
  trig_pair(q, dt, c, s, a);
  // e^{-a dt} [C I + S (A + a I)],  A + a I = [[a, 1], [-omega0^2, -a]]
  return {c + s * a, s, -s * omega0 * omega0, c - s * a};
}

Matrix2 noise_loading(const OscillatorInput& in, const SimulatorOptions& opt) {
  if (!(opt.intensity > 0.0)) throw ConfigError("noise intensity must be positive");
  const double scale = opt.forcing_scale;
  if (opt.scheme == NoiseScheme::kExponentialEuler) return {0.0, 0.0, scale * std::sqrt(opt.intensity * in.dt), 0.0};

  // Van Loan: expm([[-A, Qc], [0, A']] dt) = [[., F12], [0, F22]], Q = F22' F12.
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  const double w2 = in.omega0 * in.omega0;
  const double c = 2.0 * in.zeta * in.omega0;
  m(0, 1) = -1.0;
  m(1, 0) = w2;
  m(1, 1) = c;
  m(1, 3) = opt.intensity;
  m(2, 3) = -w2;
  m(3, 2) = 1.0;
  m(3, 3) = -c;
  const Eigen::Matrix4d f = (m * in.dt).exp();
  Eigen::Matrix2d q = f.block<2, 2>(2, 2).transpose() * f.block<2, 2>(0, 2);
  q = 0.5 * (q + q.transpose()).eval();
  const double l00 = std::sqrt(std::max(q(0, 0), 0.0));
  const double l10 = l00 > 0.0 ? q(1, 0) / l00 : 0.0;
  const double l11 = std::sqrt(std::max(q(1, 1) - l10 * l10, 0.0));
  return {scale * l00, 0.0, scale * l10, scale * l11};
}

Trajectory simulate_trajectory(const OscillatorInput& in, RngStream& rng, const SimulatorOptions& opt) {
  in.validate();
  simd::OscillatorLanes lanes;
  lanes.two_noises = opt.scheme == NoiseScheme::kExactOu;
  lanes.active = 1;
  load_lane(lanes, 0, in, opt);
  std::vector<RngStream> streams{rng};
  run_lanes(lanes, streams, in.steps(), false);
  rng = streams.front();
  return finish_lane(lanes, 0, in);
}

double simulate(const OscillatorInput& in, RngStream& rng, const SimulatorOptions& opt) {
  const Trajectory tr = simulate_trajectory(in, rng, opt);
  if (tr.all_zero) throw DomainError("simulate: all-zero trajectory (no stochastic forcing) for " + describe(in));
  return tr.log_amplitude;
}

std::vector<double> batch_simulate(const std::vector<OscillatorInput>& inputs, const RngStream& rng,
                                   const SimulatorOptions& opt) {
  if (inputs.empty()) throw ConfigError("batch_simulate: empty input list");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      inputs[i].validate();
    } catch (const Error& e) {
      throw DomainError("batch_simulate: input " + std::to_string(i) + ": " + e.what());
    }
  }

  // Blocks of up to four inputs sharing a step count.
  std::map<std::size_t, std::vector<std::size_t>> by_steps;
  for (std::size_t i = 0; i < inputs.size(); ++i) by_steps[inputs[i].steps()].push_back(i);
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& [steps, idx] : by_steps)
    for (std::size_t b = 0; b < idx.size(); b += kLanes)
      blocks.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(b),
                          idx.begin() + static_cast<std::ptrdiff_t>(std::min(b + kLanes, idx.size())));

  std::vector<double> out(inputs.size());
  parallel_for(blocks.size(), [&](std::size_t b) {
    const auto& block = blocks[b];
    simd::OscillatorLanes lanes;
    lanes.active = block.size();
    lanes.two_noises = opt.scheme == NoiseScheme::kExactOu;
    std::vector<RngStream> streams;
    for (std::size_t lane = 0; lane < block.size(); ++lane) {
      load_lane(lanes, lane, inputs[block[lane]], opt);
      streams.push_back(rng.derive(block[lane]));
    }
    run_lanes(lanes, streams, inputs[block.front()].steps(), true);
    for (std::size_t lane = 0; lane < block.size(); ++lane) {
      const auto& in = inputs[block[lane]];
      Trajectory tr;
      try {
        tr = finish_lane(lanes, lane, in);
      } catch (const Error& e) {
        throw Error("batch_simulate: input " + std::to_string(block[lane]) + ": " + e.what());
      }
      if (tr.all_zero)
        throw DomainError("batch_simulate: input " + std::to_string(block[lane]) + " produced an all-zero trajectory");
      out[block[lane]] = tr.log_amplitude;
    }
  });
  return out;
}

double cost(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("cost: dt must be positive");
  return 2.61 / dt + 5.45;
}

}  // namespace mfpof
