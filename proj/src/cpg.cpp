#include "compo/cpg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "compo/common.hpp"

namespace compo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void CpgParams::validate() const {
  if (n_oscillators < 1)
    throw ValidationError("CpgParams: n_oscillators must be >= 1");
  auto check_len = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != n_oscillators)
      throw ValidationError(std::string("CpgParams: ") + name + " has " +
                            std::to_string(v.size()) + " entries, expected " +
                            std::to_string(n_oscillators));
  };
  check_len(nu, "nu");
  check_len(target_amplitudes, "target_amplitudes");
  check_len(offsets, "offsets");
  for (double R : target_amplitudes)
    if (!(R > 0.0)) throw ValidationError("CpgParams: target amplitudes must be > 0");
  if (!(alpha > 0.0)) throw ValidationError("CpgParams: alpha must be > 0");
  for (const auto& c : couplings) {
    if (c.target < 0 || c.target >= n_oscillators || c.source < 0 || c.source >= n_oscillators)
      throw ValidationError("CpgParams: coupling (" + std::to_string(c.target) + " <- " +
                            std::to_string(c.source) + ") out of range");
  }
}

CpgParams make_chain_params(int n_oscillators, double nu_hz, double amplitude, double offset,
                            double alpha, std::vector<Coupling> couplings) {
  CpgParams p;
  p.n_oscillators = n_oscillators;
  p.nu.assign(n_oscillators, nu_hz);
  p.target_amplitudes.assign(n_oscillators, amplitude);
  p.offsets.assign(n_oscillators, offset);
  p.alpha = alpha;
  p.couplings = std::move(couplings);
  p.validate();
  return p;
}

CpgState make_cpg_state(std::vector<double> initial_phases) {
  CpgState s;
  const size_t n = initial_phases.size();
  s.theta = std::move(initial_phases);
  s.r.assign(n, 0.0);
  s.r_dot.assign(n, 0.0);
  return s;
}

std::vector<double> random_phases(uint64_t seed, int n) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  std::vector<double> phases(n);
  for (double& p : phases) p = uniform(rng);
  return phases;
}

std::vector<Coupling> build_chain(int n_joints, int n_segments, double w,
                                  WaveDirection direction) {
  if (n_joints < 1)
    throw ValidationError("build_chain: n_joints must be >= 1, got " + std::to_string(n_joints));
  if (n_segments != n_joints + 1)
    throw ValidationError("build_chain: n_segments must equal n_joints + 1, got " +
                          std::to_string(n_segments));
  const double bias = (direction == WaveDirection::forward ? 1.0 : -1.0) * kTwoPi / n_segments;
  std::vector<Coupling> couplings;
  couplings.reserve(2 * (n_joints - 1));
  for (int i = 0; i + 1 < n_joints; ++i) {
    couplings.push_back({i, i + 1, w, bias});       // locked: theta_{i+1} - theta_i = bias
    couplings.push_back({i + 1, i, w, -bias});
  }
  return couplings;
}

CpgDerivatives cpg_derivatives(const CpgState& state, const CpgParams& params) {
  const int n = params.n_oscillators;
  CpgDerivatives d;
  d.d_theta.resize(n);
  d.d_r = state.r_dot;
  d.d_r_dot.resize(n);
  for (int i = 0; i < n; ++i) {
    d.d_theta[i] = kTwoPi * params.nu[i];
    d.d_r_dot[i] = params.alpha *
                   (params.alpha / 4.0 * (params.target_amplitudes[i] - state.r[i]) -
                    state.r_dot[i]);
  }
  for (const auto& c : params.couplings) {
    d.d_theta[c.target] += state.r[c.source] * c.weight *
                           std::sin(state.theta[c.source] - state.theta[c.target] - c.phase_bias);
  }
  return d;
}

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

CpgState blend(const CpgState& s, double h, const CpgDerivatives& d) {
  CpgState out = s;
  axpy(out.theta, h, d.d_theta);
  axpy(out.r, h, d.d_r);
  axpy(out.r_dot, h, d.d_r_dot);
  return out;
}

}  // namespace

CpgState cpg_step(const CpgState& state, const CpgParams& params, double dt, int substeps) {
  if (!(dt > 0.0)) throw ValidationError("cpg_step: dt must be positive");
  if (substeps < 1) throw ValidationError("cpg_step: substeps must be >= 1");
  const double h = dt / substeps;

  CpgState s = state;
  for (int step = 0; step < substeps; ++step) {
    const CpgDerivatives k1 = cpg_derivatives(s, params);
    const CpgDerivatives k2 = cpg_derivatives(blend(s, h / 2.0, k1), params);
    const CpgDerivatives k3 = cpg_derivatives(blend(s, h / 2.0, k2), params);
    const CpgDerivatives k4 = cpg_derivatives(blend(s, h, k3), params);
    for (int i = 0; i < params.n_oscillators; ++i) {
      s.theta[i] += h / 6.0 * (k1.d_theta[i] + 2.0 * (k2.d_theta[i] + k3.d_theta[i]) + k4.d_theta[i]);
      s.r[i] += h / 6.0 * (k1.d_r[i] + 2.0 * (k2.d_r[i] + k3.d_r[i]) + k4.d_r[i]);
      s.r_dot[i] +=
          h / 6.0 * (k1.d_r_dot[i] + 2.0 * (k2.d_r_dot[i] + k3.d_r_dot[i]) + k4.d_r_dot[i]);
    }
  }

  for (int i = 0; i < params.n_oscillators; ++i) {
    if (!std::isfinite(s.theta[i]))
      throw ValidationError("cpg_step: theta[" + std::to_string(i) + "] diverged");
    if (!std::isfinite(s.r[i]))
      throw ValidationError("cpg_step: r[" + std::to_string(i) + "] diverged");
    if (!std::isfinite(s.r_dot[i]))
      throw ValidationError("cpg_step: r_dot[" + std::to_string(i) + "] diverged");
  }
  return s;
}

std::vector<double> cpg_output(const CpgState& state, const CpgParams& params) {
  std::vector<double> x(params.n_oscillators);
  for (int i = 0; i < params.n_oscillators; ++i)
    x[i] = params.offsets[i] + state.r[i] * std::cos(state.theta[i]);
  return x;
}

}  // namespace compo
