#pragma once

#include <cstdint>
#include <vector>

namespace compo {

// ---------------------------------------------------------------------------
// Chain of mutually coupled phase-amplitude oscillators, one per joint:
//
//   dtheta_i/dt = 2*pi*nu_i + sum_j r_j * w_ij * sin(theta_j - theta_i - phi_ij)
//   d2r_i/dt2   = alpha * ( alpha/4 * (R_i - r_i) - dr_i/dt )
//   x_i         = X_i + r_i * cos(theta_i)
//
// The amplitude dynamics are second order and critically damped (double root
// at -alpha/2), so r approaches R monotonically with no oscillatory mode.
// ---------------------------------------------------------------------------

struct Coupling {
  int target = 0;  // oscillator receiving the term
  int source = 0;
  double weight = 20.0;
  double phase_bias = 0.0;  // locked state satisfies theta_source - theta_target = phase_bias
};

struct CpgParams {
  int n_oscillators = 8;
  std::vector<double> nu;                 // intrinsic frequencies, Hz
  std::vector<double> target_amplitudes;  // R_i, radians, each > 0
  std::vector<double> offsets;            // X_i, radians
  double alpha = 20.0;
  std::vector<Coupling> couplings;

  void validate() const;
};

// Uniform chain parameters: every oscillator at frequency nu_hz, amplitude R,
// offset X, with nearest-neighbour couplings from build_chain.
CpgParams make_chain_params(int n_oscillators, double nu_hz, double amplitude, double offset,
                            double alpha, std::vector<Coupling> couplings);

struct CpgState {
  std::vector<double> theta;  // phases, radians (unwrapped)
  std::vector<double> r;      // amplitudes, radians
  std::vector<double> r_dot;  // radians/s
};

// r = r_dot = 0, phases as given.
CpgState make_cpg_state(std::vector<double> initial_phases);

// Phases drawn uniformly from [0, 2*pi); the locked wave must not depend on a
// privileged start.
std::vector<double> random_phases(uint64_t seed, int n);

// Wave direction along the body. forward locks the neighbour difference
// theta_{i+1} - theta_i = +2*pi/N; backward negates every bias, reversing the
// travelling wave.
enum class WaveDirection { forward, backward };

// Nearest-neighbour couplings for a body of n_segments (so n_joints =
// n_segments - 1 oscillators), both directions, |phase_bias| = 2*pi/n_segments
// with phi_ji = -phi_ij. All weights w.
std::vector<Coupling> build_chain(int n_joints, int n_segments, double w,
                                  WaveDirection direction = WaveDirection::forward);

struct CpgDerivatives {
  std::vector<double> d_theta;
  std::vector<double> d_r;
  std::vector<double> d_r_dot;
};

CpgDerivatives cpg_derivatives(const CpgState& state, const CpgParams& params);

// Classical RK4, substeps applications of step dt/substeps. Throws naming the
// diverging component when the state leaves the finite range.
CpgState cpg_step(const CpgState& state, const CpgParams& params, double dt, int substeps);

// Joint setpoints x_i = X_i + r_i * cos(theta_i).
std::vector<double> cpg_output(const CpgState& state, const CpgParams& params);

}  // namespace compo
