#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "compo/cpg.hpp"

namespace compo {

// ---------------------------------------------------------------------------
// Planar snake: n_links rigid rods joined in a chain, moving on the ground
// plane under anisotropic viscous friction. Generalized coordinates
//   q  = (p_x, p_y, psi_0 .. psi_{n-1})
// where p is the head-link centre and psi_i are absolute link headings.
// Joint angles are phi_i = psi_{i+1} - psi_i, driven by PD servos toward the
// setpoints handed in each control tick. Friction acts at each link centre:
//   F = -c_t * v_t * t_hat - c_n * v_n * n_hat
// with c_n >> c_t, which is what turns body undulation into propulsion.
// ---------------------------------------------------------------------------

struct SnakeConfig {
  int n_links = 9;
  double link_length = 0.18;  // m
  double link_mass = 1.0;     // kg
  double c_t = 0.3;           // N*s/m, tangential
  double c_n = 6.0;           // N*s/m, normal
  double servo_kp = 20.0;     // N*m/rad
  double servo_kd = 2.0;      // N*m*s/rad
  double dt = 0.05;           // s, control tick
  // RK4 stability: the servo/friction fast modes need h below ~1 ms; 60
  // substeps of the 50 ms tick keep a 25% margin (45 is marginally unstable).
  int substeps = 60;
  double joint_limit = 1.5707963267948966;  // rad; beyond this the episode aborts

  int n_joints() const { return n_links - 1; }
  void validate() const;
};

struct SnakeState {
  Eigen::VectorXd q;   // (p_x, p_y, psi_0..psi_{n-1})
  Eigen::VectorXd qd;  // time derivatives
};

double servo_torque(double phi_ref, double phi, double phi_dot, const SnakeConfig& cfg);

Eigen::Vector2d friction_force(const Eigen::Vector2d& link_velocity, double link_heading,
                               const SnakeConfig& cfg);

enum class StepResult { ok, joint_limit, non_finite };

class SnakeModel {
 public:
  explicit SnakeModel(const SnakeConfig& cfg);

  const SnakeConfig& config() const { return cfg_; }

  // Straight snake along +x, head-link centre at the origin, at rest.
  SnakeState initial_state() const;

  // Advances one control tick (cfg.dt split into cfg.substeps RK4 steps) with
  // the joint setpoints held constant. Aborts instead of stepping into a
  // non-finite state or past the joint limit.
  StepResult step(SnakeState& state, std::span<const double> joint_setpoints) const;

  // Diagnostics; all computed from the current state.
  Eigen::Vector2d com(const SnakeState& state) const;
  Eigen::Vector2d com_velocity(const SnakeState& state) const;
  Eigen::Vector2d linear_momentum(const SnakeState& state) const;
  double angular_momentum(const SnakeState& state) const;  // about the origin
  double kinetic_energy(const SnakeState& state) const;
  std::vector<double> joint_angles(const SnakeState& state) const;
  Eigen::Vector2d head_position(const SnakeState& state) const { return state.q.head<2>(); }
  double heading(const SnakeState& state) const { return state.q[2]; }
  Eigen::Vector2d link_center(const SnakeState& state, int link) const;
  Eigen::Vector2d link_velocity(const SnakeState& state, int link) const;

 private:
  void derivatives(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                   std::span<const double> setpoints, Eigen::VectorXd& qdd) const;

  SnakeConfig cfg_;
  Eigen::MatrixXd geom_;     // geom_(i, k) = d c_i / d e(psi_k), constant chain coefficients
  Eigen::MatrixXd coupling_; // mass-weighted geom^T * geom
  Eigen::VectorXd heading_mass_;  // mass-weighted column sums of geom
  double total_mass_ = 0.0;
  double link_inertia_ = 0.0;
};

// ---------------------------------------------------------------------------
// Episode execution: CPG-driven locomotion scored per style.
// ---------------------------------------------------------------------------

enum class Style { straight, left, right };

const char* style_name(Style style);
Style style_from_name(std::string_view name);

struct EpisodeSetup {
  SnakeConfig snake;
  double cpg_nu = 1.0;              // Hz
  double cpg_alpha = 20.0;
  double cpg_coupling_weight = 20.0;
  int cpg_substeps = 5;
  WaveDirection wave = WaveDirection::backward;  // backward wave -> head-first travel
  int max_steps = 120;                           // E
  double turn_termination_angle = 2.0943951023931953;  // 120 deg

  void validate() const;
};

struct TrajectoryRow {
  int step = 0;
  double t = 0.0;
  double head_x = 0.0, head_y = 0.0;
  double com_x = 0.0, com_y = 0.0;
  double heading = 0.0;
  std::vector<double> joints;
};

struct EpisodeOutcome {
  double d = 0.0;               // m, CoM displacement from start
  double s = 0.0;               // m, lateral CoM coordinate in the initial-heading frame (+ = left)
  double heading_change = 0.0;  // rad, head link relative to start
  int steps_executed = 0;
  bool aborted = false;
  std::vector<TrajectoryRow> trajectory;  // one row per executed tick
};

// Couples one CPG chain to the snake body; used for both scored episodes and
// free-running rollouts. The CPG state persists across set_table calls, so
// amplitude dynamics smooth style transitions.
class CoupledSim {
 public:
  CoupledSim(const EpisodeSetup& setup, std::span<const double> amplitudes,
             std::span<const double> offsets, std::span<const double> initial_phases);

  void set_table(std::span<const double> amplitudes, std::span<const double> offsets);
  StepResult tick();  // one control step: advance CPG, then the body

  int steps() const { return steps_; }
  double time() const { return steps_ * setup_.snake.dt; }
  double heading_change() const;
  Eigen::Vector2d com_displacement() const;
  // Lateral CoM coordinate in the initial-heading frame; positive = the
  // snake's left at episode start.
  double lateral_displacement() const;
  TrajectoryRow trajectory_row() const;
  const SnakeModel& model() const { return model_; }
  const SnakeState& snake_state() const { return snake_; }
  const CpgState& cpg_state() const { return cpg_state_; }

 private:
  EpisodeSetup setup_;
  SnakeModel model_;
  CpgParams cpg_;
  CpgState cpg_state_;
  SnakeState snake_;
  Eigen::Vector2d com_start_;
  double heading_start_ = 0.0;
  int steps_ = 0;
};

EpisodeOutcome run_snake_episode(std::span<const double> amplitudes,
                                 std::span<const double> offsets, Style style,
                                 const EpisodeSetup& setup,
                                 std::span<const double> initial_phases);

// Initial CPG phases drawn from the seed (uniform in [0, 2*pi)).
EpisodeOutcome run_snake_episode(std::span<const double> amplitudes,
                                 std::span<const double> offsets, Style style,
                                 const EpisodeSetup& setup, uint64_t phase_seed);

constexpr double kRewardDistance = 10.0;  // R_dist
constexpr double kRewardSide = 20.0;      // R_side

// R = R_dist * log(d + 1) + beta * R_side * s, beta in {0, +1, -1} by style.
double reward(const EpisodeOutcome& outcome, Style style);

}  // namespace compo
