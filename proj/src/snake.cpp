#include "compo/snake.hpp"

#include <cmath>
#include <string>

#include "compo/common.hpp"

namespace compo {

namespace {

Eigen::Vector2d tangent(double heading) { return {std::cos(heading), std::sin(heading)}; }
Eigen::Vector2d normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

}  // namespace

void SnakeConfig::validate() const {
  if (n_links < 2) throw ValidationError("SnakeConfig: n_links must be >= 2, got " + std::to_string(n_links));
  if (!(link_length > 0.0)) throw ValidationError("SnakeConfig: link_length must be positive");
  if (!(link_mass > 0.0)) throw ValidationError("SnakeConfig: link_mass must be positive");
  if (!(c_t >= 0.0)) throw ValidationError("SnakeConfig: c_t must be non-negative");
  if (!(c_n >= c_t)) throw ValidationError("SnakeConfig: c_n must be >= c_t (anisotropy drives propulsion)");
  if (!(servo_kp >= 0.0)) throw ValidationError("SnakeConfig: servo_kp must be non-negative");
  if (!(servo_kd >= 0.0)) throw ValidationError("SnakeConfig: servo_kd must be non-negative");
  if (!(dt > 0.0)) throw ValidationError("SnakeConfig: dt must be positive");
  if (substeps < 1) throw ValidationError("SnakeConfig: substeps must be >= 1");
  if (!(joint_limit > 0.0)) throw ValidationError("SnakeConfig: joint_limit must be positive");
}

double servo_torque(double phi_ref, double phi, double phi_dot, const SnakeConfig& cfg) {
  return cfg.servo_kp * (phi_ref - phi) - cfg.servo_kd * phi_dot;
}

Eigen::Vector2d friction_force(const Eigen::Vector2d& link_velocity, double link_heading,
                               const SnakeConfig& cfg) {
  const Eigen::Vector2d t_hat = tangent(link_heading);
  const Eigen::Vector2d n_hat = normal(link_heading);
  const double v_t = link_velocity.dot(t_hat);
  const double v_n = link_velocity.dot(n_hat);
  return -cfg.c_t * v_t * t_hat - cfg.c_n * v_n * n_hat;
}

SnakeModel::SnakeModel(const SnakeConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.n_links;
  const double l = cfg_.link_length;
  const double m = cfg_.link_mass;

  // c_i = p + sum_k geom_(i,k) e(psi_k): the head link is the reference, each
  // later link hangs off the previous joint by half a length on each side.
  geom_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    geom_(i, 0) = -0.5 * l;
    for (int k = 1; k < i; ++k) geom_(i, k) = -l;
    geom_(i, i) = -0.5 * l;
  }
  coupling_ = m * geom_.transpose() * geom_;
  heading_mass_ = m * geom_.colwise().sum().transpose();
  total_mass_ = m * n;
  link_inertia_ = m * l * l / 12.0;
}

SnakeState SnakeModel::initial_state() const {
  SnakeState st;
  st.q = Eigen::VectorXd::Zero(2 + cfg_.n_links);
  st.qd = Eigen::VectorXd::Zero(2 + cfg_.n_links);
  return st;
}

void SnakeModel::derivatives(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                             std::span<const double> setpoints, Eigen::VectorXd& qdd) const {
  const int n = cfg_.n_links;
  const Eigen::Vector2d pd = qd.head<2>();

  Eigen::VectorXd cos_psi(n), sin_psi(n);
  for (int k = 0; k < n; ++k) {
    cos_psi[k] = std::cos(q[2 + k]);
    sin_psi[k] = std::sin(q[2 + k]);
  }

  // Friction at every link centre, projected onto the generalized coordinates.
  Eigen::Vector2d force_total = Eigen::Vector2d::Zero();
  Eigen::VectorXd torque(n);
  torque.setZero();
  for (int i = 0; i < n; ++i) {
    Eigen::Vector2d v = pd;
    for (int k = 0; k <= i && k < n; ++k) {
      const double a = geom_(i, k);
      if (a != 0.0) v += a * qd[2 + k] * Eigen::Vector2d(-sin_psi[k], cos_psi[k]);
    }
    const Eigen::Vector2d f = friction_force(v, q[2 + i], cfg_);
    force_total += f;
    for (int k = 0; k <= i && k < n; ++k) {
      const double a = geom_(i, k);
      if (a != 0.0) torque[k] += a * f.dot(Eigen::Vector2d(-sin_psi[k], cos_psi[k]));
    }
  }

  // PD servos: +tau on the distal link, -tau on the proximal one, so positive
  // torque increases phi_j = psi_{j+1} - psi_j.
  for (int j = 0; j + 1 < n; ++j) {
    const double phi = q[3 + j] - q[2 + j];
    const double phi_dot = qd[3 + j] - qd[2 + j];
    const double tau = servo_torque(setpoints[j], phi, phi_dot, cfg_);
    torque[j + 1] += tau;
    torque[j] -= tau;
  }

  Eigen::MatrixXd mass(n + 2, n + 2);
  Eigen::VectorXd rhs(n + 2);
  mass.setZero();
  mass(0, 0) = total_mass_;
  mass(1, 1) = total_mass_;
  Eigen::Vector2d rhs_p = force_total;
  for (int k = 0; k < n; ++k) {
    const double b = heading_mass_[k];
    mass(0, 2 + k) = -b * sin_psi[k];
    mass(1, 2 + k) = b * cos_psi[k];
    mass(2 + k, 0) = mass(0, 2 + k);
    mass(2 + k, 1) = mass(1, 2 + k);
    rhs_p += b * qd[2 + k] * qd[2 + k] * Eigen::Vector2d(cos_psi[k], sin_psi[k]);
  }
  rhs.head<2>() = rhs_p;
  for (int j = 0; j < n; ++j) {
    double centripetal = 0.0;
    for (int k = 0; k < n; ++k) {
      const double c_jk = cos_psi[j] * cos_psi[k] + sin_psi[j] * sin_psi[k];
      const double s_jk = sin_psi[j] * cos_psi[k] - cos_psi[j] * sin_psi[k];
      mass(2 + j, 2 + k) = coupling_(j, k) * c_jk;
      centripetal += coupling_(j, k) * s_jk * qd[2 + k] * qd[2 + k];
    }
    mass(2 + j, 2 + j) += link_inertia_;
    rhs[2 + j] = torque[j] - centripetal;
  }

  qdd = mass.ldlt().solve(rhs);
}

StepResult SnakeModel::step(SnakeState& state, std::span<const double> joint_setpoints) const {
  const int n = cfg_.n_links;
  if (static_cast<int>(joint_setpoints.size()) != n - 1)
    throw ValidationError("SnakeModel::step: expected " + std::to_string(n - 1) +
                          " joint setpoints, got " + std::to_string(joint_setpoints.size()));
  if (state.q.size() != n + 2 || state.qd.size() != n + 2)
    throw ValidationError("SnakeModel::step: state dimension mismatch");

  const double h = cfg_.dt / cfg_.substeps;
  Eigen::VectorXd a1, a2, a3, a4;
  for (int sub = 0; sub < cfg_.substeps; ++sub) {
    const Eigen::VectorXd q0 = state.q;
    const Eigen::VectorXd v0 = state.qd;
    derivatives(q0, v0, joint_setpoints, a1);
    derivatives(q0 + 0.5 * h * v0, v0 + 0.5 * h * a1, joint_setpoints, a2);
    derivatives(q0 + 0.5 * h * (v0 + 0.5 * h * a1), v0 + 0.5 * h * a2, joint_setpoints, a3);
    derivatives(q0 + h * (v0 + 0.5 * h * a2), v0 + h * a3, joint_setpoints, a4);
    state.q = q0 + (h / 6.0) * (v0 + 2.0 * (v0 + 0.5 * h * a1) + 2.0 * (v0 + 0.5 * h * a2) +
                                (v0 + h * a3));
    state.qd = v0 + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);

    if (!state.q.allFinite() || !state.qd.allFinite()) return StepResult::non_finite;
    for (int j = 0; j + 1 < n; ++j) {
      if (std::abs(state.q[3 + j] - state.q[2 + j]) > cfg_.joint_limit) return StepResult::joint_limit;
    }
  }
  return StepResult::ok;
}

Eigen::Vector2d SnakeModel::link_center(const SnakeState& state, int link) const {
  Eigen::Vector2d c = state.q.head<2>();
  for (int k = 0; k <= link; ++k) {
    const double a = geom_(link, k);
    if (a != 0.0) c += a * tangent(state.q[2 + k]);
  }
  return c;
}

Eigen::Vector2d SnakeModel::link_velocity(const SnakeState& state, int link) const {
  Eigen::Vector2d v = state.qd.head<2>();
  for (int k = 0; k <= link; ++k) {
    const double a = geom_(link, k);
    if (a != 0.0) v += a * state.qd[2 + k] * normal(state.q[2 + k]);
  }
  return v;
}

Eigen::Vector2d SnakeModel::com(const SnakeState& state) const {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (int i = 0; i < cfg_.n_links; ++i) sum += link_center(state, i);
  return sum / cfg_.n_links;
}

Eigen::Vector2d SnakeModel::com_velocity(const SnakeState& state) const {
  return linear_momentum(state) / total_mass_;
}

Eigen::Vector2d SnakeModel::linear_momentum(const SnakeState& state) const {
  Eigen::Vector2d p = total_mass_ * state.qd.head<2>();
  for (int k = 0; k < cfg_.n_links; ++k)
    p += heading_mass_[k] * state.qd[2 + k] * normal(state.q[2 + k]);
  return p;
}

double SnakeModel::angular_momentum(const SnakeState& state) const {
  double lz = 0.0;
  for (int i = 0; i < cfg_.n_links; ++i) {
    const Eigen::Vector2d c = link_center(state, i);
    const Eigen::Vector2d v = link_velocity(state, i);
    lz += cfg_.link_mass * (c.x() * v.y() - c.y() * v.x());
    lz += link_inertia_ * state.qd[2 + i];
  }
  return lz;
}

double SnakeModel::kinetic_energy(const SnakeState& state) const {
  double e = 0.0;
  for (int i = 0; i < cfg_.n_links; ++i) {
    e += 0.5 * cfg_.link_mass * link_velocity(state, i).squaredNorm();
    e += 0.5 * link_inertia_ * state.qd[2 + i] * state.qd[2 + i];
  }
  return e;
}

std::vector<double> SnakeModel::joint_angles(const SnakeState& state) const {
  std::vector<double> phi(cfg_.n_links - 1);
  for (int j = 0; j + 1 < cfg_.n_links; ++j) phi[j] = state.q[3 + j] - state.q[2 + j];
  return phi;
}

const char* style_name(Style style) {
  switch (style) {
    case Style::straight: return "straight";
    case Style::left: return "left";
    case Style::right: return "right";
  }
  throw ValidationError("style_name: invalid style");
}

Style style_from_name(std::string_view name) {
  if (name == "straight") return Style::straight;
  if (name == "left") return Style::left;
  if (name == "right") return Style::right;
  throw ValidationError("unknown style '" + std::string(name) + "' (expected straight|left|right)");
}

void EpisodeSetup::validate() const {
  snake.validate();
  if (!(cpg_nu > 0.0)) throw ValidationError("EpisodeSetup: cpg_nu must be positive");
  if (!(cpg_alpha > 0.0)) throw ValidationError("EpisodeSetup: cpg_alpha must be positive");
  if (!(cpg_coupling_weight > 0.0))
    throw ValidationError("EpisodeSetup: cpg_coupling_weight must be positive");
  if (cpg_substeps < 1) throw ValidationError("EpisodeSetup: cpg_substeps must be >= 1");
  if (max_steps < 1) throw ValidationError("EpisodeSetup: max_steps must be >= 1");
  if (!(turn_termination_angle > 0.0))
    throw ValidationError("EpisodeSetup: turn_termination_angle must be positive");
}

CoupledSim::CoupledSim(const EpisodeSetup& setup, std::span<const double> amplitudes,
                       std::span<const double> offsets, std::span<const double> initial_phases)
    : setup_(setup), model_(setup.snake) {
  setup_.validate();
  const int nj = setup_.snake.n_joints();
  if (static_cast<int>(initial_phases.size()) != nj)
    throw ValidationError("CoupledSim: expected " + std::to_string(nj) + " initial phases, got " +
                          std::to_string(initial_phases.size()));

  cpg_.n_oscillators = nj;
  cpg_.nu.assign(nj, setup_.cpg_nu);
  cpg_.alpha = setup_.cpg_alpha;
  cpg_.couplings =
      build_chain(nj, setup_.snake.n_links, setup_.cpg_coupling_weight, setup_.wave);
  set_table(amplitudes, offsets);
  cpg_state_ = make_cpg_state(std::vector<double>(initial_phases.begin(), initial_phases.end()));
  snake_ = model_.initial_state();
  com_start_ = model_.com(snake_);
  heading_start_ = model_.heading(snake_);
}

void CoupledSim::set_table(std::span<const double> amplitudes, std::span<const double> offsets) {
  const int nj = setup_.snake.n_joints();
  if (static_cast<int>(amplitudes.size()) != nj || static_cast<int>(offsets.size()) != nj)
    throw ValidationError("CoupledSim::set_table: expected " + std::to_string(nj) +
                          " amplitudes and offsets, got " + std::to_string(amplitudes.size()) +
                          " and " + std::to_string(offsets.size()));
  cpg_.target_amplitudes.assign(amplitudes.begin(), amplitudes.end());
  cpg_.offsets.assign(offsets.begin(), offsets.end());
  cpg_.validate();
}

StepResult CoupledSim::tick() {
  cpg_state_ = cpg_step(cpg_state_, cpg_, setup_.snake.dt, setup_.cpg_substeps);
  const std::vector<double> setpoints = cpg_output(cpg_state_, cpg_);
  SnakeState next = snake_;
  const StepResult result = model_.step(next, setpoints);
  if (result == StepResult::ok) {
    snake_ = std::move(next);
    ++steps_;
  }
  return result;
}

double CoupledSim::heading_change() const { return model_.heading(snake_) - heading_start_; }

Eigen::Vector2d CoupledSim::com_displacement() const { return model_.com(snake_) - com_start_; }

double CoupledSim::lateral_displacement() const {
  const Eigen::Vector2d delta = com_displacement();
  return -std::sin(heading_start_) * delta.x() + std::cos(heading_start_) * delta.y();
}

TrajectoryRow CoupledSim::trajectory_row() const {
  TrajectoryRow row;
  row.step = steps_;
  row.t = time();
  const Eigen::Vector2d head = model_.head_position(snake_);
  const Eigen::Vector2d c = model_.com(snake_);
  row.head_x = head.x();
  row.head_y = head.y();
  row.com_x = c.x();
  row.com_y = c.y();
  row.heading = model_.heading(snake_);
  row.joints = model_.joint_angles(snake_);
  return row;
}

EpisodeOutcome run_snake_episode(std::span<const double> amplitudes,
                                 std::span<const double> offsets, Style style,
                                 const EpisodeSetup& setup,
                                 std::span<const double> initial_phases) {
  CoupledSim sim(setup, amplitudes, offsets, initial_phases);
  EpisodeOutcome outcome;
  outcome.trajectory.reserve(setup.max_steps);
  for (int step = 0; step < setup.max_steps; ++step) {
    const StepResult result = sim.tick();
    if (result != StepResult::ok) {
      outcome.aborted = true;
      break;
    }
    outcome.trajectory.push_back(sim.trajectory_row());
    const double turned = sim.heading_change();
    if (style == Style::left && turned >= setup.turn_termination_angle) break;
    if (style == Style::right && turned <= -setup.turn_termination_angle) break;
  }
  outcome.steps_executed = sim.steps();
  outcome.d = sim.com_displacement().norm();
  outcome.s = sim.lateral_displacement();
  outcome.heading_change = sim.heading_change();
  return outcome;
}

EpisodeOutcome run_snake_episode(std::span<const double> amplitudes,
                                 std::span<const double> offsets, Style style,
                                 const EpisodeSetup& setup, uint64_t phase_seed) {
  const std::vector<double> phases = random_phases(phase_seed, setup.snake.n_joints());
  return run_snake_episode(amplitudes, offsets, style, setup, std::span<const double>(phases));
}

double reward(const EpisodeOutcome& outcome, Style style) {
  double beta = 0.0;
  if (style == Style::left) beta = 1.0;
  if (style == Style::right) beta = -1.0;
  return kRewardDistance * std::log(outcome.d + 1.0) + beta * kRewardSide * outcome.s;
}

}  // namespace compo
