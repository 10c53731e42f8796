#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "compo/controller.hpp"
#include "compo/optimizer.hpp"

namespace compo {

// ---------------------------------------------------------------------------
// Experiment 1: reproducing periodic target functions with a compositional
// RNN controller driven by a cosine input. Three basis sines are trained
// first; four composite targets are then trained either on top of that
// repertoire ("pretrained") or alone ("scratch").
// ---------------------------------------------------------------------------

enum class TargetId { B1, B2, B3, T1, T2, T3, T4 };

inline constexpr TargetId kBasisTargets[] = {TargetId::B1, TargetId::B2, TargetId::B3};
inline constexpr TargetId kCompositeTargets[] = {TargetId::T1, TargetId::T2, TargetId::T3,
                                                 TargetId::T4};

const char* target_name(TargetId id);
TargetId target_from_name(std::string_view name);

// T2 is typeset ambiguously ("sin x^3"). sin^3 x = 0.75 sin x - 0.25 sin 3x is
// periodic and matches the reported gating decomposition (T2 re-uses mostly
// the sin x basis); sin(x^3) is a chirp that aliases into noise on a
// 100-sample/period grid. Default is sin^3 x; the literal cube stays
// available.
enum class T2Reading { sin_cubed, sin_of_cube };
const char* t2_reading_name(T2Reading reading);
T2Reading t2_reading_from_name(std::string_view name);

double eval_target(TargetId id, double x, T2Reading t2 = T2Reading::sin_cubed);

struct EpisodeConfig {
  int samples_per_period = 100;
  int n_periods = 2;
  int washout_periods = 1;  // leading samples excluded from the loss
  T2Reading t2_reading = T2Reading::sin_cubed;

  int total_samples() const { return samples_per_period * n_periods; }
  int washout_samples() const { return samples_per_period * washout_periods; }
  void validate() const;
};

// Phase grid x_t = 2*pi*t / samples_per_period, t = 0..total-1.
std::vector<double> episode_phases(const EpisodeConfig& cfg);
std::vector<double> episode_inputs(const EpisodeConfig& cfg);   // cos(x_t)
std::vector<double> episode_targets(TargetId id, const EpisodeConfig& cfg);

// Loss of the composed output sum_s weights[s]*traces[s][t] against targets,
// summed over t >= washout_samples. When outputs is non-null it receives the
// composed trace over the full grid. Every caller funnels through this one
// accumulation so stored and re-evaluated losses are bit-identical.
double composed_loss(std::span<const std::span<const double>> traces,
                     std::span<const double> weights, std::span<const double> targets,
                     int washout_samples, std::vector<double>* outputs = nullptr);

struct ComposedRnn {
  std::vector<RnnParams> subs;
  std::vector<double> weights;  // normalized gating row, length subs.size()
};

struct EpisodeEval {
  double loss = 0.0;
  std::vector<double> outputs;  // composed trace over the full grid
};

EpisodeEval run_episode(const ComposedRnn& controller, TargetId target, const EpisodeConfig& cfg);

enum class TrainMode { scratch, pretrained };
const char* train_mode_name(TrainMode mode);

struct TaskRecord {
  TargetId task{};
  TrainMode mode = TrainMode::pretrained;
  int task_index = 1;  // k, 1-based position in the schedule
  int epochs_used = 0;
  double final_error = 0.0;
  std::vector<double> gating_row;  // normalized, length = repertoire size at completion
  std::vector<double> raw_coeffs;  // g_1..g_k as optimized
  std::vector<std::pair<int, double>> cost_history;
};

struct RnnRepertoire {
  std::vector<RnnParams> subs;
  std::vector<TargetId> tasks;
  GatingTable gating;
  std::vector<double> stored_losses;  // final episode loss at each task's completion

  int size() const { return static_cast<int>(subs.size()); }
  // Controller for task k (1-based) with its frozen gating row.
  ComposedRnn controller_for(int task_index) const;
};

struct TrainOptions {
  EpisodeConfig episode;
  OptConfig opt;  // rng_seed is set per task by the caller
  RnnLayout layout;
  double tau = kDefaultTau;

  TrainOptions() {
    opt.target_cost = 0.9;
    opt.max_epochs = 20000;
  }
};

// Trains one more task on top of rep (k = rep.size()+1), appending the new
// sub-controller and gating row. Prior entries are never touched.
TaskRecord train_task(RnnRepertoire& rep, TargetId task, const TrainOptions& options);

// Re-evaluates every completed task's episode loss with its stored gating
// row; bit-identical to stored_losses when nothing has been disturbed.
std::vector<double> reevaluate_losses(const RnnRepertoire& rep, const EpisodeConfig& cfg);

struct Exp1Options {
  TrainOptions train;
  int trials = 1;
  uint64_t base_seed = 0;
};

struct Exp1Trial {
  uint64_t trial_seed = 0;
  RnnRepertoire pretrained;                  // repertoire after B1..B3 + T1..T4
  std::vector<TaskRecord> pretrained_records;  // 7 records
  std::vector<TaskRecord> scratch_records;     // 4 records (T1..T4 alone)
  std::vector<double> reevaluated_losses;      // 7, post-schedule
};

Exp1Trial run_exp1_trial(uint64_t trial_seed, const Exp1Options& options);
std::vector<Exp1Trial> experiment1(const Exp1Options& options);

}  // namespace compo
