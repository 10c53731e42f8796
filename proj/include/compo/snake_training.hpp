#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "compo/controller.hpp"
#include "compo/optimizer.hpp"
#include "compo/snake.hpp"

namespace compo {

// ---------------------------------------------------------------------------
// Experiment 2: incremental training of locomotion styles. Each style's
// sub-controller is a table of encoded oscillator amplitudes and offsets; the
// gating row mixes the decoded tables into the (R, X) pair fed to the CPG.
// ---------------------------------------------------------------------------

// Decode-then-mix: R = sum_s w_s*logistic(amp_enc_s), X analogous with the
// clamped tanh. Mixing decoded values keeps every mixed amplitude in (0, 1)
// for any weights from gating_normalize.
DecodedTable compose_tables(std::span<const double> weight_row,
                            std::span<const TableParams> tables,
                            double offset_clamp = kDefaultOffsetClamp);

struct StyleRecord {
  Style style = Style::straight;
  int task_index = 1;     // k, 1-based position in the training order
  int episodes_used = 0;  // training episodes consumed (generations x lambda)
  int generations = 0;
  double best_reward = -std::numeric_limits<double>::infinity();
  std::vector<double> gating_row;  // normalized, repertoire width at completion
  std::vector<double> raw_coeffs;  // g_1..g_k as optimized
  uint64_t eval_seed = 0;
  EpisodeOutcome evaluation;  // one reporting rollout of the completed style
  double eval_reward = 0.0;
  std::vector<std::pair<int, double>> reward_history;  // (generation, best-so-far)
};

struct StyleRepertoire {
  std::vector<TableParams> tables;
  std::vector<Style> styles;
  GatingTable gating;
  std::vector<double> stored_rewards;  // best training reward at each task's completion

  int size() const { return static_cast<int>(tables.size()); }
  // Mixed (R, X) for task k (1-based) under its frozen gating row.
  DecodedTable composed_for(int task_index, double offset_clamp = kDefaultOffsetClamp) const;
  // 1-based task index of a trained style; throws if the style is untrained.
  int task_for(Style style) const;
};

struct StyleTrainOptions {
  EpisodeSetup episode;
  OptConfig opt;  // rng_seed and max_epochs are set per style by train_style
  TableLayout layout;
  double tau = kDefaultTau;
  int episode_budget = 600;  // training evaluations allowed per task
};

// Trains one more style on top of rep (k = rep.size()+1). Every candidate in
// a generation is scored on one common-seed episode; the seed rotates between
// generations. Prior tables and gating rows are never touched. The returned
// record includes one fresh evaluation rollout on a fixed per-style seed.
StyleRecord train_style(StyleRepertoire& rep, Style style, const StyleTrainOptions& options,
                        uint64_t style_seed);

// Reward of task k's style replayed on the given seed; bit-identical to the
// record's eval_reward while the repertoire entries are undisturbed.
double style_eval_reward(const StyleRepertoire& rep, int task_index, Style style,
                         const EpisodeSetup& setup, uint64_t eval_seed);

struct Exp2Options {
  StyleTrainOptions train;
  uint64_t base_seed = 0;
  std::vector<Style> order = {Style::straight, Style::left, Style::right};
};

struct Exp2Result {
  StyleRepertoire repertoire;
  std::vector<StyleRecord> records;
};

Exp2Result experiment2(const Exp2Options& options);

// ---------------------------------------------------------------------------
// Free-running rollouts with style switches.
// ---------------------------------------------------------------------------

struct ScheduleSegment {
  Style style = Style::straight;
  int n_steps = 0;
};

struct ScheduleResult {
  std::vector<TrajectoryRow> trajectory;  // one row per executed tick
  std::vector<Style> row_styles;          // style active at each row
  bool aborted = false;
};

// Runs the simulator continuously, swapping the composed (R, X) at segment
// boundaries. CPG state is not reset at switches; the amplitude dynamics
// smooth the transition. No early termination; a simulator abort stops the
// rollout and flags the result.
ScheduleResult rollout_schedule(const StyleRepertoire& rep,
                                std::span<const ScheduleSegment> schedule,
                                const EpisodeSetup& setup, uint64_t phase_seed);

}  // namespace compo
