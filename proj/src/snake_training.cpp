#include "compo/snake_training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compo/common.hpp"

namespace compo {

DecodedTable compose_tables(std::span<const double> weight_row,
                            std::span<const TableParams> tables, double offset_clamp) {
  if (tables.empty()) throw ValidationError("compose_tables: no tables");
  if (weight_row.size() != tables.size())
    throw ValidationError("compose_tables: " + std::to_string(weight_row.size()) +
                          " weights but " + std::to_string(tables.size()) + " tables");
  const int n = tables[0].n_joints();
  for (const TableParams& t : tables) {
    t.validate();
    if (t.n_joints() != n)
      throw ValidationError("compose_tables: mixed table widths " + std::to_string(n) + " and " +
                            std::to_string(t.n_joints()));
  }

  DecodedTable mixed;
  mixed.amplitudes.assign(n, 0.0);
  mixed.offsets.assign(n, 0.0);
  for (size_t s = 0; s < tables.size(); ++s) {
    const DecodedTable d = table_decode(tables[s], offset_clamp);
    for (int i = 0; i < n; ++i) {
      mixed.amplitudes[i] += weight_row[s] * d.amplitudes[i];
      mixed.offsets[i] += weight_row[s] * d.offsets[i];
    }
  }
  return mixed;
}

DecodedTable StyleRepertoire::composed_for(int task_index, double offset_clamp) const {
  if (task_index < 1 || task_index > size())
    throw ValidationError("StyleRepertoire: task index " + std::to_string(task_index) +
                          " outside 1.." + std::to_string(size()));
  const std::vector<double>& row = gating.rows[task_index - 1];
  return compose_tables(row, tables, offset_clamp);
}

int StyleRepertoire::task_for(Style style) const {
  for (int k = 1; k <= size(); ++k)
    if (styles[k - 1] == style) return k;
  throw ValidationError(std::string("StyleRepertoire: style '") + style_name(style) +
                        "' has not been trained");
}

StyleRecord train_style(StyleRepertoire& rep, Style style, const StyleTrainOptions& options,
                        uint64_t style_seed) {
  options.episode.validate();
  const int k = rep.size() + 1;
  if (static_cast<int>(rep.gating.rows.size()) != rep.size() ||
      static_cast<int>(rep.styles.size()) != rep.size())
    throw ValidationError("train_style: repertoire bookkeeping out of sync");

  TableLayout layout = options.layout;
  layout.coeff_count = k;
  if (layout.n_joints != options.episode.snake.n_joints())
    throw ValidationError("train_style: table has " + std::to_string(layout.n_joints) +
                          " joints but the snake has " +
                          std::to_string(options.episode.snake.n_joints()));
  const int dim = 2 * layout.n_joints + k;

  OptConfig opt = options.opt;
  if (options.episode_budget < opt.population_size)
    throw ValidationError("train_style: episode budget " +
                          std::to_string(options.episode_budget) +
                          " below one generation of " + std::to_string(opt.population_size));
  opt.max_epochs = options.episode_budget / opt.population_size;
  opt.rng_seed = style_seed;

  const double tau = rep.gating.tau;

  // Candidates in one generation share an episode seed (common random
  // numbers); the hook rotates it before each generation is sampled.
  uint64_t episode_seed = 0;
  GenerationHook hook = [&](int epoch) {
    episode_seed = seed_mix(style_seed, 50000 + static_cast<uint64_t>(epoch));
  };

  CostFn cost = [&](std::span<const double> values) {
    auto [cand, coeffs] = decode_table_candidate(values, layout);
    const std::vector<double> weights = gating_normalize(coeffs, k, tau);
    std::vector<TableParams> all(rep.tables.begin(), rep.tables.end());
    all.push_back(std::move(cand));
    const DecodedTable mixed = compose_tables(weights, all);
    const EpisodeOutcome outcome = run_snake_episode(mixed.amplitudes, mixed.offsets, style,
                                                     options.episode, episode_seed);
    return -reward(outcome, style);
  };

  GaussianEsSampler sampler;
  OptResult result = minimize(cost, dim, opt, sampler, hook);

  auto [best_table, best_coeffs] = decode_table_candidate(result.best_genotype, layout);
  rep.tables.push_back(std::move(best_table));
  rep.styles.push_back(style);
  rep.gating.append_task(best_coeffs);
  rep.stored_rewards.push_back(-result.best_cost);

  StyleRecord record;
  record.style = style;
  record.task_index = k;
  record.episodes_used = result.epochs_used * opt.population_size;
  record.generations = result.epochs_used;
  record.best_reward = -result.best_cost;
  record.gating_row = rep.gating.rows.back();
  record.raw_coeffs = best_coeffs;
  record.eval_seed = seed_mix(style_seed, 999983);
  const DecodedTable mixed = rep.composed_for(k);
  record.evaluation = run_snake_episode(mixed.amplitudes, mixed.offsets, style, options.episode,
                                        record.eval_seed);
  record.eval_reward = reward(record.evaluation, style);
  record.reward_history.reserve(result.cost_history.size());
  for (const auto& [epoch, best] : result.cost_history)
    record.reward_history.emplace_back(epoch, -best);
  return record;
}

double style_eval_reward(const StyleRepertoire& rep, int task_index, Style style,
                         const EpisodeSetup& setup, uint64_t eval_seed) {
  const DecodedTable mixed = rep.composed_for(task_index);
  return reward(run_snake_episode(mixed.amplitudes, mixed.offsets, style, setup, eval_seed),
                style);
}

Exp2Result experiment2(const Exp2Options& options) {
  if (options.order.empty()) throw ValidationError("experiment2: empty style order");
  Exp2Result result;
  result.repertoire.gating.tau = options.train.tau;
  for (size_t i = 0; i < options.order.size(); ++i) {
    const uint64_t style_seed = seed_mix(options.base_seed, 8000 + i);
    result.records.push_back(
        train_style(result.repertoire, options.order[i], options.train, style_seed));
  }
  return result;
}

ScheduleResult rollout_schedule(const StyleRepertoire& rep,
                                std::span<const ScheduleSegment> schedule,
                                const EpisodeSetup& setup, uint64_t phase_seed) {
  if (schedule.empty()) throw ValidationError("rollout_schedule: empty schedule");
  setup.validate();
  for (const ScheduleSegment& seg : schedule)
    if (seg.n_steps < 0)
      throw ValidationError("rollout_schedule: negative segment length " +
                            std::to_string(seg.n_steps));

  const std::vector<double> phases =
      random_phases(phase_seed, setup.snake.n_joints());
  const DecodedTable first = rep.composed_for(rep.task_for(schedule[0].style));
  CoupledSim sim(setup, first.amplitudes, first.offsets, phases);

  ScheduleResult result;
  for (const ScheduleSegment& seg : schedule) {
    const DecodedTable mixed = rep.composed_for(rep.task_for(seg.style));
    sim.set_table(mixed.amplitudes, mixed.offsets);
    for (int i = 0; i < seg.n_steps; ++i) {
      if (sim.tick() != StepResult::ok) {
        result.aborted = true;
        return result;
      }
      result.trajectory.push_back(sim.trajectory_row());
      result.row_styles.push_back(seg.style);
    }
  }
  return result;
}

}  // namespace compo
