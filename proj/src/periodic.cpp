#include "compo/periodic.hpp"

#include <cmath>
#include <string>

#include "compo/common.hpp"

namespace compo {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double logistic_fn(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

const char* target_name(TargetId id) {
  switch (id) {
    case TargetId::B1: return "B1";
    case TargetId::B2: return "B2";
    case TargetId::B3: return "B3";
    case TargetId::T1: return "T1";
    case TargetId::T2: return "T2";
    case TargetId::T3: return "T3";
    case TargetId::T4: return "T4";
  }
  throw ValidationError("target_name: invalid target id");
}

TargetId target_from_name(std::string_view name) {
  if (name == "B1") return TargetId::B1;
  if (name == "B2") return TargetId::B2;
  if (name == "B3") return TargetId::B3;
  if (name == "T1") return TargetId::T1;
  if (name == "T2") return TargetId::T2;
  if (name == "T3") return TargetId::T3;
  if (name == "T4") return TargetId::T4;
  throw ValidationError("unknown target '" + std::string(name) + "' (expected B1..B3, T1..T4)");
}

const char* t2_reading_name(T2Reading reading) {
  return reading == T2Reading::sin_cubed ? "sin_cubed" : "sin_of_cube";
}

T2Reading t2_reading_from_name(std::string_view name) {
  if (name == "sin_cubed") return T2Reading::sin_cubed;
  if (name == "sin_of_cube") return T2Reading::sin_of_cube;
  throw ValidationError("unknown t2_reading '" + std::string(name) +
                        "' (expected sin_cubed or sin_of_cube)");
}

double eval_target(TargetId id, double x, T2Reading t2) {
  switch (id) {
    case TargetId::B1: return std::sin(x);
    case TargetId::B2: return std::sin(2.0 * x);
    case TargetId::B3: return std::sin(3.0 * x);
    case TargetId::T1: return std::cos(x) / 2.0 + std::sin(2.0 * x) / 2.0;
    case TargetId::T2: {
      if (t2 == T2Reading::sin_of_cube) return std::sin(x * x * x);
      const double s = std::sin(x);
      return s * s * s;
    }
    case TargetId::T3: return logistic_fn(std::sin(x + kPi / 6.0) * 20.0) - 0.5;
    case TargetId::T4:
      return (8.0 / (kPi * kPi)) *
             (std::sin(x) - std::sin(3.0 * x) / 9.0 + std::sin(5.0 * x) / 25.0);
  }
  throw ValidationError("eval_target: invalid target id");
}

void EpisodeConfig::validate() const {
  if (samples_per_period < 2)
    throw ValidationError("EpisodeConfig: samples_per_period must be >= 2, got " +
                          std::to_string(samples_per_period));
  if (n_periods < 1)
    throw ValidationError("EpisodeConfig: n_periods must be >= 1, got " +
                          std::to_string(n_periods));
  if (washout_periods < 0 || washout_periods >= n_periods)
    throw ValidationError("EpisodeConfig: washout_periods must be in [0, n_periods), got " +
                          std::to_string(washout_periods));
}

std::vector<double> episode_phases(const EpisodeConfig& cfg) {
  cfg.validate();
  std::vector<double> xs(cfg.total_samples());
  for (int t = 0; t < cfg.total_samples(); ++t)
    xs[t] = 2.0 * kPi * static_cast<double>(t) / cfg.samples_per_period;
  return xs;
}

std::vector<double> episode_inputs(const EpisodeConfig& cfg) {
  std::vector<double> xs = episode_phases(cfg);
  for (double& x : xs) x = std::cos(x);
  return xs;
}

std::vector<double> episode_targets(TargetId id, const EpisodeConfig& cfg) {
  std::vector<double> xs = episode_phases(cfg);
  for (double& x : xs) x = eval_target(id, x, cfg.t2_reading);
  return xs;
}

double composed_loss(std::span<const std::span<const double>> traces,
                     std::span<const double> weights, std::span<const double> targets,
                     int washout_samples, std::vector<double>* outputs) {
  if (traces.size() != weights.size())
    throw ValidationError("composed_loss: " + std::to_string(traces.size()) + " traces but " +
                          std::to_string(weights.size()) + " weights");
  if (traces.empty()) throw ValidationError("composed_loss: no traces");
  const size_t n = targets.size();
  for (const auto& tr : traces)
    if (tr.size() != n)
      throw ValidationError("composed_loss: trace length " + std::to_string(tr.size()) +
                            " does not match " + std::to_string(n) + " targets");
  if (washout_samples < 0 || static_cast<size_t>(washout_samples) > n)
    throw ValidationError("composed_loss: washout outside the sample range");

  if (outputs) outputs->assign(n, 0.0);
  double loss = 0.0;
  for (size_t t = 0; t < n; ++t) {
    double out = 0.0;
    for (size_t s = 0; s < traces.size(); ++s) out += weights[s] * traces[s][t];
    if (outputs) (*outputs)[t] = out;
    if (t >= static_cast<size_t>(washout_samples)) {
      const double e = out - targets[t];
      loss += e * e;
    }
  }
  return loss;
}

EpisodeEval run_episode(const ComposedRnn& controller, TargetId target, const EpisodeConfig& cfg) {
  if (controller.subs.empty()) throw ValidationError("run_episode: controller has no sub-controllers");
  if (controller.subs.size() != controller.weights.size())
    throw ValidationError("run_episode: " + std::to_string(controller.subs.size()) +
                          " sub-controllers but " + std::to_string(controller.weights.size()) +
                          " weights");
  const std::vector<double> inputs = episode_inputs(cfg);
  const std::vector<double> targets = episode_targets(target, cfg);
  std::vector<std::vector<double>> traces;
  traces.reserve(controller.subs.size());
  for (const RnnParams& sub : controller.subs) traces.push_back(rnn_output_trace(sub, inputs));
  const std::vector<std::span<const double>> views(traces.begin(), traces.end());

  EpisodeEval eval;
  eval.loss = composed_loss(views, controller.weights, targets, cfg.washout_samples(),
                            &eval.outputs);
  return eval;
}

const char* train_mode_name(TrainMode mode) {
  return mode == TrainMode::scratch ? "scratch" : "pretrained";
}

ComposedRnn RnnRepertoire::controller_for(int task_index) const {
  if (task_index < 1 || task_index > size())
    throw ValidationError("RnnRepertoire: task index " + std::to_string(task_index) +
                          " outside 1.." + std::to_string(size()));
  ComposedRnn c;
  c.subs.assign(subs.begin(), subs.begin() + task_index);
  const std::vector<double>& row = gating.rows[task_index - 1];
  c.weights.assign(row.begin(), row.begin() + task_index);
  return c;
}

TaskRecord train_task(RnnRepertoire& rep, TargetId task, const TrainOptions& options) {
  options.episode.validate();
  const int k = rep.size() + 1;
  if (static_cast<int>(rep.gating.rows.size()) != rep.size() ||
      static_cast<int>(rep.tasks.size()) != rep.size())
    throw ValidationError("train_task: repertoire bookkeeping out of sync");

  RnnLayout layout = options.layout;
  layout.coeff_count = k;
  const int dim = layout.n_neurons * layout.n_inputs + layout.n_neurons * layout.n_neurons + k;

  const std::vector<double> inputs = episode_inputs(options.episode);
  const std::vector<double> targets = episode_targets(task, options.episode);
  const int washout = options.episode.washout_samples();
  const double tau = rep.gating.tau;

  // Prior sub-controllers are frozen, so their traces are fixed; only the
  // candidate's trace is rolled out per evaluation.
  std::vector<std::vector<double>> prior_traces;
  prior_traces.reserve(k - 1);
  for (const RnnParams& sub : rep.subs) prior_traces.push_back(rnn_output_trace(sub, inputs));

  CostFn cost = [&](std::span<const double> values) {
    auto [cand, coeffs] = decode_rnn_candidate(values, layout);
    const std::vector<double> weights = gating_normalize(coeffs, k, tau);
    const std::vector<double> cand_trace = rnn_output_trace(cand, inputs);
    std::vector<std::span<const double>> views(prior_traces.begin(), prior_traces.end());
    views.emplace_back(cand_trace);
    return composed_loss(views, weights, targets, washout);
  };

  GaussianEsSampler sampler;
  OptResult result = minimize(cost, dim, options.opt, sampler);

  auto [best_params, best_coeffs] = decode_rnn_candidate(result.best_genotype, layout);
  rep.subs.push_back(std::move(best_params));
  rep.tasks.push_back(task);
  rep.gating.append_task(best_coeffs);
  rep.stored_losses.push_back(result.best_cost);

  TaskRecord record;
  record.task = task;
  record.task_index = k;
  record.epochs_used = result.epochs_used;
  record.final_error = result.best_cost;
  record.gating_row = rep.gating.rows.back();
  record.raw_coeffs = best_coeffs;
  record.cost_history = std::move(result.cost_history);
  return record;
}

std::vector<double> reevaluate_losses(const RnnRepertoire& rep, const EpisodeConfig& cfg) {
  std::vector<double> losses;
  losses.reserve(rep.size());
  for (int k = 1; k <= rep.size(); ++k)
    losses.push_back(run_episode(rep.controller_for(k), rep.tasks[k - 1], cfg).loss);
  return losses;
}

Exp1Trial run_exp1_trial(uint64_t trial_seed, const Exp1Options& options) {
  Exp1Trial trial;
  trial.trial_seed = trial_seed;
  trial.pretrained.gating.tau = options.train.tau;

  std::vector<TargetId> schedule;
  schedule.insert(schedule.end(), std::begin(kBasisTargets), std::end(kBasisTargets));
  schedule.insert(schedule.end(), std::begin(kCompositeTargets), std::end(kCompositeTargets));

  for (size_t i = 0; i < schedule.size(); ++i) {
    TrainOptions opts = options.train;
    opts.opt.rng_seed = seed_mix(trial_seed, i + 1);
    TaskRecord rec = train_task(trial.pretrained, schedule[i], opts);
    rec.mode = TrainMode::pretrained;
    trial.pretrained_records.push_back(std::move(rec));
  }

  for (size_t i = 0; i < std::size(kCompositeTargets); ++i) {
    RnnRepertoire solo;
    solo.gating.tau = options.train.tau;
    TrainOptions opts = options.train;
    opts.opt.rng_seed = seed_mix(trial_seed, 100 + i);
    TaskRecord rec = train_task(solo, kCompositeTargets[i], opts);
    rec.mode = TrainMode::scratch;
    trial.scratch_records.push_back(std::move(rec));
  }

  trial.reevaluated_losses = reevaluate_losses(trial.pretrained, options.train.episode);
  return trial;
}

std::vector<Exp1Trial> experiment1(const Exp1Options& options) {
  if (options.trials < 1)
    throw ValidationError("experiment1: trials must be >= 1, got " +
                          std::to_string(options.trials));
  std::vector<Exp1Trial> trials;
  trials.reserve(options.trials);
  for (int i = 0; i < options.trials; ++i)
    trials.push_back(run_exp1_trial(seed_mix(options.base_seed, 7000 + i), options));
  return trials;
}

}  // namespace compo
