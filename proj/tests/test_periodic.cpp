#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "compo/common.hpp"
#include "compo/periodic.hpp"
#include "doctest.h"

using namespace compo;

namespace {

constexpr double kPi = std::numbers::pi;

TrainOptions quick_options(int max_epochs) {
  TrainOptions options;
  options.opt.max_epochs = max_epochs;
  return options;
}

}  // namespace

TEST_CASE("eval_target matches the table of target functions") {
  CHECK(eval_target(TargetId::B1, kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_target(TargetId::B2, 0.4) == doctest::Approx(std::sin(0.8)).epsilon(1e-15));
  CHECK(eval_target(TargetId::B3, 0.4) == doctest::Approx(std::sin(1.2)).epsilon(1e-15));
  CHECK(eval_target(TargetId::T1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(eval_target(TargetId::T3, -kPi / 6.0)) < 1e-15);
  CHECK(eval_target(TargetId::T3, kPi / 3.0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-20.0 * std::sin(kPi / 2.0))) - 0.5)
            .epsilon(1e-14));
  CHECK(eval_target(TargetId::T4, kPi / 2.0) == doctest::Approx(0.933055522252995).epsilon(1e-14));
}

TEST_CASE("the two T2 readings are distinct and correct") {
  const double x = 1.2;
  const double s = std::sin(x);
  CHECK(eval_target(TargetId::T2, x, T2Reading::sin_cubed) ==
        doctest::Approx(s * s * s).epsilon(1e-15));
  CHECK(eval_target(TargetId::T2, x, T2Reading::sin_of_cube) ==
        doctest::Approx(std::sin(x * x * x)).epsilon(1e-15));

  // sin^3 x = 0.75 sin x - 0.25 sin 3x, the identity that makes T2 a basis mix.
  for (int i = 0; i < 32; ++i) {
    const double grid_x = 2.0 * kPi * i / 32.0;
    CHECK(eval_target(TargetId::T2, grid_x, T2Reading::sin_cubed) ==
          doctest::Approx(0.75 * std::sin(grid_x) - 0.25 * std::sin(3.0 * grid_x))
              .epsilon(1e-12));
  }
}

TEST_CASE("target and reading names round-trip") {
  for (TargetId id : {TargetId::B1, TargetId::B2, TargetId::B3, TargetId::T1, TargetId::T2,
                      TargetId::T3, TargetId::T4})
    CHECK(target_from_name(target_name(id)) == id);
  CHECK_THROWS_AS(target_from_name("B9"), ValidationError);
  for (T2Reading reading : {T2Reading::sin_cubed, T2Reading::sin_of_cube})
    CHECK(t2_reading_from_name(t2_reading_name(reading)) == reading);
  CHECK_THROWS_AS(t2_reading_from_name("cubed"), ValidationError);
}

TEST_CASE("the episode grid covers n_periods at the sample rate") {
  EpisodeConfig cfg;
  const auto phases = episode_phases(cfg);
  REQUIRE(phases.size() == 200);
  CHECK(phases[0] == 0.0);
  CHECK(phases[1] == doctest::Approx(2.0 * kPi / 100.0).epsilon(1e-15));
  CHECK(phases[150] == doctest::Approx(3.0 * kPi).epsilon(1e-15));

  const auto inputs = episode_inputs(cfg);
  for (size_t t = 0; t < inputs.size(); ++t)
    CHECK(inputs[t] == doctest::Approx(std::cos(phases[t])).epsilon(1e-15));

  const auto targets = episode_targets(TargetId::B2, cfg);
  CHECK(targets[10] == doctest::Approx(std::sin(2.0 * phases[10])).epsilon(1e-15));
  CHECK(std::abs(targets[25]) < 1e-12);  // x = pi/2, sin(2x) vanishes
  CHECK(cfg.washout_samples() == 100);
}

TEST_CASE("episode configuration invariants") {
  EpisodeConfig cfg;
  cfg.samples_per_period = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = EpisodeConfig{};
  cfg.washout_periods = 2;  // must stay below n_periods
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = EpisodeConfig{};
  cfg.washout_periods = -1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("composed_loss is the post-washout squared error of the mix") {
  EpisodeConfig cfg;
  const auto targets = episode_targets(TargetId::B1, cfg);

  SUBCASE("a trace equal to the target scores zero") {
    const std::vector<std::span<const double>> traces = {targets};
    const std::vector<double> weights = {1.0};
    CHECK(composed_loss(traces, weights, targets, cfg.washout_samples()) == 0.0);
  }

  SUBCASE("the all-zero controller scores the target's power") {
    const std::vector<double> zeros(targets.size(), 0.0);
    const std::vector<std::span<const double>> traces = {zeros};
    const std::vector<double> weights = {1.0};
    std::vector<double> outputs;
    const double loss = composed_loss(traces, weights, targets, cfg.washout_samples(), &outputs);
    CHECK(loss == doctest::Approx(50.0).epsilon(1e-13));
    CHECK(outputs.size() == targets.size());
    for (double out : outputs) CHECK(out == 0.0);
  }

  SUBCASE("washout samples are excluded") {
    std::vector<double> off_by_one(targets.size(), 0.0);
    for (size_t t = 0; t < 100; ++t) off_by_one[t] = targets[t] + 1.0;  // washout only
    for (size_t t = 100; t < targets.size(); ++t) off_by_one[t] = targets[t];
    const std::vector<std::span<const double>> traces = {off_by_one};
    const std::vector<double> weights = {1.0};
    CHECK(composed_loss(traces, weights, targets, 100) == 0.0);
  }

  SUBCASE("shape violations throw") {
    const std::vector<double> zeros(targets.size(), 0.0);
    const std::vector<double> short_trace(5, 0.0);
    const std::vector<std::span<const double>> traces = {zeros};
    const std::vector<std::span<const double>> bad = {short_trace};
    const std::vector<double> one = {1.0};
    const std::vector<double> two = {0.5, 0.5};
    CHECK_THROWS_AS(composed_loss(traces, two, targets, 100), ValidationError);
    CHECK_THROWS_AS(composed_loss(bad, one, targets, 100), ValidationError);
    CHECK_THROWS_AS(composed_loss(traces, one, targets, 500), ValidationError);
    CHECK_THROWS_AS(composed_loss({}, {}, targets, 100), ValidationError);
  }
}

TEST_CASE("run_episode drives the composed RNN over the grid") {
  EpisodeConfig cfg;
  ComposedRnn controller;
  controller.subs = {make_rnn(7, 1)};
  controller.weights = {1.0};
  const auto eval = run_episode(controller, TargetId::B1, cfg);
  CHECK(eval.loss == doctest::Approx(50.0).epsilon(1e-13));
  CHECK(eval.outputs.size() == 200);

  controller.subs = {make_rnn(7, 2)};
  CHECK_THROWS_AS(run_episode(controller, TargetId::B1, cfg), ValidationError);
  controller.subs = {make_rnn(7, 1)};
  controller.weights = {0.5, 0.5};
  CHECK_THROWS_AS(run_episode(controller, TargetId::B1, cfg), ValidationError);
}

TEST_CASE("default training options carry the paper's stopping rule") {
  const TrainOptions options;
  CHECK(options.opt.target_cost == 0.9);
  CHECK(options.opt.max_epochs == 20000);
  CHECK(options.tau == 4.0);
}

TEST_CASE("the first trained task owns its delta gating row") {
  RnnRepertoire rep;
  TrainOptions options = quick_options(2000);
  options.opt.rng_seed = 11;
  const TaskRecord record = train_task(rep, TargetId::B1, options);
  CHECK(rep.size() == 1);
  CHECK(record.task_index == 1);
  CHECK(record.gating_row == std::vector<double>{1.0});
  CHECK(record.epochs_used <= 2000);
  if (record.epochs_used < 2000) CHECK(record.final_error <= 0.9);
  CHECK(record.final_error == rep.stored_losses[0]);
  CHECK(record.cost_history.size() == static_cast<size_t>(record.epochs_used));

  const auto reevaluated = reevaluate_losses(rep, options.episode);
  REQUIRE(reevaluated.size() == 1);
  CHECK(reevaluated[0] == rep.stored_losses[0]);
}

TEST_CASE("later tasks leave earlier ones bit-identical") {
  RnnRepertoire rep;
  TrainOptions options = quick_options(400);
  options.opt.rng_seed = 3;
  train_task(rep, TargetId::B1, options);
  const RnnParams first_sub = rep.subs[0];
  const std::vector<double> first_row = rep.gating.rows[0];
  const double first_loss = rep.stored_losses[0];

  options = quick_options(3);  // deliberately unconverged second task
  options.opt.rng_seed = 4;
  const TaskRecord second = train_task(rep, TargetId::B2, options);
  CHECK(second.task_index == 2);
  CHECK(second.epochs_used == 3);
  REQUIRE(second.gating_row.size() == 2);
  CHECK(second.gating_row[0] + second.gating_row[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(rep.subs[0].input_weights == first_sub.input_weights);
  CHECK(rep.subs[0].recurrent_weights == first_sub.recurrent_weights);
  CHECK(rep.gating.rows[0] == std::vector<double>{1.0, 0.0});
  CHECK(first_row == std::vector<double>{1.0});
  CHECK(reevaluate_losses(rep, options.episode)[0] == first_loss);
  rep.gating.validate();

  const ComposedRnn c1 = rep.controller_for(1);
  CHECK(c1.subs.size() == 1);
  CHECK(c1.weights == std::vector<double>{1.0});
  CHECK_THROWS_AS(rep.controller_for(3), ValidationError);
}

TEST_CASE("experiment1 produces the full schedule of records") {
  Exp1Options options;
  options.train = quick_options(2);
  options.trials = 1;
  options.base_seed = 99;
  const auto trials = experiment1(options);
  REQUIRE(trials.size() == 1);
  const Exp1Trial& trial = trials[0];

  REQUIRE(trial.pretrained_records.size() == 7);
  REQUIRE(trial.scratch_records.size() == 4);
  REQUIRE(trial.reevaluated_losses.size() == 7);
  const TargetId expected[] = {TargetId::B1, TargetId::B2, TargetId::B3, TargetId::T1,
                               TargetId::T2, TargetId::T3, TargetId::T4};
  for (int i = 0; i < 7; ++i) {
    CHECK(trial.pretrained_records[i].task == expected[i]);
    CHECK(trial.pretrained_records[i].mode == TrainMode::pretrained);
    CHECK(trial.pretrained_records[i].task_index == i + 1);
    CHECK(trial.reevaluated_losses[i] == trial.pretrained.stored_losses[i]);
  }
  for (int i = 0; i < 4; ++i) {
    CHECK(trial.scratch_records[i].task == expected[3 + i]);
    CHECK(trial.scratch_records[i].mode == TrainMode::scratch);
    CHECK(trial.scratch_records[i].gating_row == std::vector<double>{1.0});
  }
  // Masked entries of every final gating row are exactly zero.
  for (int k = 1; k <= 7; ++k)
    for (int s = k; s < 7; ++s) CHECK(trial.pretrained.gating.rows[k - 1][s] == 0.0);
  trial.pretrained.gating.validate();

  const auto rerun = experiment1(options);
  for (int i = 0; i < 7; ++i) {
    CHECK(rerun[0].pretrained_records[i].final_error ==
          trial.pretrained_records[i].final_error);
    CHECK(rerun[0].reevaluated_losses[i] == trial.reevaluated_losses[i]);
  }
  CHECK_THROWS_AS(experiment1(Exp1Options{.train = quick_options(2), .trials = 0}),
                  ValidationError);
}
