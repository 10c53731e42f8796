#include "compo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "compo/common.hpp"
#include "compo/io.hpp"

namespace compo {
namespace {

namespace fs = std::filesystem;

int parse_steps(const std::string& text) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || value < 0)
    throw ValidationError("schedule steps must be a non-negative integer, got \"" + text + "\"");
  return value;
}

std::vector<ScheduleSegment> parse_schedule(const std::string& text) {
  if (text.empty()) throw ValidationError("schedule must not be empty");
  std::vector<ScheduleSegment> segments;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string part =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    const size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw ValidationError("schedule segment \"" + part + "\" is not style:steps");
    ScheduleSegment segment;
    segment.style = style_from_name(part.substr(0, colon));
    segment.n_steps = parse_steps(part.substr(colon + 1));
    segments.push_back(segment);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return segments;
}

double median(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void prepare_out(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  save_run_config(out_path(cfg, "config.json"), cfg);
}

// ---- exp1 ----------------------------------------------------------------

void run_exp1_train(const RunConfig& cfg) {
  const uint64_t hash = config_hash(cfg);
  prepare_out(cfg);

  Exp1Options options;
  options.train.episode = cfg.episode;
  options.train.opt = cfg.opt;
  options.train.tau = cfg.tau;
  options.trials = cfg.trials;
  options.base_seed = cfg.seed;

  const std::vector<Exp1Trial> trials = experiment1(options);

  write_exp1_metrics(out_path(cfg, "exp1_metrics.csv"), exp1_metrics(trials), cfg.seed, hash);
  const RnnRepertoire& rep = trials.front().pretrained;
  std::vector<std::string> labels;
  for (TargetId task : rep.tasks) labels.emplace_back(target_name(task));
  write_gating_report(out_path(cfg, "exp1_gating.csv"),
                      gating_report(rep.gating, labels, labels), cfg.seed, hash);
  write_genome(out_path(cfg, "exp1_genome.json"), make_genome(rep, cfg.seed, hash));

  std::printf("exp1: %d trial(s), seed %llu\n", cfg.trials,
              static_cast<unsigned long long>(cfg.seed));
  std::printf("%-5s %18s %18s\n", "task", "median pretrained", "median scratch");
  for (TargetId task : kCompositeTargets) {
    std::vector<int> pre, scr;
    for (const Exp1Trial& trial : trials) {
      for (const TaskRecord& r : trial.pretrained_records)
        if (r.task == task) pre.push_back(r.epochs_used);
      for (const TaskRecord& r : trial.scratch_records)
        if (r.task == task) scr.push_back(r.epochs_used);
    }
    std::printf("%-5s %18.1f %18.1f\n", target_name(task), median(pre), median(scr));
  }
  std::printf("wrote %s\n", out_path(cfg, "exp1_metrics.csv").c_str());
}

void run_exp1_report(const RunConfig& cfg, const std::string& genome_arg) {
  const std::string path =
      genome_arg.empty() ? out_path(cfg, "exp1_genome.json") : genome_arg;
  const GenomeFile genome = read_genome(path);
  const RnnRepertoire rep = rnn_repertoire(genome);

  std::vector<std::string> labels;
  for (TargetId task : rep.tasks) labels.emplace_back(target_name(task));
  const std::vector<GatingReportRow> rows = gating_report(rep.gating, labels, labels);
  fs::create_directories(cfg.out_dir);
  write_gating_report(out_path(cfg, "exp1_gating.csv"), rows, genome.seed, genome.config);

  std::printf("genome %s: %d sub-controller(s), tau %.3f\n", path.c_str(), rep.size(),
              rep.gating.tau);
  for (int k = 0; k < rep.gating.n_tasks(); ++k) {
    std::printf("%-5s", labels[k].c_str());
    for (double w : rep.gating.rows[k]) std::printf(" %7.4f", w);
    std::printf("\n");
  }
  std::printf("wrote %s\n", out_path(cfg, "exp1_gating.csv").c_str());
}

// ---- exp2 ----------------------------------------------------------------

StyleTrainOptions style_options(const RunConfig& cfg) {
  StyleTrainOptions options;
  options.episode = cfg.snake_episode;
  options.opt = cfg.opt;
  // Styles train on a fixed episode budget; the loss threshold is an
  // experiment-1 notion and must not stop reward maximization early.
  options.opt.target_cost = -std::numeric_limits<double>::infinity();
  options.layout.n_joints = cfg.snake_episode.snake.n_joints();
  options.tau = cfg.tau;
  options.episode_budget = cfg.episode_budget;
  return options;
}

void run_exp2_train(const RunConfig& cfg) {
  const uint64_t hash = config_hash(cfg);
  prepare_out(cfg);

  Exp2Options options;
  options.train = style_options(cfg);
  options.base_seed = cfg.seed;

  const Exp2Result result = experiment2(options);

  write_exp2_metrics(out_path(cfg, "exp2_metrics.csv"), exp2_metrics(result.records), cfg.seed,
                     hash);
  std::vector<std::string> labels;
  for (Style style : result.repertoire.styles) labels.emplace_back(style_name(style));
  write_gating_report(out_path(cfg, "exp2_gating.csv"),
                      gating_report(result.repertoire.gating, labels, labels), cfg.seed, hash);
  write_genome(out_path(cfg, "exp2_genome.json"),
               make_genome(result.repertoire, cfg.seed, hash));

  std::printf("exp2: seed %llu, %d episodes per style\n",
              static_cast<unsigned long long>(cfg.seed), cfg.episode_budget);
  for (const StyleRecord& record : result.records)
    std::printf("%-8s reward %8.3f  d %6.3f m  s %+6.3f m  heading %+6.3f rad\n",
                style_name(record.style), record.best_reward, record.evaluation.d,
                record.evaluation.s, record.evaluation.heading_change);
  std::printf("wrote %s\n", out_path(cfg, "exp2_metrics.csv").c_str());
}

void run_exp2_rollout(const RunConfig& cfg, const std::string& genome_arg,
                      const std::string& schedule_text) {
  const uint64_t hash = config_hash(cfg);
  const std::string path =
      genome_arg.empty() ? out_path(cfg, "exp2_genome.json") : genome_arg;
  const GenomeFile genome = read_genome(path);
  const StyleRepertoire rep = style_repertoire(genome);
  const std::vector<ScheduleSegment> schedule = parse_schedule(schedule_text);

  const ScheduleResult result = rollout_schedule(rep, schedule, cfg.snake_episode, cfg.seed);

  fs::create_directories(cfg.out_dir);
  write_trajectory(out_path(cfg, "trajectory.csv"), result.trajectory,
                   cfg.snake_episode.snake.n_joints(), cfg.seed, hash);

  std::printf("rollout: %zu step(s)%s\n", result.trajectory.size(),
              result.aborted ? " (aborted by the simulator)" : "");
  if (!result.trajectory.empty()) {
    const TrajectoryRow& last = result.trajectory.back();
    std::printf("final head (%.3f, %.3f) m, heading %+.3f rad\n", last.head_x, last.head_y,
                last.heading);
  }
  std::printf("wrote %s\n", out_path(cfg, "trajectory.csv").c_str());
}

// ---- diagnostics ----------------------------------------------------------

void run_cpg_sim(const RunConfig& cfg, int steps, double amplitude, double offset) {
  if (steps < 0) throw ValidationError("--steps must be non-negative");
  const uint64_t hash = config_hash(cfg);
  const EpisodeSetup& setup = cfg.snake_episode;
  const int n = setup.snake.n_joints();

  const CpgParams params = make_chain_params(
      n, setup.cpg_nu, amplitude, offset, setup.cpg_alpha,
      build_chain(n, setup.snake.n_links, setup.cpg_coupling_weight, setup.wave));
  CpgState state = make_cpg_state(random_phases(cfg.seed, n));

  std::vector<std::string> header = {"t"};
  for (int i = 1; i <= n; ++i) header.push_back("theta_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("r_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("x_" + std::to_string(i));

  std::vector<std::vector<std::string>> rows;
  rows.reserve(steps + 1);
  for (int step = 0; step <= steps; ++step) {
    std::vector<std::string> row = {format_g17(step * setup.snake.dt)};
    const std::vector<double> outputs = cpg_output(state, params);
    for (double theta : state.theta) row.push_back(format_g17(theta));
    for (double r : state.r) row.push_back(format_g17(r));
    for (double x : outputs) row.push_back(format_g17(x));
    rows.push_back(std::move(row));
    if (step < steps) state = cpg_step(state, params, setup.snake.dt, setup.cpg_substeps);
  }

  fs::create_directories(cfg.out_dir);
  write_csv(out_path(cfg, "cpg_trace.csv"), run_meta(cfg.seed, hash), header, rows);

  std::printf("cpg: %d oscillator(s), %d step(s) of %.3f s\n", n, steps, setup.snake.dt);
  if (n > 1) {
    std::printf("final neighbour phase differences (rad):");
    for (int i = 0; i + 1 < n; ++i) std::printf(" %+.4f", state.theta[i + 1] - state.theta[i]);
    std::printf("\n");
  }
  std::printf("wrote %s\n", out_path(cfg, "cpg_trace.csv").c_str());
}

void run_es_bench(const RunConfig& cfg) {
  const uint64_t hash = config_hash(cfg);
  OptConfig opt;
  opt.max_epochs = 2000;
  opt.target_cost = 1e-6;

  const CostFn sphere = [](std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return sum;
  };

  fs::create_directories(cfg.out_dir);
  std::vector<std::vector<std::string>> rows;
  int reached = 0;
  for (int run = 0; run < 10; ++run) {
    opt.rng_seed = seed_mix(cfg.seed, 4000 + run);
    const OptResult result = minimize(sphere, 10, opt);
    if (result.best_cost < 1e-6) ++reached;
    rows.push_back({std::to_string(run), std::to_string(result.epochs_used),
                    format_g17(result.best_cost)});
    std::printf("run %d: %4d generation(s), best cost %.3e\n", run, result.epochs_used,
                result.best_cost);
    if (run == 0)
      write_cost_history(out_path(cfg, "es_history.csv"), result.cost_history, opt.rng_seed,
                         hash);
  }
  write_csv(out_path(cfg, "es_bench.csv"), run_meta(cfg.seed, hash),
            {"run", "generations", "best_cost"}, rows);
  std::printf("%d/10 runs below 1e-6; wrote %s\n", reached,
              out_path(cfg, "es_bench.csv").c_str());
  if (reached != 10) throw std::runtime_error("es-bench: only " + std::to_string(reached) +
                                              "/10 runs reached the target");
}

void run_validate_genome(const std::string& path) {
  const GenomeFile genome = read_genome(path);
  std::printf("%s: valid %s genome, %zu sub-controller(s), tau %.3f, seed %llu, config %s\n",
              path.c_str(), genome.experiment.c_str(), genome.subcontrollers.size(), genome.tau,
              static_cast<unsigned long long>(genome.seed), hash_hex(genome.config).c_str());
  for (const GenomeSub& sub : genome.subcontrollers)
    std::printf("  %-6s %-8s %zu parameter(s)\n", sub.kind.c_str(), sub.label.c_str(),
                sub.params.size());
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"compositional neuro-controller experiments"};
  app.name("compo");
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_dir, genome_exp1, genome_exp2, validate_path;
  std::string schedule = "straight:40,left:40,right:40";
  uint64_t seed = 0;
  int trials = 0;
  int steps = 200;
  double amplitude = 0.7;
  double offset = 0.0;

  auto* opt_config = app.add_option("--config", config_path, "JSON run configuration");
  auto* opt_seed = app.add_option("--seed", seed, "base RNG seed");
  auto* opt_out = app.add_option("--out", out_dir, "output directory");
  auto* opt_trials = app.add_option("--trials", trials, "experiment 1 trial count");

  auto* exp1_train = app.add_subcommand(
      "exp1-train", "train B1-B3 and T1-T4, pretrained vs scratch, and write metrics");
  auto* exp1_report =
      app.add_subcommand("exp1-report", "emit the gating report for a trained exp1 genome");
  exp1_report->add_option("--genome", genome_exp1, "genome file (default <out>/exp1_genome.json)");
  auto* exp2_train =
      app.add_subcommand("exp2-train", "train the three snake styles and write metrics");
  auto* exp2_rollout =
      app.add_subcommand("exp2-rollout", "free-running rollout with style switches");
  exp2_rollout->add_option("--genome", genome_exp2,
                           "genome file (default <out>/exp2_genome.json)");
  exp2_rollout->add_option("--schedule", schedule, "segments, e.g. straight:40,left:40,right:40");
  auto* cpg_sim = app.add_subcommand("cpg-sim", "free-running oscillator chain trace");
  cpg_sim->add_option("--steps", steps, "control ticks to simulate");
  cpg_sim->add_option("--amplitude", amplitude, "target amplitude R for every oscillator");
  cpg_sim->add_option("--offset", offset, "offset X for every oscillator");
  auto* es_bench = app.add_subcommand("es-bench", "10-D sphere benchmark, 10 seeds");
  auto* validate =
      app.add_subcommand("validate-genome", "parse and validate a genome file");
  validate->add_option("genome", validate_path, "genome file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg;
    if (opt_config->count()) cfg = load_run_config(config_path);
    if (exp2_train->parsed() || exp2_rollout->parsed() || cpg_sim->parsed())
      cfg.experiment = "exp2";
    else if (exp1_train->parsed() || exp1_report->parsed())
      cfg.experiment = "exp1";
    if (opt_seed->count()) cfg.seed = seed;
    if (opt_out->count()) cfg.out_dir = out_dir;
    if (opt_trials->count()) cfg.trials = trials;
    cfg.validate();

    if (exp1_train->parsed()) run_exp1_train(cfg);
    else if (exp1_report->parsed()) run_exp1_report(cfg, genome_exp1);
    else if (exp2_train->parsed()) run_exp2_train(cfg);
    else if (exp2_rollout->parsed()) run_exp2_rollout(cfg, genome_exp2, schedule);
    else if (cpg_sim->parsed()) run_cpg_sim(cfg, steps, amplitude, offset);
    else if (es_bench->parsed()) run_es_bench(cfg);
    else if (validate->parsed()) run_validate_genome(validate_path);
    return 0;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace compo
