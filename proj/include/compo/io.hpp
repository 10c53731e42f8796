#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "compo/periodic.hpp"
#include "compo/snake_training.hpp"

namespace compo {

// ---------------------------------------------------------------------------
// Run configuration: every knob an experiment run reads, in one JSON file.
// Loading rejects unknown keys anywhere in the tree, so a typo in a config
// fails loudly instead of silently running defaults.
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string experiment = "exp1";  // "exp1" | "exp2"
  uint64_t seed = 0;
  std::string out_dir = "out";
  int trials = 10;       // experiment 1 trial count
  double tau = kDefaultTau;
  EpisodeConfig episode;     // experiment 1 sampling grid
  OptConfig opt;             // optimizer knobs; rng_seed is derived, never loaded
  EpisodeSetup snake_episode;  // experiment 2 physics, CPG and episode rules
  int episode_budget = 600;    // experiment 2 training episodes per style

  RunConfig() {
    opt.target_cost = 0.9;  // experiment 1 stopping threshold; exp2 ignores it
  }

  void validate() const;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& cfg);

// FNV-1a of the canonical JSON dump. Embedded in every output file so any
// artifact can be traced back to the exact configuration that produced it.
uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(uint64_t hash);
uint64_t hash_from_hex(const std::string& text);

// ---------------------------------------------------------------------------
// Genome files: the trained repertoire as auditable JSON. The file stores the
// flat parameters per sub-controller plus both the raw gating coefficients
// and the normalized rows; the rows must stay recomputable from raw + tau.
// Serialization is canonical (sorted keys, shortest round-trip numbers), so
// write -> read -> write reproduces the file byte for byte.
// ---------------------------------------------------------------------------

constexpr int kGenomeFormatVersion = 1;

struct GenomeSub {
  std::string kind;   // "rnn" | "table"
  std::string label;  // target name (B1..T4) or style name
  int n_neurons = 0;  // rnn shape
  int n_inputs = 0;
  std::vector<int> output_indices;
  int n_joints = 0;  // table shape
  std::vector<double> params;  // genotype order: inputs|recurrent or amps|offsets
};

struct GenomeFile {
  int format_version = kGenomeFormatVersion;
  std::string experiment;  // "exp1" | "exp2"
  double tau = kDefaultTau;
  uint64_t seed = 0;
  uint64_t config = 0;  // config_hash of the producing RunConfig
  std::string tool = "compo-motor";
  std::vector<GenomeSub> subcontrollers;
  std::vector<std::vector<double>> gating_raw;   // raw[k] has k+1 coefficients
  std::vector<std::vector<double>> gating_rows;  // normalized, padded to width

  // Shape checks, kind/experiment consistency, gating masking and
  // normalization, and row recomputability within 1e-12.
  void validate() const;
};

std::string genome_to_json(const GenomeFile& genome);
GenomeFile genome_from_json(const std::string& text);
void write_genome(const std::string& path, const GenomeFile& genome);
GenomeFile read_genome(const std::string& path);  // parsed and validated

GenomeFile make_genome(const RnnRepertoire& rep, uint64_t seed, uint64_t config);
GenomeFile make_genome(const StyleRepertoire& rep, uint64_t seed, uint64_t config);

// Rebuild the in-memory repertoires. Stored losses/rewards are report
// artifacts, not genome content, so they come back empty.
RnnRepertoire rnn_repertoire(const GenomeFile& genome);
StyleRepertoire style_repertoire(const GenomeFile& genome);

// ---------------------------------------------------------------------------
// CSV: comment lines "# key=value" carry provenance (seed, config hash),
// then one header line, then data rows. Numbers are written with 17
// significant digits so read-back is lossless.
// ---------------------------------------------------------------------------

std::string format_g17(double value);
double parse_g17(const std::string& text);  // full-string parse, throws

using CsvMeta = std::vector<std::pair<std::string, std::string>>;

CsvMeta run_meta(uint64_t seed, uint64_t config);

struct CsvTable {
  CsvMeta metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // First metadata value for key, or throws.
  const std::string& meta(const std::string& key) const;
};

void write_csv(const std::string& path, const CsvMeta& metadata,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
// Any structural defect (stray comment, empty line, field-count mismatch)
// raises an error naming the file and 1-based line number.
CsvTable read_csv(const std::string& path);

struct Exp1MetricsRow {
  std::string task;  // B1..B3, T1..T4
  int trial = 0;
  std::string mode;  // scratch | pretrained
  int epochs_used = 0;
  double final_error = 0.0;
};

struct Exp2MetricsRow {
  std::string style;
  int episodes_used = 0;
  double best_reward = 0.0;
  double d = 0.0;
  double s = 0.0;
  double heading_change = 0.0;
};

struct GatingReportRow {
  std::string task;
  std::string subcontroller;
  double weight = 0.0;
};

void write_exp1_metrics(const std::string& path, const std::vector<Exp1MetricsRow>& rows,
                        uint64_t seed, uint64_t config);
std::vector<Exp1MetricsRow> read_exp1_metrics(const std::string& path);

void write_exp2_metrics(const std::string& path, const std::vector<Exp2MetricsRow>& rows,
                        uint64_t seed, uint64_t config);
std::vector<Exp2MetricsRow> read_exp2_metrics(const std::string& path);

void write_gating_report(const std::string& path, const std::vector<GatingReportRow>& rows,
                         uint64_t seed, uint64_t config);
std::vector<GatingReportRow> read_gating_report(const std::string& path);

void write_trajectory(const std::string& path, const std::vector<TrajectoryRow>& rows,
                      int n_joints, uint64_t seed, uint64_t config);
std::vector<TrajectoryRow> read_trajectory(const std::string& path);

void write_cost_history(const std::string& path,
                        const std::vector<std::pair<int, double>>& history, uint64_t seed,
                        uint64_t config);

// Flatteners from experiment results to metrics rows.
std::vector<Exp1MetricsRow> exp1_metrics(const std::vector<Exp1Trial>& trials);
std::vector<Exp2MetricsRow> exp2_metrics(const std::vector<StyleRecord>& records);
// One row per (task, sub-controller) pair over the full repertoire width;
// masked entries appear as exact zeros.
std::vector<GatingReportRow> gating_report(const GatingTable& gating,
                                           const std::vector<std::string>& task_labels,
                                           const std::vector<std::string>& sub_labels);

}  // namespace compo
