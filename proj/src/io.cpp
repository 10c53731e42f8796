#include "compo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "compo/common.hpp"
#include "json.hpp"

namespace compo {

using nlohmann::json;

namespace {

const char* wave_name(WaveDirection wave) {
  return wave == WaveDirection::forward ? "forward" : "backward";
}

WaveDirection wave_from_name(const std::string& name) {
  if (name == "forward") return WaveDirection::forward;
  if (name == "backward") return WaveDirection::backward;
  throw ValidationError("unknown wave '" + name + "' (expected forward|backward)");
}

// Rejects keys outside the schema so config typos cannot silently fall back
// to defaults.
void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* key) { return item.key() == key; });
    if (!known) throw ValidationError("unknown key \"" + where + "." + item.key() + "\"");
  }
}

template <typename T>
void opt_get(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) it->get_to(out);
}

json episode_to_json(const EpisodeConfig& cfg) {
  return json{{"samples_per_period", cfg.samples_per_period},
              {"n_periods", cfg.n_periods},
              {"washout_periods", cfg.washout_periods},
              {"t2_reading", t2_reading_name(cfg.t2_reading)}};
}

void episode_from_json(const json& obj, const std::string& where, EpisodeConfig& cfg) {
  require_keys(obj, where, {"samples_per_period", "n_periods", "washout_periods", "t2_reading"});
  opt_get(obj, "samples_per_period", cfg.samples_per_period);
  opt_get(obj, "n_periods", cfg.n_periods);
  opt_get(obj, "washout_periods", cfg.washout_periods);
  if (auto it = obj.find("t2_reading"); it != obj.end())
    cfg.t2_reading = t2_reading_from_name(it->get<std::string>());
}

json optimizer_to_json(const OptConfig& cfg) {
  return json{{"population_size", cfg.population_size},
              {"parent_count", cfg.parent_count},
              {"initial_step", cfg.initial_step},
              {"max_epochs", cfg.max_epochs},
              {"target_cost", cfg.target_cost}};
}

void optimizer_from_json(const json& obj, const std::string& where, OptConfig& cfg) {
  require_keys(obj, where,
               {"population_size", "parent_count", "initial_step", "max_epochs", "target_cost"});
  opt_get(obj, "population_size", cfg.population_size);
  opt_get(obj, "parent_count", cfg.parent_count);
  opt_get(obj, "initial_step", cfg.initial_step);
  opt_get(obj, "max_epochs", cfg.max_epochs);
  opt_get(obj, "target_cost", cfg.target_cost);
}

json snake_to_json(const SnakeConfig& cfg) {
  return json{{"n_links", cfg.n_links},     {"link_length", cfg.link_length},
              {"link_mass", cfg.link_mass}, {"c_t", cfg.c_t},
              {"c_n", cfg.c_n},             {"servo_kp", cfg.servo_kp},
              {"servo_kd", cfg.servo_kd},   {"dt", cfg.dt},
              {"substeps", cfg.substeps},   {"joint_limit", cfg.joint_limit}};
}

void snake_from_json(const json& obj, const std::string& where, SnakeConfig& cfg) {
  require_keys(obj, where,
               {"n_links", "link_length", "link_mass", "c_t", "c_n", "servo_kp", "servo_kd", "dt",
                "substeps", "joint_limit"});
  opt_get(obj, "n_links", cfg.n_links);
  opt_get(obj, "link_length", cfg.link_length);
  opt_get(obj, "link_mass", cfg.link_mass);
  opt_get(obj, "c_t", cfg.c_t);
  opt_get(obj, "c_n", cfg.c_n);
  opt_get(obj, "servo_kp", cfg.servo_kp);
  opt_get(obj, "servo_kd", cfg.servo_kd);
  opt_get(obj, "dt", cfg.dt);
  opt_get(obj, "substeps", cfg.substeps);
  opt_get(obj, "joint_limit", cfg.joint_limit);
}

json setup_to_json(const EpisodeSetup& setup) {
  return json{{"snake", snake_to_json(setup.snake)},
              {"cpg_nu", setup.cpg_nu},
              {"cpg_alpha", setup.cpg_alpha},
              {"cpg_coupling_weight", setup.cpg_coupling_weight},
              {"cpg_substeps", setup.cpg_substeps},
              {"wave", wave_name(setup.wave)},
              {"max_steps", setup.max_steps},
              {"turn_termination_angle", setup.turn_termination_angle}};
}

void setup_from_json(const json& obj, const std::string& where, EpisodeSetup& setup) {
  require_keys(obj, where,
               {"snake", "cpg_nu", "cpg_alpha", "cpg_coupling_weight", "cpg_substeps", "wave",
                "max_steps", "turn_termination_angle"});
  if (auto it = obj.find("snake"); it != obj.end())
    snake_from_json(*it, where + ".snake", setup.snake);
  opt_get(obj, "cpg_nu", setup.cpg_nu);
  opt_get(obj, "cpg_alpha", setup.cpg_alpha);
  opt_get(obj, "cpg_coupling_weight", setup.cpg_coupling_weight);
  opt_get(obj, "cpg_substeps", setup.cpg_substeps);
  if (auto it = obj.find("wave"); it != obj.end())
    setup.wave = wave_from_name(it->get<std::string>());
  opt_get(obj, "max_steps", setup.max_steps);
  opt_get(obj, "turn_termination_angle", setup.turn_termination_angle);
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << content;
  file.flush();
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

json parse_json(const std::string& text, const std::string& what) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) throw ValidationError(what + ": invalid JSON");
  return parsed;
}

}  // namespace

// --------------------------------------------------------------------------
// RunConfig
// --------------------------------------------------------------------------

void RunConfig::validate() const {
  if (experiment != "exp1" && experiment != "exp2")
    throw ValidationError("experiment must be exp1 or exp2, got '" + experiment + "'");
  if (out_dir.empty()) throw ValidationError("out_dir must not be empty");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
  episode.validate();
  opt.validate();
  snake_episode.validate();
  if (episode_budget < opt.population_size)
    throw ValidationError("episode_budget must cover at least one generation");
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j{{"experiment", cfg.experiment},
         {"seed", cfg.seed},
         {"out_dir", cfg.out_dir},
         {"trials", cfg.trials},
         {"tau", cfg.tau},
         {"episode", episode_to_json(cfg.episode)},
         {"optimizer", optimizer_to_json(cfg.opt)},
         {"snake_episode", setup_to_json(cfg.snake_episode)},
         {"episode_budget", cfg.episode_budget}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  const json obj = parse_json(text, "config");
  RunConfig cfg;
  try {
    require_keys(obj, "config",
                 {"experiment", "seed", "out_dir", "trials", "tau", "episode", "optimizer",
                  "snake_episode", "episode_budget"});
    opt_get(obj, "experiment", cfg.experiment);
    opt_get(obj, "seed", cfg.seed);
    opt_get(obj, "out_dir", cfg.out_dir);
    opt_get(obj, "trials", cfg.trials);
    opt_get(obj, "tau", cfg.tau);
    if (auto it = obj.find("episode"); it != obj.end())
      episode_from_json(*it, "config.episode", cfg.episode);
    if (auto it = obj.find("optimizer"); it != obj.end())
      optimizer_from_json(*it, "config.optimizer", cfg.opt);
    if (auto it = obj.find("snake_episode"); it != obj.end())
      setup_from_json(*it, "config.snake_episode", cfg.snake_episode);
    opt_get(obj, "episode_budget", cfg.episode_budget);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_file(path));
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
  write_file(path, run_config_to_json(cfg));
}

uint64_t config_hash(const RunConfig& cfg) {
  RunConfig canonical = cfg;
  canonical.out_dir = "out";  // where files land is plumbing, not configuration
  return fnv1a64(run_config_to_json(canonical));
}

std::string hash_hex(uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

uint64_t hash_from_hex(const std::string& text) {
  uint64_t value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value, 16);
  if (text.empty() || text.size() > 16 || ec != std::errc{} || ptr != last)
    throw ValidationError("not a 64-bit hex hash: \"" + text + "\"");
  return value;
}

// --------------------------------------------------------------------------
// Genome files
// --------------------------------------------------------------------------

namespace {

json sub_to_json(const GenomeSub& sub) {
  json j{{"kind", sub.kind}, {"label", sub.label}, {"params", sub.params}};
  if (sub.kind == "rnn") {
    j["n_neurons"] = sub.n_neurons;
    j["n_inputs"] = sub.n_inputs;
    j["output_indices"] = sub.output_indices;
  } else {
    j["n_joints"] = sub.n_joints;
  }
  return j;
}

GenomeSub sub_from_json(const json& obj, const std::string& where) {
  GenomeSub sub;
  if (auto it = obj.find("kind"); it != obj.end()) it->get_to(sub.kind);
  if (sub.kind == "rnn") {
    require_keys(obj, where, {"kind", "label", "n_neurons", "n_inputs", "output_indices",
                              "params"});
    opt_get(obj, "n_neurons", sub.n_neurons);
    opt_get(obj, "n_inputs", sub.n_inputs);
    opt_get(obj, "output_indices", sub.output_indices);
  } else if (sub.kind == "table") {
    require_keys(obj, where, {"kind", "label", "n_joints", "params"});
    opt_get(obj, "n_joints", sub.n_joints);
  } else {
    throw ValidationError(where + ": kind must be rnn or table, got '" + sub.kind + "'");
  }
  opt_get(obj, "label", sub.label);
  opt_get(obj, "params", sub.params);
  return sub;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("genome: " + message);
}

}  // namespace

void GenomeFile::validate() const {
  check(format_version == kGenomeFormatVersion,
        "unsupported format_version " + std::to_string(format_version));
  check(experiment == "exp1" || experiment == "exp2",
        "experiment must be exp1 or exp2, got '" + experiment + "'");
  check(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  const std::string expected_kind = experiment == "exp1" ? "rnn" : "table";
  const int n = static_cast<int>(subcontrollers.size());
  check(n >= 1, "at least one sub-controller required");
  check(static_cast<int>(gating_raw.size()) == n && static_cast<int>(gating_rows.size()) == n,
        "gating raw/rows must have one entry per sub-controller");

  for (int i = 0; i < n; ++i) {
    const GenomeSub& sub = subcontrollers[i];
    const std::string where = "subcontrollers[" + std::to_string(i) + "]";
    check(sub.kind == expected_kind, where + " kind '" + sub.kind + "' does not match " +
                                         experiment + " (expected " + expected_kind + ")");
    for (double v : sub.params)
      check(std::isfinite(v), where + " has a non-finite parameter");
    if (sub.kind == "rnn") {
      target_from_name(sub.label);
      check(sub.n_neurons > 0 && sub.n_inputs > 0, where + " has a non-positive shape");
      const size_t expected = static_cast<size_t>(sub.n_neurons) * sub.n_inputs +
                              static_cast<size_t>(sub.n_neurons) * sub.n_neurons;
      check(sub.params.size() == expected,
            where + " expects " + std::to_string(expected) + " params, got " +
                std::to_string(sub.params.size()));
      check(!sub.output_indices.empty(), where + " needs at least one output index");
      for (int idx : sub.output_indices)
        check(idx >= 0 && idx < sub.n_neurons, where + " output index out of range");
    } else {
      style_from_name(sub.label);
      check(sub.n_joints > 0, where + " has a non-positive joint count");
      check(sub.params.size() == static_cast<size_t>(2 * sub.n_joints),
            where + " expects " + std::to_string(2 * sub.n_joints) + " params, got " +
                std::to_string(sub.params.size()));
    }
  }

  GatingTable table{tau, gating_raw, gating_rows};
  try {
    table.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("genome: ") + e.what());
  }
  check(table.n_subcontrollers() == n, "gating width must equal the sub-controller count");
  for (int k = 0; k < n; ++k) {
    const std::vector<double> recomputed = gating_normalize(gating_raw[k], k + 1, tau);
    for (int s = 0; s <= k; ++s)
      check(std::abs(recomputed[s] - gating_rows[k][s]) <= 1e-12,
            "gating row " + std::to_string(k) + " is not recomputable from raw coefficients");
  }
}

std::string genome_to_json(const GenomeFile& genome) {
  json subs = json::array();
  for (const GenomeSub& sub : genome.subcontrollers) subs.push_back(sub_to_json(sub));
  json j{{"format_version", genome.format_version},
         {"experiment", genome.experiment},
         {"metadata",
          json{{"config", hash_hex(genome.config)}, {"seed", genome.seed}, {"tool", genome.tool}}},
         {"gating", json{{"tau", genome.tau}, {"raw", genome.gating_raw},
                         {"rows", genome.gating_rows}}},
         {"subcontrollers", subs}};
  return j.dump(2) + "\n";
}

GenomeFile genome_from_json(const std::string& text) {
  const json obj = parse_json(text, "genome");
  GenomeFile genome;
  try {
    require_keys(obj, "genome",
                 {"format_version", "experiment", "metadata", "gating", "subcontrollers"});
    opt_get(obj, "format_version", genome.format_version);
    opt_get(obj, "experiment", genome.experiment);
    if (auto it = obj.find("metadata"); it != obj.end()) {
      require_keys(*it, "genome.metadata", {"config", "seed", "tool"});
      if (auto field = it->find("config"); field != it->end())
        genome.config = hash_from_hex(field->get<std::string>());
      opt_get(*it, "seed", genome.seed);
      opt_get(*it, "tool", genome.tool);
    }
    if (auto it = obj.find("gating"); it != obj.end()) {
      require_keys(*it, "genome.gating", {"tau", "raw", "rows"});
      opt_get(*it, "tau", genome.tau);
      opt_get(*it, "raw", genome.gating_raw);
      opt_get(*it, "rows", genome.gating_rows);
    }
    if (auto it = obj.find("subcontrollers"); it != obj.end()) {
      if (!it->is_array()) throw ValidationError("genome.subcontrollers must be an array");
      for (size_t i = 0; i < it->size(); ++i)
        genome.subcontrollers.push_back(
            sub_from_json((*it)[i], "genome.subcontrollers[" + std::to_string(i) + "]"));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("genome: ") + e.what());
  }
  return genome;
}

void write_genome(const std::string& path, const GenomeFile& genome) {
  write_file(path, genome_to_json(genome));
}

GenomeFile read_genome(const std::string& path) {
  GenomeFile genome = genome_from_json(read_file(path));
  genome.validate();
  return genome;
}

GenomeFile make_genome(const RnnRepertoire& rep, uint64_t seed, uint64_t config) {
  GenomeFile genome;
  genome.experiment = "exp1";
  genome.tau = rep.gating.tau;
  genome.seed = seed;
  genome.config = config;
  for (int i = 0; i < rep.size(); ++i) {
    const RnnParams& params = rep.subs[i];
    GenomeSub sub;
    sub.kind = "rnn";
    sub.label = target_name(rep.tasks[i]);
    sub.n_neurons = params.n_neurons;
    sub.n_inputs = params.n_inputs;
    sub.output_indices = params.output_indices;
    sub.params = params.input_weights;
    sub.params.insert(sub.params.end(), params.recurrent_weights.begin(),
                      params.recurrent_weights.end());
    genome.subcontrollers.push_back(std::move(sub));
  }
  genome.gating_raw = rep.gating.raw;
  genome.gating_rows = rep.gating.rows;
  return genome;
}

GenomeFile make_genome(const StyleRepertoire& rep, uint64_t seed, uint64_t config) {
  GenomeFile genome;
  genome.experiment = "exp2";
  genome.tau = rep.gating.tau;
  genome.seed = seed;
  genome.config = config;
  for (int i = 0; i < rep.size(); ++i) {
    const TableParams& params = rep.tables[i];
    GenomeSub sub;
    sub.kind = "table";
    sub.label = style_name(rep.styles[i]);
    sub.n_joints = params.n_joints();
    sub.params = params.amp_enc;
    sub.params.insert(sub.params.end(), params.offsets_enc.begin(), params.offsets_enc.end());
    genome.subcontrollers.push_back(std::move(sub));
  }
  genome.gating_raw = rep.gating.raw;
  genome.gating_rows = rep.gating.rows;
  return genome;
}

RnnRepertoire rnn_repertoire(const GenomeFile& genome) {
  genome.validate();
  if (genome.experiment != "exp1")
    throw ValidationError("genome: exp1 repertoire requested from an " + genome.experiment +
                          " genome");
  RnnRepertoire rep;
  for (const GenomeSub& sub : genome.subcontrollers) {
    RnnParams params = make_rnn(sub.n_neurons, sub.n_inputs, sub.output_indices);
    const auto split = sub.params.begin() + params.n_neurons * params.n_inputs;
    params.input_weights.assign(sub.params.begin(), split);
    params.recurrent_weights.assign(split, sub.params.end());
    rep.subs.push_back(std::move(params));
    rep.tasks.push_back(target_from_name(sub.label));
  }
  rep.gating = GatingTable{genome.tau, genome.gating_raw, genome.gating_rows};
  return rep;
}

StyleRepertoire style_repertoire(const GenomeFile& genome) {
  genome.validate();
  if (genome.experiment != "exp2")
    throw ValidationError("genome: exp2 repertoire requested from an " + genome.experiment +
                          " genome");
  StyleRepertoire rep;
  for (const GenomeSub& sub : genome.subcontrollers) {
    TableParams params;
    params.amp_enc.assign(sub.params.begin(), sub.params.begin() + sub.n_joints);
    params.offsets_enc.assign(sub.params.begin() + sub.n_joints, sub.params.end());
    rep.tables.push_back(std::move(params));
    rep.styles.push_back(style_from_name(sub.label));
  }
  rep.gating = GatingTable{genome.tau, genome.gating_raw, genome.gating_rows};
  return rep;
}

// --------------------------------------------------------------------------
// CSV
// --------------------------------------------------------------------------

std::string format_g17(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

double parse_g17(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last)
    throw ValidationError("not a number: \"" + text + "\"");
  return value;
}

namespace {

int parse_int(const std::string& text) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last)
    throw ValidationError("not an integer: \"" + text + "\"");
  return value;
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void csv_error(const std::string& path, int line_no, const std::string& message) {
  throw ValidationError(path + " line " + std::to_string(line_no) + ": " + message);
}

// 1-based file line of data row `index` given the table's metadata block.
int data_line(const CsvTable& table, size_t index) {
  return static_cast<int>(table.metadata.size() + 2 + index);
}

CsvTable read_table(const std::string& path, const std::vector<std::string>& expected_header) {
  CsvTable table = read_csv(path);
  if (table.header != expected_header)
    throw ValidationError(path + " line " + std::to_string(table.metadata.size() + 1) +
                          ": header does not match " + join(expected_header));
  return table;
}

template <typename T>
T parse_cell(const std::string& path, const CsvTable& table, size_t row, size_t col,
             T (*parse)(const std::string&)) {
  try {
    return parse(table.rows[row][col]);
  } catch (const ValidationError& e) {
    csv_error(path, data_line(table, row),
              "column " + table.header[col] + ": " + e.what());
  }
}

const CsvMeta kMeasuresMeta = {
    {"measures", "d=com_displacement;s=com_lateral_initial_heading;heading=head_link"}};

}  // namespace

CsvMeta run_meta(uint64_t seed, uint64_t config) {
  return {{"seed", std::to_string(seed)}, {"config", hash_hex(config)}};
}

const std::string& CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  throw ValidationError("metadata key \"" + key + "\" missing");
}

void write_csv(const std::string& path, const CsvMeta& metadata,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string buf;
  for (const auto& [key, value] : metadata) buf += "# " + key + "=" + value + "\n";
  buf += join(header) + "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ValidationError(path + ": row width " + std::to_string(row.size()) +
                            " does not match header width " + std::to_string(header.size()));
    buf += join(row) + "\n";
  }
  write_file(path, buf);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const size_t eq = body.find('=');
      if (eq == std::string::npos) csv_error(path, line_no, "metadata is not key=value");
      table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (line.empty()) csv_error(path, line_no, "empty line");
    if (line[0] == '#') csv_error(path, line_no, "comment after the header");
    std::vector<std::string> cells = split(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      csv_error(path, line_no,
                "expected " + std::to_string(table.header.size()) + " fields, got " +
                    std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) csv_error(path, line_no, "missing header");
  return table;
}

// --------------------------------------------------------------------------
// Typed metrics files
// --------------------------------------------------------------------------

namespace {
const std::vector<std::string> kExp1Header = {"task", "trial", "mode", "epochs_used",
                                              "final_error"};
const std::vector<std::string> kExp2Header = {"style", "episodes_used", "best_reward",
                                              "d", "s", "heading_change"};
const std::vector<std::string> kGatingHeader = {"task", "subcontroller", "weight"};
const std::vector<std::string> kHistoryHeader = {"epoch", "best_cost"};
}  // namespace

void write_exp1_metrics(const std::string& path, const std::vector<Exp1MetricsRow>& rows,
                        uint64_t seed, uint64_t config) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const Exp1MetricsRow& row : rows)
    cells.push_back({row.task, std::to_string(row.trial), row.mode,
                     std::to_string(row.epochs_used), format_g17(row.final_error)});
  write_csv(path, run_meta(seed, config), kExp1Header, cells);
}

std::vector<Exp1MetricsRow> read_exp1_metrics(const std::string& path) {
  const CsvTable table = read_table(path, kExp1Header);
  std::vector<Exp1MetricsRow> rows;
  rows.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    Exp1MetricsRow row;
    row.task = table.rows[i][0];
    row.trial = parse_cell(path, table, i, 1, parse_int);
    row.mode = table.rows[i][2];
    row.epochs_used = parse_cell(path, table, i, 3, parse_int);
    row.final_error = parse_cell(path, table, i, 4, parse_g17);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_exp2_metrics(const std::string& path, const std::vector<Exp2MetricsRow>& rows,
                        uint64_t seed, uint64_t config) {
  CsvMeta meta = run_meta(seed, config);
  meta.insert(meta.end(), kMeasuresMeta.begin(), kMeasuresMeta.end());
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const Exp2MetricsRow& row : rows)
    cells.push_back({row.style, std::to_string(row.episodes_used), format_g17(row.best_reward),
                     format_g17(row.d), format_g17(row.s), format_g17(row.heading_change)});
  write_csv(path, meta, kExp2Header, cells);
}

std::vector<Exp2MetricsRow> read_exp2_metrics(const std::string& path) {
  const CsvTable table = read_table(path, kExp2Header);
  std::vector<Exp2MetricsRow> rows;
  rows.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    Exp2MetricsRow row;
    row.style = table.rows[i][0];
    row.episodes_used = parse_cell(path, table, i, 1, parse_int);
    row.best_reward = parse_cell(path, table, i, 2, parse_g17);
    row.d = parse_cell(path, table, i, 3, parse_g17);
    row.s = parse_cell(path, table, i, 4, parse_g17);
    row.heading_change = parse_cell(path, table, i, 5, parse_g17);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_gating_report(const std::string& path, const std::vector<GatingReportRow>& rows,
                         uint64_t seed, uint64_t config) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const GatingReportRow& row : rows)
    cells.push_back({row.task, row.subcontroller, format_g17(row.weight)});
  write_csv(path, run_meta(seed, config), kGatingHeader, cells);
}

std::vector<GatingReportRow> read_gating_report(const std::string& path) {
  const CsvTable table = read_table(path, kGatingHeader);
  std::vector<GatingReportRow> rows;
  rows.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    GatingReportRow row;
    row.task = table.rows[i][0];
    row.subcontroller = table.rows[i][1];
    row.weight = parse_cell(path, table, i, 2, parse_g17);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<std::string> trajectory_header(int n_joints) {
  std::vector<std::string> header = {"step", "t",   "head_x",  "head_y",
                                     "com_x", "com_y", "heading"};
  for (int i = 1; i <= n_joints; ++i) header.push_back("phi_" + std::to_string(i));
  return header;
}

}  // namespace

void write_trajectory(const std::string& path, const std::vector<TrajectoryRow>& rows,
                      int n_joints, uint64_t seed, uint64_t config) {
  CsvMeta meta = run_meta(seed, config);
  meta.insert(meta.end(), kMeasuresMeta.begin(), kMeasuresMeta.end());
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const TrajectoryRow& row : rows) {
    if (static_cast<int>(row.joints.size()) != n_joints)
      throw ValidationError(path + ": trajectory row has " + std::to_string(row.joints.size()) +
                            " joints, expected " + std::to_string(n_joints));
    std::vector<std::string> line = {std::to_string(row.step), format_g17(row.t),
                                     format_g17(row.head_x),   format_g17(row.head_y),
                                     format_g17(row.com_x),    format_g17(row.com_y),
                                     format_g17(row.heading)};
    for (double joint : row.joints) line.push_back(format_g17(joint));
    cells.push_back(std::move(line));
  }
  write_csv(path, meta, trajectory_header(n_joints), cells);
}

std::vector<TrajectoryRow> read_trajectory(const std::string& path) {
  CsvTable table = read_csv(path);
  const size_t fixed = 7;
  if (table.header.size() < fixed + 1 ||
      !std::equal(table.header.begin(), table.header.begin() + fixed,
                  trajectory_header(0).begin()))
    throw ValidationError(path + ": not a trajectory header");
  const int n_joints = static_cast<int>(table.header.size() - fixed);
  if (table.header != trajectory_header(n_joints))
    throw ValidationError(path + ": not a trajectory header");
  std::vector<TrajectoryRow> rows;
  rows.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    TrajectoryRow row;
    row.step = parse_cell(path, table, i, 0, parse_int);
    row.t = parse_cell(path, table, i, 1, parse_g17);
    row.head_x = parse_cell(path, table, i, 2, parse_g17);
    row.head_y = parse_cell(path, table, i, 3, parse_g17);
    row.com_x = parse_cell(path, table, i, 4, parse_g17);
    row.com_y = parse_cell(path, table, i, 5, parse_g17);
    row.heading = parse_cell(path, table, i, 6, parse_g17);
    for (int j = 0; j < n_joints; ++j)
      row.joints.push_back(parse_cell(path, table, i, fixed + j, parse_g17));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cost_history(const std::string& path,
                        const std::vector<std::pair<int, double>>& history, uint64_t seed,
                        uint64_t config) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(history.size());
  for (const auto& [epoch, cost] : history)
    cells.push_back({std::to_string(epoch), format_g17(cost)});
  write_csv(path, run_meta(seed, config), kHistoryHeader, cells);
}

// --------------------------------------------------------------------------
// Result flatteners
// --------------------------------------------------------------------------

std::vector<Exp1MetricsRow> exp1_metrics(const std::vector<Exp1Trial>& trials) {
  std::vector<Exp1MetricsRow> rows;
  for (size_t i = 0; i < trials.size(); ++i) {
    const int trial_no = static_cast<int>(i) + 1;
    for (const std::vector<TaskRecord>* records :
         {&trials[i].pretrained_records, &trials[i].scratch_records}) {
      for (const TaskRecord& record : *records)
        rows.push_back({target_name(record.task), trial_no, train_mode_name(record.mode),
                        record.epochs_used, record.final_error});
    }
  }
  return rows;
}

std::vector<Exp2MetricsRow> exp2_metrics(const std::vector<StyleRecord>& records) {
  std::vector<Exp2MetricsRow> rows;
  rows.reserve(records.size());
  for (const StyleRecord& record : records)
    rows.push_back({style_name(record.style), record.episodes_used, record.best_reward,
                    record.evaluation.d, record.evaluation.s, record.evaluation.heading_change});
  return rows;
}

std::vector<GatingReportRow> gating_report(const GatingTable& gating,
                                           const std::vector<std::string>& task_labels,
                                           const std::vector<std::string>& sub_labels) {
  if (task_labels.size() != static_cast<size_t>(gating.n_tasks()) ||
      sub_labels.size() != static_cast<size_t>(gating.n_subcontrollers()))
    throw ValidationError("gating report: label counts do not match the gating table");
  std::vector<GatingReportRow> rows;
  for (int k = 0; k < gating.n_tasks(); ++k)
    for (int s = 0; s < gating.n_subcontrollers(); ++s)
      rows.push_back({task_labels[k], sub_labels[s], gating.rows[k][s]});
  return rows;
}

}  // namespace compo
