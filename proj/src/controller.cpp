#include "compo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "compo/common.hpp"

namespace compo {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------------------
// RNN
// ---------------------------------------------------------------------------

void RnnParams::validate() const {
  require(n_neurons >= 1, "RnnParams: n_neurons must be >= 1, got " + std::to_string(n_neurons));
  require(n_inputs >= 1, "RnnParams: n_inputs must be >= 1, got " + std::to_string(n_inputs));
  require(static_cast<int>(input_weights.size()) == n_neurons * n_inputs,
          "RnnParams: input_weights has " + std::to_string(input_weights.size()) +
              " entries, expected n_neurons*n_inputs = " + std::to_string(n_neurons * n_inputs));
  require(static_cast<int>(recurrent_weights.size()) == n_neurons * n_neurons,
          "RnnParams: recurrent_weights has " + std::to_string(recurrent_weights.size()) +
              " entries, expected n_neurons^2 = " + std::to_string(n_neurons * n_neurons));
  require(all_finite(input_weights) && all_finite(recurrent_weights),
          "RnnParams: weights must be finite");
  require(!output_indices.empty(), "RnnParams: output_indices must be non-empty");
  std::set<int> seen;
  for (int idx : output_indices) {
    require(idx >= 0 && idx < n_neurons,
            "RnnParams: output index " + std::to_string(idx) + " out of range [0, " +
                std::to_string(n_neurons) + ")");
    require(seen.insert(idx).second,
            "RnnParams: duplicate output index " + std::to_string(idx));
  }
}

RnnParams make_rnn(int n_neurons, int n_inputs, std::vector<int> output_indices) {
  RnnParams p;
  p.n_neurons = n_neurons;
  p.n_inputs = n_inputs;
  p.input_weights.assign(static_cast<size_t>(n_neurons) * n_inputs, 0.0);
  p.recurrent_weights.assign(static_cast<size_t>(n_neurons) * n_neurons, 0.0);
  p.output_indices = std::move(output_indices);
  p.validate();
  return p;
}

RnnState zero_state(const RnnParams& params) {
  return RnnState{std::vector<double>(params.n_neurons, 0.0)};
}

std::vector<double> rnn_step(const RnnParams& params, RnnState& state,
                             std::span<const double> inputs) {
  const int n = params.n_neurons;
  const int m = params.n_inputs;
  require(static_cast<int>(inputs.size()) == m,
          "rnn_step: got " + std::to_string(inputs.size()) + " inputs, expected n_inputs = " +
              std::to_string(m));
  require(static_cast<int>(state.activations.size()) == n,
          "rnn_step: state has " + std::to_string(state.activations.size()) +
              " activations, expected n_neurons = " + std::to_string(n));

  std::vector<double> next(n);
  for (int i = 0; i < n; ++i) {
    double pre = 0.0;
    const double* v = params.recurrent_weights.data() + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) pre += v[j] * state.activations[j];
    const double* u = params.input_weights.data() + static_cast<size_t>(i) * m;
    for (int k = 0; k < m; ++k) pre += u[k] * inputs[k];
    next[i] = std::tanh(pre);
  }
  state.activations = std::move(next);

  std::vector<double> outputs(params.output_indices.size());
  for (size_t o = 0; o < params.output_indices.size(); ++o)
    outputs[o] = state.activations[params.output_indices[o]];
  return outputs;
}

std::vector<std::vector<double>> rnn_rollout(const RnnParams& params,
                                             const std::vector<std::vector<double>>& inputs) {
  require(!inputs.empty(), "rnn_rollout: input sequence is empty");
  RnnState state = zero_state(params);
  std::vector<std::vector<double>> outputs;
  outputs.reserve(inputs.size());
  for (const auto& in : inputs) outputs.push_back(rnn_step(params, state, in));
  return outputs;
}

std::vector<double> rnn_output_trace(const RnnParams& params, std::span<const double> inputs) {
  require(!inputs.empty(), "rnn_output_trace: input sequence is empty");
  require(params.n_inputs == 1, "rnn_output_trace: requires n_inputs == 1, got " +
                                    std::to_string(params.n_inputs));
  require(!params.output_indices.empty(), "rnn_output_trace: no output indices");
  const int n = params.n_neurons;
  const int out_idx = params.output_indices.front();

  std::vector<double> act(n, 0.0), next(n);
  std::vector<double> trace(inputs.size());
  for (size_t t = 0; t < inputs.size(); ++t) {
    const double x = inputs[t];
    for (int i = 0; i < n; ++i) {
      double pre = 0.0;
      const double* v = params.recurrent_weights.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) pre += v[j] * act[j];
      pre += params.input_weights[i] * x;
      next[i] = std::tanh(pre);
    }
    act.swap(next);
    trace[t] = act[out_idx];
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Table
// ---------------------------------------------------------------------------

void TableParams::validate() const {
  require(amp_enc.size() == offsets_enc.size(),
          "TableParams: amp_enc has " + std::to_string(amp_enc.size()) +
              " entries but offsets_enc has " + std::to_string(offsets_enc.size()));
  require(!amp_enc.empty(), "TableParams: empty table");
  require(all_finite(amp_enc) && all_finite(offsets_enc), "TableParams: entries must be finite");
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

DecodedTable table_decode(const TableParams& params, double offset_clamp) {
  params.validate();
  require(offset_clamp > 0.0, "table_decode: offset_clamp must be positive");
  DecodedTable out;
  out.amplitudes.resize(params.amp_enc.size());
  out.offsets.resize(params.offsets_enc.size());
  for (size_t i = 0; i < params.amp_enc.size(); ++i)
    out.amplitudes[i] = logistic(params.amp_enc[i]);
  for (size_t i = 0; i < params.offsets_enc.size(); ++i)
    out.offsets[i] = offset_clamp * std::tanh(params.offsets_enc[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Gating
// ---------------------------------------------------------------------------

std::vector<double> gating_normalize(std::span<const double> g, int task_index, double tau) {
  const int n = static_cast<int>(g.size());
  require(task_index >= 1 && task_index <= n,
          "gating_normalize: task_index " + std::to_string(task_index) +
              " out of range [1, " + std::to_string(n) + "]");
  require(tau > 0.0, "gating_normalize: tau must be positive, got " + std::to_string(tau));
  require(all_finite(g.subspan(0, task_index)), "gating_normalize: non-finite coefficient");

  double max_tg = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < task_index; ++s) max_tg = std::max(max_tg, tau * g[s]);

  std::vector<double> row(n, 0.0);
  double denom = 0.0;
  for (int s = 0; s < task_index; ++s) {
    row[s] = std::exp(tau * g[s] - max_tg);
    denom += row[s];
  }
  for (int s = 0; s < task_index; ++s) row[s] /= denom;
  return row;
}

void GatingTable::append_task(std::span<const double> raw_coeffs) {
  const int k = n_tasks() + 1;
  require(static_cast<int>(raw_coeffs.size()) == k,
          "GatingTable::append_task: task " + std::to_string(k) + " needs " + std::to_string(k) +
              " coefficients, got " + std::to_string(raw_coeffs.size()));
  raw.emplace_back(raw_coeffs.begin(), raw_coeffs.end());
  rows.push_back(gating_normalize(raw_coeffs, k, tau));
  for (auto& r : rows) r.resize(k, 0.0);
}

void GatingTable::validate() const {
  require(tau > 0.0, "GatingTable: tau must be positive");
  require(raw.size() == rows.size(), "GatingTable: raw/rows size mismatch");
  const int n = n_subcontrollers();
  for (int k = 1; k <= n_tasks(); ++k) {
    const auto& row = rows[k - 1];
    require(static_cast<int>(row.size()) == n,
            "GatingTable: row " + std::to_string(k) + " has wrong width");
    require(static_cast<int>(raw[k - 1].size()) == k,
            "GatingTable: raw coefficients for task " + std::to_string(k) + " have wrong length");
    double sum = 0.0;
    for (int s = 0; s < n; ++s) {
      if (s >= k) {
        require(row[s] == 0.0, "GatingTable: row " + std::to_string(k) + " entry " +
                                   std::to_string(s + 1) + " must be exactly zero");
      } else {
        require(row[s] >= 0.0, "GatingTable: negative weight in row " + std::to_string(k));
        sum += row[s];
      }
    }
    require(std::abs(sum - 1.0) <= 1e-12,
            "GatingTable: row " + std::to_string(k) + " sums to " + std::to_string(sum));
  }
}

std::vector<double> compose(std::span<const double> weight_row,
                            std::span<const std::vector<double>> contributions) {
  require(weight_row.size() == contributions.size(),
          "compose: " + std::to_string(weight_row.size()) + " weights but " +
              std::to_string(contributions.size()) + " contributions");
  size_t len = 0;
  bool len_known = false;
  for (size_t s = 0; s < contributions.size(); ++s) {
    if (contributions[s].empty()) {
      require(weight_row[s] == 0.0, "compose: missing contribution for nonzero weight at index " +
                                        std::to_string(s + 1));
      continue;
    }
    if (!len_known) {
      len = contributions[s].size();
      len_known = true;
    } else {
      require(contributions[s].size() == len,
              "compose: contribution " + std::to_string(s + 1) + " has length " +
                  std::to_string(contributions[s].size()) + ", expected " + std::to_string(len));
    }
  }
  require(len_known, "compose: no active contributions");

  std::vector<double> out(len, 0.0);
  for (size_t s = 0; s < contributions.size(); ++s) {
    const double w = weight_row[s];
    if (w == 0.0) continue;
    for (size_t i = 0; i < len; ++i) out[i] += w * contributions[s][i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Genotype
// ---------------------------------------------------------------------------

void Genotype::validate() const {
  require(param_count >= 0 && coeff_count >= 0, "Genotype: negative layout counts");
  require(static_cast<int>(values.size()) == size(),
          "Genotype: has " + std::to_string(values.size()) + " values, layout expects " +
              std::to_string(size()));
}

Genotype genotype_encode(const RnnParams& params, std::span<const double> coeffs) {
  params.validate();
  Genotype g;
  g.param_count = params.parameter_count();
  g.coeff_count = static_cast<int>(coeffs.size());
  g.values.reserve(g.size());
  g.values.insert(g.values.end(), params.input_weights.begin(), params.input_weights.end());
  g.values.insert(g.values.end(), params.recurrent_weights.begin(),
                  params.recurrent_weights.end());
  g.values.insert(g.values.end(), coeffs.begin(), coeffs.end());
  return g;
}

Genotype genotype_encode(const TableParams& params, std::span<const double> coeffs) {
  params.validate();
  Genotype g;
  g.param_count = params.parameter_count();
  g.coeff_count = static_cast<int>(coeffs.size());
  g.values.reserve(g.size());
  g.values.insert(g.values.end(), params.amp_enc.begin(), params.amp_enc.end());
  g.values.insert(g.values.end(), params.offsets_enc.begin(), params.offsets_enc.end());
  g.values.insert(g.values.end(), coeffs.begin(), coeffs.end());
  return g;
}

std::pair<RnnParams, std::vector<double>> decode_rnn_candidate(std::span<const double> values,
                                                               const RnnLayout& layout) {
  const int pc = layout.n_neurons * layout.n_inputs + layout.n_neurons * layout.n_neurons;
  require(static_cast<int>(values.size()) == pc + layout.coeff_count,
          "genotype_decode(rnn): got " + std::to_string(values.size()) + " values, layout needs " +
              std::to_string(pc + layout.coeff_count));
  RnnParams p;
  p.n_neurons = layout.n_neurons;
  p.n_inputs = layout.n_inputs;
  p.output_indices = layout.output_indices;
  const int niw = layout.n_neurons * layout.n_inputs;
  p.input_weights.assign(values.begin(), values.begin() + niw);
  p.recurrent_weights.assign(values.begin() + niw, values.begin() + pc);
  std::vector<double> coeffs(values.begin() + pc, values.end());
  return {std::move(p), std::move(coeffs)};
}

std::pair<TableParams, std::vector<double>> decode_table_candidate(std::span<const double> values,
                                                                   const TableLayout& layout) {
  const int pc = 2 * layout.n_joints;
  require(static_cast<int>(values.size()) == pc + layout.coeff_count,
          "genotype_decode(table): got " + std::to_string(values.size()) +
              " values, layout needs " + std::to_string(pc + layout.coeff_count));
  TableParams p;
  p.amp_enc.assign(values.begin(), values.begin() + layout.n_joints);
  p.offsets_enc.assign(values.begin() + layout.n_joints, values.begin() + pc);
  std::vector<double> coeffs(values.begin() + pc, values.end());
  return {std::move(p), std::move(coeffs)};
}

std::pair<RnnParams, std::vector<double>> genotype_decode(const Genotype& genotype,
                                                          const RnnLayout& layout) {
  genotype.validate();
  return decode_rnn_candidate(genotype.values, layout);
}

std::pair<TableParams, std::vector<double>> genotype_decode(const Genotype& genotype,
                                                            const TableLayout& layout) {
  genotype.validate();
  return decode_table_candidate(genotype.values, layout);
}

}  // namespace compo
