#pragma once

#include <span>
#include <string>
#include <vector>

namespace compo {

// ---------------------------------------------------------------------------
// Sub-controller: fully connected recurrent network.
//
// Every neuron receives all inputs and all previous activations:
//   o_i(t) = tanh( sum_j v[i][j] o_j(t-1) + sum_k u[i][k] x_k(t) )
// A subset of neurons, listed in output_indices, forms the output vector.
// ---------------------------------------------------------------------------

struct RnnParams {
  int n_neurons = 7;
  int n_inputs = 1;
  std::vector<double> input_weights;      // n_neurons x n_inputs, row-major
  std::vector<double> recurrent_weights;  // n_neurons x n_neurons, row-major
  std::vector<int> output_indices = {0};

  int parameter_count() const { return n_neurons * n_inputs + n_neurons * n_neurons; }
  void validate() const;  // throws ValidationError
};

// Returns an RnnParams with zeroed weights and the given shape.
RnnParams make_rnn(int n_neurons, int n_inputs, std::vector<int> output_indices = {0});

struct RnnState {
  std::vector<double> activations;  // each strictly inside (-1, 1) after a step
};

RnnState zero_state(const RnnParams& params);

// Advances the state one tick and returns the outputs at output_indices.
std::vector<double> rnn_step(const RnnParams& params, RnnState& state,
                             std::span<const double> inputs);

// Applies rnn_step repeatedly from the all-zero state; one output vector per
// input vector. Throws on an empty sequence.
std::vector<std::vector<double>> rnn_rollout(const RnnParams& params,
                                             const std::vector<std::vector<double>>& inputs);

// Single-input, single-output rollout returning the trace of the first output
// neuron. Same arithmetic as rnn_rollout, kept separate for the hot path.
std::vector<double> rnn_output_trace(const RnnParams& params, std::span<const double> inputs);

// ---------------------------------------------------------------------------
// Sub-controller: parameter table for the oscillator network. The optimizer
// sees unconstrained reals; decoding maps amplitudes through a logistic into
// (0, 1) and offsets through offset_clamp * tanh.
// ---------------------------------------------------------------------------

struct TableParams {
  std::vector<double> amp_enc;
  std::vector<double> offsets_enc;

  int n_joints() const { return static_cast<int>(amp_enc.size()); }
  int parameter_count() const { return static_cast<int>(amp_enc.size() + offsets_enc.size()); }
  void validate() const;
};

constexpr double kDefaultOffsetClamp = 0.7853981633974483;  // pi/4 rad

struct DecodedTable {
  std::vector<double> amplitudes;  // radians, each in (0, 1)
  std::vector<double> offsets;     // radians, each in (-offset_clamp, offset_clamp)
};

double logistic(double z);

DecodedTable table_decode(const TableParams& params, double offset_clamp = kDefaultOffsetClamp);

// ---------------------------------------------------------------------------
// Gating: per-task softmax over the already-trained sub-controllers.
//
// For 1-based task index k, entries s <= k get softmax(tau * g_s) over the
// first k coefficients; entries s > k are exactly zero. The zero entries keep
// untrained sub-controllers from disturbing earlier tasks once they exist.
// ---------------------------------------------------------------------------

constexpr double kDefaultTau = 4.0;

// g may be longer than k; entries beyond k are masked. The result has the
// same length as g. Softmax uses max-subtraction so large tau*g is safe.
std::vector<double> gating_normalize(std::span<const double> g, int task_index, double tau);

struct GatingTable {
  double tau = kDefaultTau;
  std::vector<std::vector<double>> raw;   // raw[k] has k+1 coefficients
  std::vector<std::vector<double>> rows;  // rows[k] normalized, zero-padded to n_subcontrollers

  int n_tasks() const { return static_cast<int>(rows.size()); }
  int n_subcontrollers() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }

  // Appends the row for task n_tasks()+1 and re-pads all rows to the new width.
  void append_task(std::span<const double> raw_coeffs);
  // Masking + normalization invariants for every row; throws on violation.
  void validate() const;
};

// out = sum_s w_s * contributions[s], elementwise. A contribution may be empty
// only where w_s == 0 (that sub-controller need not be evaluated at all).
std::vector<double> compose(std::span<const double> weight_row,
                            std::span<const std::vector<double>> contributions);

// ---------------------------------------------------------------------------
// Genotype: the flat vector searched by the optimizer. Layout is fixed:
//   rnn:   input weights row-major | recurrent weights row-major | g_1..g_k
//   table: amp_enc | offsets_enc | g_1..g_k
// ---------------------------------------------------------------------------

struct Genotype {
  std::vector<double> values;
  int param_count = 0;  // sub-controller parameters at the front
  int coeff_count = 0;  // gating coefficients at the back

  int size() const { return param_count + coeff_count; }
  void validate() const;
};

Genotype genotype_encode(const RnnParams& params, std::span<const double> coeffs);
Genotype genotype_encode(const TableParams& params, std::span<const double> coeffs);

struct RnnLayout {
  int n_neurons = 7;
  int n_inputs = 1;
  std::vector<int> output_indices = {0};
  int coeff_count = 1;
};

struct TableLayout {
  int n_joints = 8;
  int coeff_count = 1;
};

std::pair<RnnParams, std::vector<double>> genotype_decode(const Genotype& genotype,
                                                          const RnnLayout& layout);
std::pair<TableParams, std::vector<double>> genotype_decode(const Genotype& genotype,
                                                            const TableLayout& layout);

// Decode straight from a flat candidate vector (optimizer hot path).
std::pair<RnnParams, std::vector<double>> decode_rnn_candidate(std::span<const double> values,
                                                               const RnnLayout& layout);
std::pair<TableParams, std::vector<double>> decode_table_candidate(std::span<const double> values,
                                                                   const TableLayout& layout);

}  // namespace compo
