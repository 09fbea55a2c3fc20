/* Copyright 2026 The srnlg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Recurrent generator cells conditioned on a dialogue-act vector z.
//
//   GruBase       x = w
//   SrgruBase     d = sigmoid(W_dz z),              x = d * w
//   SrgruContext  d = sigmoid(W_dz z + W_dh h_prev), x = d * w
//
//   r  = sigmoid(W_rx x + W_rh h_prev [+ W_rz z])
//   u  = sigmoid(W_ux x + W_uh h_prev [+ W_uz z])
//   h~ = tanh(W_hx x + r * (W_hh h_prev)) [+ tanh(W_dc d)]
//   h  = u * h_prev + (1 - u) * h~
//   p  = softmax(W_ho h)
//
// The bracketed terms exist only for SrgruContext. w is the embedding row of
// the current token. Optional biases (b_d, b_r, b_u, b_h, b_o) are off by
// default. All gradients are derived by hand in backward_sequence and
// certified against finite differences in the test suite.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srnlg/matrix.hpp"
#include "srnlg/param_store.hpp"

namespace srnlg {

class Rng;

enum class CellKind { GruBase, SrgruBase, SrgruContext };

std::string_view to_string(CellKind kind);
/// Accepts "gru", "gru-base", "srgru-base", "srgru-context".
CellKind parse_cell_kind(std::string_view name);

struct ModelDims {
  std::size_t vocab = 0;
  std::size_t embed = 80;
  std::size_t hidden = 80;
  std::size_t da = 0;
  bool bias = false;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

class ModelParams {
 public:
  ModelParams() = default;
  /// All required matrices, zero-filled.
  ModelParams(CellKind kind, const ModelDims& dims);

  static std::vector<std::string> required_names(CellKind kind, bool bias);

  CellKind kind() const { return kind_; }
  const ModelDims& dims() const { return dims_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

  bool has(const std::string& name) const { return store_.contains(name); }
  const Matrix& weight(const std::string& name) const { return store_.at(name).value; }
  Matrix& weight(const std::string& name) { return store_.at(name).value; }

  /// uniform(-scale, scale) for every matrix; biases start at zero.
  void init_uniform(Rng& rng, double scale = 0.1);

 private:
  CellKind kind_ = CellKind::GruBase;
  ModelDims dims_;
  ParamStore store_;
};

struct RefineResult {
  Vector d;
  Vector x;
};

/// d = sigmoid(W_dz z), x = d * w.
RefineResult refine_base(const ModelParams& params, std::span<const double> w,
                         std::span<const double> z);
/// d = sigmoid(W_dz z + W_dh h_prev), x = d * w.
RefineResult refine_context(const ModelParams& params, std::span<const double> w,
                            std::span<const double> z, std::span<const double> h_prev);

/// Per-step activations, enough to run the backward pass without recomputing.
struct StepTrace {
  int token = 0;
  Vector w;     // embedding row after input dropout
  Vector d;     // refinement gate; empty for GruBase
  Vector x;
  Vector r;
  Vector u;
  Vector hh;    // W_hh h_prev
  Vector core;  // tanh(W_hx x + r * hh)
  Vector dc;    // tanh(W_dc d); empty unless SrgruContext
  Vector cand;  // core + dc
  Vector h_prev;
  Vector h;
  Vector o;       // h after output dropout
  Vector logits;  // W_ho o (+ b_o)
  double lse = 0.0;  // log-sum-exp of logits
  Vector p;
  Vector in_mask;   // empty when no dropout
  Vector out_mask;  // empty when no dropout
};

/// Plain GRU block on an already-refined input.
/// kind must be GruBase or SrgruBase.
StepTrace gru_step(const ModelParams& params, std::span<const double> x,
                   std::span<const double> h_prev);

/// GRU block with DA-conditioned gates and the tanh(W_dc d) candidate term.
StepTrace srgru_context_step(const ModelParams& params, std::span<const double> x,
                             std::span<const double> d, std::span<const double> z,
                             std::span<const double> h_prev);

/// Output logits W_ho h (+ b_o).
Vector output_logits(const ModelParams& params, std::span<const double> h);
/// softmax(W_ho h): the next-token distribution.
Vector output_dist(const ModelParams& params, std::span<const double> h);

/// Inverted-dropout masks for one sequence, one vector per step. Empty
/// vectors mean "no dropout" for that position.
struct DropoutMasks {
  std::vector<Vector> input;   // size embed
  std::vector<Vector> output;  // size hidden
};

/// One full step: embedding lookup, refinement, recurrence, output.
StepTrace cell_step(const ModelParams& params, int token, std::span<const double> z,
                    std::span<const double> h_prev, std::span<const double> in_mask = {},
                    std::span<const double> out_mask = {});

/// log p[target] computed stably from the trace's distribution inputs.
double step_log_prob(const StepTrace& t, int target);

struct ForwardPass {
  double loss = 0.0;  // -sum_t log p_t[target_t]
  std::vector<StepTrace> traces;
};

/// Teacher-forced pass over BOS ... EOS with h_0 = 0. Step t reads
/// token_ids[t] and predicts token_ids[t + 1].
ForwardPass forward_sequence(const ModelParams& params, std::span<const int> token_ids,
                             std::span<const double> z, const DropoutMasks* masks = nullptr);

/// Adds d(loss)/d(theta) of a matching forward pass into the gradient slots of
/// params.store(). Values are not touched.
void backward_sequence(ModelParams& params, const ForwardPass& fwd,
                       std::span<const int> token_ids, std::span<const double> z);

/// Reverses the interior of BOS w1 .. wn EOS -> BOS wn .. w1 EOS.
std::vector<int> reverse_sequence(std::span<const int> token_ids);

}  // namespace srnlg
