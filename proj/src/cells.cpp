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

#include "srnlg/cells.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srnlg/rng.hpp"

namespace srnlg {
namespace {

bool is_bias(const std::string& name) { return name.starts_with("b_"); }

// Adds the bias vector `name` when the model carries biases.
void add_bias(const ModelParams& params, const char* name, Vector& v) {
  if (!params.dims().bias) return;
  add_inplace(v, params.weight(name).data());
}

// Accumulates a bias gradient when the model carries biases.
void bias_grad(ModelParams& params, const char* name, std::span<const double> g) {
  if (!params.dims().bias) return;
  add_inplace(params.store().at(name).grad.data(), g);
}

// Gate pre-activation W_x x + W_h h (+ W_z z) (+ b), summed in that order.
Vector gate_preact(const ModelParams& params, const char* wx, const char* wh, const char* wz,
                   const char* b, std::span<const double> x, std::span<const double> h,
                   std::span<const double> z) {
  Vector a = matvec(params.weight(wx), x);
  matvec_accumulate(a, params.weight(wh), h);
  if (wz) matvec_accumulate(a, params.weight(wz), z);
  add_bias(params, b, a);
  return a;
}

// Shared GRU recurrence; `dc` is the extra candidate term (empty for none).
StepTrace recur(const ModelParams& params, std::span<const double> x,
                std::span<const double> h_prev, std::span<const double> z, bool conditioned) {
  const auto& dims = params.dims();
  require_dims(x.size() == dims.embed, "cell input");
  require_dims(h_prev.size() == dims.hidden, "cell hidden state");
  StepTrace t;
  t.x.assign(x.begin(), x.end());
  t.h_prev.assign(h_prev.begin(), h_prev.end());
  const char* wrz = conditioned ? "W_rz" : nullptr;
  const char* wuz = conditioned ? "W_uz" : nullptr;
  t.r = sigmoid(gate_preact(params, "W_rx", "W_rh", wrz, "b_r", x, h_prev, z));
  t.u = sigmoid(gate_preact(params, "W_ux", "W_uh", wuz, "b_u", x, h_prev, z));
  t.hh = matvec(params.weight("W_hh"), h_prev);
  Vector a = matvec(params.weight("W_hx"), x);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += t.r[i] * t.hh[i];
  add_bias(params, "b_h", a);
  t.core = tanh(a);
  t.cand = t.core;
  t.h.resize(dims.hidden);
  return t;
}

void finish_hidden(StepTrace& t) {
  for (std::size_t i = 0; i < t.h.size(); ++i)
    t.h[i] = t.u[i] * t.h_prev[i] + (1.0 - t.u[i]) * t.cand[i];
}

double log_sum_exp(std::span<const double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::GruBase: return "gru-base";
    case CellKind::SrgruBase: return "srgru-base";
    case CellKind::SrgruContext: return "srgru-context";
  }
  return "gru-base";
}

CellKind parse_cell_kind(std::string_view name) {
  if (name == "gru" || name == "gru-base") return CellKind::GruBase;
  if (name == "srgru-base") return CellKind::SrgruBase;
  if (name == "srgru-context" || name == "tb-srgru") return CellKind::SrgruContext;
  throw ConfigError("unknown cell kind: " + std::string(name));
}

std::vector<std::string> ModelParams::required_names(CellKind kind, bool bias) {
  std::vector<std::string> names{"embed", "W_rx", "W_rh", "W_ux", "W_uh", "W_hx", "W_hh", "W_ho"};
  if (kind != CellKind::GruBase) names.push_back("W_dz");
  if (kind == CellKind::SrgruContext)
    names.insert(names.end(), {"W_dh", "W_rz", "W_uz", "W_dc"});
  if (bias) {
    names.insert(names.end(), {"b_r", "b_u", "b_h", "b_o"});
    if (kind != CellKind::GruBase) names.push_back("b_d");
  }
  std::sort(names.begin(), names.end());
  return names;
}

ModelParams::ModelParams(CellKind kind, const ModelDims& dims) : kind_(kind), dims_(dims) {
  if (dims.vocab == 0 || dims.embed == 0 || dims.hidden == 0)
    throw ConfigError("model dimensions must be positive");
  if (kind != CellKind::GruBase && dims.da == 0)
    throw ConfigError("refinement cells need a non-empty DA vector");
  const std::size_t V = dims.vocab, E = dims.embed, H = dims.hidden, Z = dims.da;
  for (const auto& name : required_names(kind, dims.bias)) {
    std::size_t rows = H, cols = H;
    if (name == "embed") rows = V, cols = E;
    else if (name == "W_dz") rows = E, cols = Z;
    else if (name == "W_dh") rows = E, cols = H;
    else if (name == "W_rx" || name == "W_ux" || name == "W_hx" || name == "W_dc") cols = E;
    else if (name == "W_rz" || name == "W_uz") cols = Z;
    else if (name == "W_ho") rows = V;
    else if (name == "b_o") rows = V, cols = 1;
    else if (name == "b_d") rows = E, cols = 1;
    else if (is_bias(name)) cols = 1;
    store_.add(name, rows, cols);
  }
}

void ModelParams::init_uniform(Rng& rng, double scale) {
  store_.for_each_unique([&](const std::string& name, Parameter& p) {
    if (is_bias(name)) {
      p.value.fill(0.0);
      return;
    }
    for (double& v : p.value.data()) v = rng.uniform(-scale, scale);
  });
}

RefineResult refine_base(const ModelParams& params, std::span<const double> w,
                         std::span<const double> z) {
  require_dims(params.has("W_dz"), "refine_base needs W_dz");
  Vector a = matvec(params.weight("W_dz"), z);
  add_bias(params, "b_d", a);
  RefineResult out;
  out.d = sigmoid(a);
  out.x = hadamard(out.d, w);
  return out;
}

RefineResult refine_context(const ModelParams& params, std::span<const double> w,
                            std::span<const double> z, std::span<const double> h_prev) {
  require_dims(params.kind() == CellKind::SrgruContext, "refine_context needs SrgruContext");
  Vector a = matvec(params.weight("W_dz"), z);
  matvec_accumulate(a, params.weight("W_dh"), h_prev);
  add_bias(params, "b_d", a);
  RefineResult out;
  out.d = sigmoid(a);
  out.x = hadamard(out.d, w);
  return out;
}

StepTrace gru_step(const ModelParams& params, std::span<const double> x,
                   std::span<const double> h_prev) {
  require_dims(params.kind() != CellKind::SrgruContext, "gru_step on SrgruContext params");
  StepTrace t = recur(params, x, h_prev, {}, false);
  finish_hidden(t);
  return t;
}

StepTrace srgru_context_step(const ModelParams& params, std::span<const double> x,
                             std::span<const double> d, std::span<const double> z,
                             std::span<const double> h_prev) {
  require_dims(params.kind() == CellKind::SrgruContext, "srgru_context_step needs SrgruContext");
  require_dims(z.size() == params.dims().da, "DA vector");
  StepTrace t = recur(params, x, h_prev, z, true);
  t.dc = tanh(matvec(params.weight("W_dc"), d));
  add_inplace(t.cand, t.dc);
  finish_hidden(t);
  return t;
}

Vector output_logits(const ModelParams& params, std::span<const double> h) {
  Vector logits = matvec(params.weight("W_ho"), h);
  add_bias(params, "b_o", logits);
  return logits;
}

Vector output_dist(const ModelParams& params, std::span<const double> h) {
  return softmax(output_logits(params, h));
}

StepTrace cell_step(const ModelParams& params, int token, std::span<const double> z,
                    std::span<const double> h_prev, std::span<const double> in_mask,
                    std::span<const double> out_mask) {
  const auto& dims = params.dims();
  if (token < 0 || static_cast<std::size_t>(token) >= dims.vocab)
    throw std::out_of_range("token id out of range: " + std::to_string(token));
  if (params.kind() != CellKind::GruBase) require_dims(z.size() == dims.da, "DA vector");

  auto row = params.weight("embed").row(static_cast<std::size_t>(token));
  Vector w(row.begin(), row.end());
  if (!in_mask.empty()) w = hadamard(w, in_mask);

  StepTrace t;
  switch (params.kind()) {
    case CellKind::GruBase:
      t = gru_step(params, w, h_prev);
      break;
    case CellKind::SrgruBase: {
      RefineResult ref = refine_base(params, w, z);
      t = gru_step(params, ref.x, h_prev);
      t.d = std::move(ref.d);
      break;
    }
    case CellKind::SrgruContext: {
      RefineResult ref = refine_context(params, w, z, h_prev);
      t = srgru_context_step(params, ref.x, ref.d, z, h_prev);
      t.d = std::move(ref.d);
      break;
    }
  }
  t.token = token;
  t.w = std::move(w);
  t.in_mask.assign(in_mask.begin(), in_mask.end());
  t.out_mask.assign(out_mask.begin(), out_mask.end());
  t.o = out_mask.empty() ? t.h : hadamard(t.h, out_mask);
  t.logits = output_logits(params, t.o);
  t.lse = log_sum_exp(t.logits);
  t.p.resize(t.logits.size());
  for (std::size_t i = 0; i < t.p.size(); ++i) t.p[i] = std::exp(t.logits[i] - t.lse);
  return t;
}

double step_log_prob(const StepTrace& t, int target) {
  return t.logits.at(static_cast<std::size_t>(target)) - t.lse;
}

ForwardPass forward_sequence(const ModelParams& params, std::span<const int> token_ids,
                             std::span<const double> z, const DropoutMasks* masks) {
  for (int id : token_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= params.dims().vocab)
      throw std::out_of_range("token id out of range: " + std::to_string(id));
  ForwardPass fwd;
  if (token_ids.size() < 2) return fwd;
  const std::size_t steps = token_ids.size() - 1;
  if (masks) {
    require_dims(masks->input.empty() || masks->input.size() >= steps, "input dropout masks");
    require_dims(masks->output.empty() || masks->output.size() >= steps, "output dropout masks");
  }
  fwd.traces.reserve(steps);
  Vector h(params.dims().hidden, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    std::span<const double> in_mask, out_mask;
    if (masks && !masks->input.empty()) in_mask = masks->input[t];
    if (masks && !masks->output.empty()) out_mask = masks->output[t];
    StepTrace tr = cell_step(params, token_ids[t], z, h, in_mask, out_mask);
    fwd.loss += -step_log_prob(tr, token_ids[t + 1]);
    h = tr.h;
    fwd.traces.push_back(std::move(tr));
  }
  return fwd;
}

void backward_sequence(ModelParams& params, const ForwardPass& fwd,
                       std::span<const int> token_ids, std::span<const double> z) {
  const std::size_t steps = fwd.traces.size();
  if (steps == 0) return;
  if (token_ids.size() != steps + 1)
    throw ConfigError("backward_sequence: traces do not match the token sequence");

  const auto& dims = params.dims();
  const CellKind kind = params.kind();
  const bool refine = kind != CellKind::GruBase;
  const bool ctx = kind == CellKind::SrgruContext;
  ParamStore& ps = params.store();

  auto& g_embed = ps.at("embed").grad;
  auto& g_ho = ps.at("W_ho").grad;
  auto& g_rx = ps.at("W_rx").grad;
  auto& g_rh = ps.at("W_rh").grad;
  auto& g_ux = ps.at("W_ux").grad;
  auto& g_uh = ps.at("W_uh").grad;
  auto& g_hx = ps.at("W_hx").grad;
  auto& g_hh = ps.at("W_hh").grad;
  const Matrix& W_ho = params.weight("W_ho");
  const Matrix& W_rx = params.weight("W_rx");
  const Matrix& W_rh = params.weight("W_rh");
  const Matrix& W_ux = params.weight("W_ux");
  const Matrix& W_uh = params.weight("W_uh");
  const Matrix& W_hx = params.weight("W_hx");
  const Matrix& W_hh = params.weight("W_hh");

  const std::size_t H = dims.hidden, E = dims.embed;
  Vector dh_next(H, 0.0);
  for (std::size_t k = steps; k-- > 0;) {
    const StepTrace& t = fwd.traces[k];
    const int target = token_ids[k + 1];
    require_dims(t.h.size() == H && t.x.size() == E, "trace shape");

    // softmax + NLL
    Vector dlogits = t.p;
    dlogits.at(static_cast<std::size_t>(target)) -= 1.0;
    outer_accumulate(g_ho, dlogits, t.o);
    bias_grad(params, "b_o", dlogits);
    Vector dh(H, 0.0);
    matvec_transposed_accumulate(dh, W_ho, dlogits);
    if (!t.out_mask.empty())
      for (std::size_t i = 0; i < H; ++i) dh[i] *= t.out_mask[i];
    add_inplace(dh, dh_next);

    // h = u*h_prev + (1-u)*cand
    Vector dhp(H), du_pre(H), dcore_pre(H), dr_pre(H), dhh(H);
    Vector ddc_pre;
    if (ctx) ddc_pre.resize(H);
    for (std::size_t i = 0; i < H; ++i) {
      const double u = t.u[i];
      dhp[i] = dh[i] * u;
      const double du = dh[i] * (t.h_prev[i] - t.cand[i]);
      du_pre[i] = du * u * (1.0 - u);
      const double dcand = dh[i] * (1.0 - u);
      dcore_pre[i] = dcand * (1.0 - t.core[i] * t.core[i]);
      if (ctx) ddc_pre[i] = dcand * (1.0 - t.dc[i] * t.dc[i]);
      const double dr = dcore_pre[i] * t.hh[i];
      dr_pre[i] = dr * t.r[i] * (1.0 - t.r[i]);
      dhh[i] = dcore_pre[i] * t.r[i];
    }

    Vector dx(E, 0.0);
    // candidate core
    outer_accumulate(g_hx, dcore_pre, t.x);
    matvec_transposed_accumulate(dx, W_hx, dcore_pre);
    bias_grad(params, "b_h", dcore_pre);
    outer_accumulate(g_hh, dhh, t.h_prev);
    matvec_transposed_accumulate(dhp, W_hh, dhh);
    // update gate
    outer_accumulate(g_ux, du_pre, t.x);
    outer_accumulate(g_uh, du_pre, t.h_prev);
    matvec_transposed_accumulate(dx, W_ux, du_pre);
    matvec_transposed_accumulate(dhp, W_uh, du_pre);
    bias_grad(params, "b_u", du_pre);
    // reset gate
    outer_accumulate(g_rx, dr_pre, t.x);
    outer_accumulate(g_rh, dr_pre, t.h_prev);
    matvec_transposed_accumulate(dx, W_rx, dr_pre);
    matvec_transposed_accumulate(dhp, W_rh, dr_pre);
    bias_grad(params, "b_r", dr_pre);

    Vector dd;
    if (ctx) {
      outer_accumulate(ps.at("W_rz").grad, dr_pre, z);
      outer_accumulate(ps.at("W_uz").grad, du_pre, z);
      outer_accumulate(ps.at("W_dc").grad, ddc_pre, t.d);
      dd.assign(E, 0.0);
      matvec_transposed_accumulate(dd, params.weight("W_dc"), ddc_pre);
    }

    // x = d * w
    Vector dw(E);
    if (refine) {
      if (dd.empty()) dd.assign(E, 0.0);
      for (std::size_t i = 0; i < E; ++i) {
        dw[i] = dx[i] * t.d[i];
        dd[i] += dx[i] * t.w[i];
        dd[i] *= t.d[i] * (1.0 - t.d[i]);
      }
      outer_accumulate(ps.at("W_dz").grad, dd, z);
      bias_grad(params, "b_d", dd);
      if (ctx) {
        outer_accumulate(ps.at("W_dh").grad, dd, t.h_prev);
        matvec_transposed_accumulate(dhp, params.weight("W_dh"), dd);
      }
    } else {
      dw = dx;
    }

    if (!t.in_mask.empty())
      for (std::size_t i = 0; i < E; ++i) dw[i] *= t.in_mask[i];
    add_inplace(g_embed.row(static_cast<std::size_t>(t.token)), dw);

    dh_next = std::move(dhp);
  }
}

std::vector<int> reverse_sequence(std::span<const int> token_ids) {
  std::vector<int> out(token_ids.begin(), token_ids.end());
  if (out.size() > 2) std::reverse(out.begin() + 1, out.end() - 1);
  return out;
}

}  // namespace srnlg
