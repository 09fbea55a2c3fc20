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

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "srnlg/cells.hpp"
#include "srnlg/finite_diff.hpp"
#include "srnlg/gradcheck.hpp"
#include "srnlg/model_io.hpp"
#include "srnlg/rng.hpp"
#include "srnlg/vocab.hpp"

using namespace srnlg;

namespace {

ModelParams random_model(CellKind kind, ModelDims dims, std::uint64_t seed, double scale = 0.5) {
  ModelParams m(kind, dims);
  Rng rng(seed);
  m.store().init_uniform(rng, -scale, scale);
  return m;
}

Vector random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar-loop reimplementation of the whole teacher-forced loss. Shares no
// code with the library apart from reading weight entries.
double naive_loss(const ModelParams& m, const std::vector<int>& ids, const Vector& z) {
  const auto& D = m.dims();
  const bool ctx = m.kind() == CellKind::SrgruContext;
  const bool refine = m.kind() != CellKind::GruBase;
  auto W = [&](const char* n, std::size_t i, std::size_t j) { return m.weight(n)(i, j); };
  std::vector<double> h(D.hidden, 0.0);
  double loss = 0.0;
  for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
    std::vector<double> w(D.embed), d(D.embed, 1.0), x(D.embed);
    for (std::size_t k = 0; k < D.embed; ++k) w[k] = W("embed", ids[t], k);
    if (refine)
      for (std::size_t k = 0; k < D.embed; ++k) {
        double a = 0.0;
        for (std::size_t j = 0; j < D.da; ++j) a += W("W_dz", k, j) * z[j];
        if (ctx)
          for (std::size_t j = 0; j < D.hidden; ++j) a += W("W_dh", k, j) * h[j];
        d[k] = sig(a);
      }
    for (std::size_t k = 0; k < D.embed; ++k) x[k] = d[k] * w[k];
    std::vector<double> hn(D.hidden);
    for (std::size_t i = 0; i < D.hidden; ++i) {
      double r = 0.0, u = 0.0, c = 0.0, hh = 0.0, dc = 0.0;
      for (std::size_t k = 0; k < D.embed; ++k) {
        r += W("W_rx", i, k) * x[k];
        u += W("W_ux", i, k) * x[k];
        c += W("W_hx", i, k) * x[k];
      }
      for (std::size_t j = 0; j < D.hidden; ++j) {
        r += W("W_rh", i, j) * h[j];
        u += W("W_uh", i, j) * h[j];
        hh += W("W_hh", i, j) * h[j];
      }
      if (ctx) {
        for (std::size_t j = 0; j < D.da; ++j) {
          r += W("W_rz", i, j) * z[j];
          u += W("W_uz", i, j) * z[j];
        }
        for (std::size_t k = 0; k < D.embed; ++k) dc += W("W_dc", i, k) * d[k];
      }
      r = sig(r);
      u = sig(u);
      double cand = std::tanh(c + r * hh);
      if (ctx) cand += std::tanh(dc);
      hn[i] = u * h[i] + (1.0 - u) * cand;
    }
    h = hn;
    std::vector<double> logit(D.vocab, 0.0);
    double mx = -1e300;
    for (std::size_t v = 0; v < D.vocab; ++v) {
      for (std::size_t j = 0; j < D.hidden; ++j) logit[v] += W("W_ho", v, j) * h[j];
      mx = std::max(mx, logit[v]);
    }
    double s = 0.0;
    for (double l : logit) s += std::exp(l - mx);
    loss -= logit[ids[t + 1]] - mx - std::log(s);
  }
  return loss;
}

const CellKind kKinds[] = {CellKind::GruBase, CellKind::SrgruBase, CellKind::SrgruContext};

}  // namespace

TEST_CASE("cell kind names") {
  CHECK(parse_cell_kind("gru") == CellKind::GruBase);
  CHECK(parse_cell_kind("gru-base") == CellKind::GruBase);
  CHECK(parse_cell_kind("srgru-base") == CellKind::SrgruBase);
  CHECK(parse_cell_kind("srgru-context") == CellKind::SrgruContext);
  CHECK(to_string(CellKind::SrgruContext) == "srgru-context");
  CHECK_THROWS_AS(parse_cell_kind("lstm"), ConfigError);
}

TEST_CASE("model params hold exactly the matrices the kind needs") {
  const ModelDims dims{7, 4, 3, 5, false};
  CHECK(ModelParams(CellKind::GruBase, dims).store().names() ==
        std::vector<std::string>{"W_hh", "W_ho", "W_hx", "W_rh", "W_rx", "W_uh", "W_ux", "embed"});
  CHECK(ModelParams(CellKind::SrgruBase, dims).has("W_dz"));
  CHECK_FALSE(ModelParams(CellKind::SrgruBase, dims).has("W_dh"));
  const ModelParams c(CellKind::SrgruContext, dims);
  for (const char* n : {"W_dz", "W_dh", "W_rz", "W_uz", "W_dc"}) CHECK(c.has(n));
  CHECK(c.weight("W_dz").rows() == 4);
  CHECK(c.weight("W_dz").cols() == 5);
  CHECK(c.weight("W_dh").cols() == 3);
  CHECK(c.weight("W_dc").rows() == 3);
  CHECK(c.weight("W_dc").cols() == 4);
  CHECK(c.weight("W_ho").rows() == 7);
  CHECK(c.weight("embed").rows() == 7);
  const ModelParams b(CellKind::SrgruContext, {7, 4, 3, 5, true});
  for (const char* n : {"b_d", "b_r", "b_u", "b_h", "b_o"}) CHECK(b.has(n));
}

TEST_CASE("refine_base examples") {
  ModelParams m = random_model(CellKind::SrgruBase, {6, 4, 3, 5, false}, 1);
  Rng rng(2);
  const Vector w = random_vec(4, rng);
  const RefineResult r = refine_base(m, w, Vector(5, 0.0));
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(r.d[k] == 0.5);
    CHECK(r.x[k] == 0.5 * w[k]);
  }
  const RefineResult zero = refine_base(m, Vector(4, 0.0), random_vec(5, rng));
  for (double x : zero.x) CHECK(x == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const Vector z = random_vec(5, rng), w2 = random_vec(4, rng);
    const RefineResult got = refine_base(m, w2, z);
    for (std::size_t k = 0; k < 4; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < 5; ++j) a += m.weight("W_dz")(k, j) * z[j];
      CHECK(std::abs(got.d[k] - sig(a)) <= 1e-12);
      CHECK(std::abs(got.x[k] - sig(a) * w2[k]) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(refine_base(m, w, Vector(4, 0.0)), ConfigError);
}

TEST_CASE("refine_context examples") {
  ModelParams m = random_model(CellKind::SrgruContext, {6, 4, 3, 5, false}, 3);
  Rng rng(4);
  const Vector w = random_vec(4, rng);
  const RefineResult r = refine_context(m, w, Vector(5, 0.0), Vector(3, 0.0));
  for (double d : r.d) CHECK(d == 0.5);

  ModelParams base = random_model(CellKind::SrgruBase, {6, 4, 3, 5, false}, 5);
  m.weight("W_dz") = base.weight("W_dz");
  m.weight("W_dh").fill(0.0);
  const Vector z = random_vec(5, rng), h = random_vec(3, rng);
  CHECK(refine_context(m, w, z, h).x == refine_base(base, w, z).x);

  m = random_model(CellKind::SrgruContext, {6, 4, 3, 5, false}, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector z2 = random_vec(5, rng), h2 = random_vec(3, rng), w2 = random_vec(4, rng);
    const RefineResult got = refine_context(m, w2, z2, h2);
    for (std::size_t k = 0; k < 4; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < 5; ++j) a += m.weight("W_dz")(k, j) * z2[j];
      for (std::size_t j = 0; j < 3; ++j) a += m.weight("W_dh")(k, j) * h2[j];
      CHECK(std::abs(got.d[k] - sig(a)) <= 1e-12);
      CHECK(std::abs(got.x[k] - sig(a) * w2[k]) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(refine_context(base, w, z, h), ConfigError);
}

TEST_CASE("gru_step examples") {
  ModelParams zero(CellKind::GruBase, {6, 4, 3, 5, false});
  const StepTrace t = gru_step(zero, Vector(4, 0.7), Vector(3, 0.0));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.h[i] == 0.0);
    CHECK(t.u[i] == 0.5);
    CHECK(t.core[i] == 0.0);
  }
  // An update gate saturated at one carries the previous state through.
  ModelParams sat = random_model(CellKind::GruBase, {6, 4, 3, 5, false}, 7);
  sat.weight("W_ux").fill(200.0);
  sat.weight("W_uh").fill(0.0);
  Rng rng(8);
  const Vector hp = random_vec(3, rng);
  const StepTrace s = gru_step(sat, Vector(4, 1.0), hp);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.u[i] == 1.0);
    CHECK(s.h[i] == hp[i]);
  }
}

TEST_CASE("gru_step keeps the state inside (-1, 1)") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    ModelParams m = random_model(CellKind::GruBase, {6, 5, 4, 3, false}, 100 + trial, 1.0);
    const StepTrace t = gru_step(m, random_vec(5, rng, 1.0), random_vec(4, rng, 0.99));
    for (double h : t.h) {
      CHECK(h > -1.0);
      CHECK(h < 1.0);
    }
    for (double g : t.r) CHECK((g > 0.0 && g < 1.0));
    for (double g : t.u) CHECK((g > 0.0 && g < 1.0));
  }
  // Saturating inputs reach the bounds in floating point but never cross them.
  for (int trial = 0; trial < 200; ++trial) {
    ModelParams m = random_model(CellKind::GruBase, {6, 5, 4, 3, false}, 500 + trial, 3.0);
    const StepTrace t = gru_step(m, random_vec(5, rng, 10.0), random_vec(4, rng, 1.0));
    for (double h : t.h) CHECK(std::abs(h) <= 1.0);
    for (double g : t.r) CHECK((g >= 0.0 && g <= 1.0));
  }
}

TEST_CASE("srgru_context_step examples and bound") {
  const ModelDims dims{6, 4, 3, 5, false};
  ModelParams c = random_model(CellKind::SrgruContext, dims, 10);
  c.weight("W_rz").fill(0.0);
  c.weight("W_uz").fill(0.0);
  c.weight("W_dc").fill(0.0);
  ModelParams g(CellKind::GruBase, dims);
  for (const auto& n : g.store().names()) g.weight(n) = c.weight(n);
  Rng rng(11);
  const Vector x = random_vec(4, rng), d = random_vec(4, rng), z = random_vec(5, rng),
               hp = random_vec(3, rng);
  CHECK(srgru_context_step(c, x, d, z, hp).h == gru_step(g, x, hp).h);

  ModelParams zero(CellKind::SrgruContext, dims);
  for (double h : srgru_context_step(zero, x, d, z, Vector(3, 0.0)).h) CHECK(h == 0.0);

  for (int trial = 0; trial < 200; ++trial) {
    ModelParams m = random_model(CellKind::SrgruContext, dims, 200 + trial, 3.0);
    const StepTrace t =
        srgru_context_step(m, random_vec(4, rng, 5.0), random_vec(4, rng, 5.0),
                           random_vec(5, rng, 5.0), random_vec(3, rng, 2.0));
    for (double h : t.h) CHECK(std::abs(h) < 2.0);
  }
}

TEST_CASE("gate ranges and hidden bounds over whole sequences") {
  Rng rng(12);
  for (CellKind k : kKinds) {
    ModelParams m = random_model(k, {9, 5, 4, 3, false}, 13, 2.0);
    std::vector<int> ids{Vocab::kBos};
    for (int i = 0; i < 30; ++i) ids.push_back(3 + static_cast<int>(rng.below(6)));
    ids.push_back(Vocab::kEos);
    const ForwardPass f = forward_sequence(m, ids, random_vec(3, rng, 1.0));
    const double bound = k == CellKind::SrgruContext ? 2.0 : 1.0;
    for (const auto& t : f.traces) {
      for (double h : t.h) CHECK(std::abs(h) < bound);
      for (double g : t.r) CHECK((g > 0.0 && g < 1.0));
      for (double g : t.u) CHECK((g > 0.0 && g < 1.0));
      for (double g : t.d) CHECK((g > 0.0 && g < 1.0));
    }
  }
}

TEST_CASE("output distribution") {
  ModelParams m(CellKind::GruBase, {5, 3, 3, 2, false});
  for (double p : output_dist(m, Vector{0.3, -0.2, 0.9})) CHECK(p == doctest::Approx(0.2));
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams r = random_model(CellKind::GruBase, {8, 3, 4, 2, false}, 300 + trial, 2.0);
    const Vector h = random_vec(4, rng);
    const Vector p = output_dist(r, h);
    double sum = 0.0, best = -1e300;
    std::size_t arg = 0;
    for (std::size_t v = 0; v < 8; ++v) {
      sum += p[v];
      double l = 0.0;
      for (std::size_t j = 0; j < 4; ++j) l += r.weight("W_ho")(v, j) * h[j];
      if (l > best) {
        best = l;
        arg = v;
      }
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(std::max_element(p.begin(), p.end()) - p.begin() == static_cast<long>(arg));
  }
}

TEST_CASE("forward_sequence examples") {
  ModelParams uniform(CellKind::SrgruContext, {5, 3, 3, 2, false});
  const std::vector<int> two{Vocab::kBos, Vocab::kEos};
  CHECK(forward_sequence(uniform, two, Vector{1, 0}).loss == doctest::Approx(std::log(5.0)));
  CHECK(forward_sequence(uniform, std::vector<int>{Vocab::kBos}, Vector{1, 0}).loss == 0.0);
  CHECK_THROWS_AS(forward_sequence(uniform, std::vector<int>{0, 9, 1}, Vector{1, 0}),
                  std::out_of_range);

  Rng rng(15);
  for (CellKind k : kKinds)
    for (int trial = 0; trial < 10; ++trial) {
      const ModelParams m = random_model(k, {5, 3, 3, 4, false}, 400 + trial, 1.0);
      const std::vector<int> ids{0, 3, 4, 1};
      const Vector z = random_vec(4, rng);
      const double got = forward_sequence(m, ids, z).loss;
      CHECK(got >= 0.0);
      CHECK(std::abs(got - naive_loss(m, ids, z)) <= 1e-10);
    }
}

TEST_CASE("reduction: context cell with zeroed extras equals the base cell bit-exactly") {
  const ModelDims dims{7, 4, 4, 5, false};
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams base = random_model(CellKind::SrgruBase, dims, 500 + trial);
    ModelParams ctx(CellKind::SrgruContext, dims);
    for (const auto& n : base.store().names()) ctx.weight(n) = base.weight(n);
    const std::vector<int> ids{0, 3, 5, 6, 4, 1};
    const Vector z = random_vec(5, rng);
    const ForwardPass a = forward_sequence(base, ids, z), b = forward_sequence(ctx, ids, z);
    for (std::size_t t = 0; t < a.traces.size(); ++t) CHECK(a.traces[t].h == b.traces[t].h);
    CHECK(a.loss == b.loss);
  }
}

TEST_CASE("reduction: base cell with W_dz = 0 equals GRU on half-scaled inputs bit-exactly") {
  const ModelDims dims{7, 4, 4, 5, false};
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams base = random_model(CellKind::SrgruBase, dims, 600 + trial);
    base.weight("W_dz").fill(0.0);
    ModelParams gru(CellKind::GruBase, dims);
    for (const auto& n : gru.store().names()) gru.weight(n) = base.weight(n);
    for (double& x : gru.weight("embed").data()) x *= 0.5;
    const std::vector<int> ids{0, 3, 5, 6, 4, 1};
    const Vector z = random_vec(5, rng);
    const ForwardPass a = forward_sequence(base, ids, z), b = forward_sequence(gru, ids, z);
    for (std::size_t t = 0; t < a.traces.size(); ++t) CHECK(a.traces[t].h == b.traces[t].h);
  }
}

TEST_CASE("backward: zero-length target and unused embedding rows") {
  ModelParams m = random_model(CellKind::SrgruContext, {7, 4, 4, 5, false}, 18);
  const Vector z(5, 1.0);
  m.store().zero_grad();
  const std::vector<int> one{Vocab::kBos};
  backward_sequence(m, forward_sequence(m, one, z), one, z);
  CHECK(m.store().grad_norm() == 0.0);

  const std::vector<int> ids{0, 3, 3, 5, 1};
  backward_sequence(m, forward_sequence(m, ids, z), ids, z);
  const Matrix& ge = m.store().at("embed").grad;
  for (int row : {1, 2, 4, 6})
    for (std::size_t k = 0; k < 4; ++k) CHECK(ge(row, k) == 0.0);
  double used = 0.0;
  for (std::size_t k = 0; k < 4; ++k) used += std::abs(ge(3, k));
  CHECK(used > 0.0);
}

TEST_CASE("backward matches finite differences for every kind, with and without biases") {
  for (bool bias : {false, true}) {
    GradCheckConfig cfg;
    cfg.bias = bias;
    const GradCheckReport rep = run_gradcheck(cfg);
    INFO(rep.text());
    CHECK(rep.passed());
    CHECK(rep.cases.size() == 40);
  }
}

TEST_CASE("gradient check of a single context step with cross-entropy") {
  ModelParams m = random_model(CellKind::SrgruContext, {6, 3, 3, 4, false}, 19);
  const std::vector<int> ids{0, 4};
  const Vector z{1, 0, 1, 0};
  m.store().zero_grad();
  backward_sequence(m, forward_sequence(m, ids, z), ids, z);
  const GradSnapshot num = finite_diff_grad(
      [&](const ParamStore&) { return forward_sequence(m, ids, z).loss; }, m.store());
  for (const auto& d : compare_gradients(m.store(), num)) {
    CAPTURE(d.name);
    CHECK(d.rel_error <= 1e-4);
  }
}

TEST_CASE("gradcheck mutation names the broken matrix and looser eps still passes") {
  GradCheckConfig cfg;
  cfg.seeds = 3;
  cfg.flip_sign = "W_dc";
  const GradCheckReport bad = run_gradcheck(cfg);
  CHECK_FALSE(bad.passed());
  for (const auto& c : bad.cases) {
    if (c.model == "srgru-context" || c.model == "tb-pair") {
      CHECK_FALSE(c.passed);
      CHECK(c.worst.name.find("W_dc") != std::string::npos);
    } else {
      CHECK(c.passed);
    }
  }
  CHECK(bad.text().find("W_dc") != std::string::npos);

  cfg.flip_sign.clear();
  cfg.eps = 1e-3;
  CHECK(run_gradcheck(cfg).passed());
}

TEST_CASE("forward and backward are deterministic") {
  for (CellKind k : kKinds) {
    ModelParams a = random_model(k, {7, 4, 4, 5, false}, 20), b = random_model(k, {7, 4, 4, 5, false}, 20);
    const std::vector<int> ids{0, 3, 4, 5, 1};
    const Vector z{1, 0, 0, 1, 1};
    a.store().zero_grad();
    b.store().zero_grad();
    const ForwardPass fa = forward_sequence(a, ids, z), fb = forward_sequence(b, ids, z);
    CHECK(fa.loss == fb.loss);
    backward_sequence(a, fa, ids, z);
    backward_sequence(b, fb, ids, z);
    for (const auto& n : a.store().names()) CHECK(a.store().at(n).grad == b.store().at(n).grad);
  }
}

TEST_CASE("reverse_sequence") {
  CHECK(reverse_sequence(std::vector<int>{0, 3, 4, 5, 1}) == std::vector<int>{0, 5, 4, 3, 1});
  CHECK(reverse_sequence(std::vector<int>{0, 1}) == std::vector<int>{0, 1});
  const std::vector<int> s{0, 3, 4, 1};
  CHECK(reverse_sequence(reverse_sequence(s)) == s);
}

TEST_CASE("model files round trip bit-exactly and reject damage") {
  for (CellKind k : kKinds) {
    ModelFile f{random_model(k, {7, 4, 3, 5, k == CellKind::SrgruBase}, 21), 0x1234, 0xabcdef};
    const std::string text = serialize_model(f);
    const ModelFile g = parse_model(text);
    CHECK(g.params.kind() == k);
    CHECK(g.params.dims() == f.params.dims());
    CHECK(g.vocab_hash == 0x1234);
    CHECK(g.schema_hash == 0xabcdef);
    CHECK(g.params.store().values_equal(f.params.store()));
    CHECK(serialize_model(g) == text);
  }
  const ModelFile f{random_model(CellKind::GruBase, {7, 4, 3, 5, false}, 22), 1, 2};
  std::string text = serialize_model(f);
  CHECK_THROWS(parse_model(text.substr(0, text.size() / 2)));
  CHECK_THROWS(parse_model("srnlg-model 2\n"));
  const auto pos = text.find("matrix W_hh");
  std::string missing = text;
  missing.replace(pos, 6, "matrix_");
  CHECK_THROWS(parse_model(missing));

  const auto dir = std::filesystem::temp_directory_path() / "srnlg_test_model";
  save_model(dir / "m.txt", f);
  CHECK(load_model(dir / "m.txt").params.store().values_equal(f.params.store()));
}
