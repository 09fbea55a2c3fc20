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

#include "srnlg/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace srnlg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require_dims(rows[r].size() == m.cols(), "from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const { return srnlg::all_finite(data_); }

double Matrix::squared_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return s;
}

void require_dims(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("dimension mismatch: " + what);
}

Vector matvec(const Matrix& m, std::span<const double> v) {
  Vector out(m.rows(), 0.0);
  matvec_accumulate(out, m, v);
  return out;
}

void matvec_accumulate(std::span<double> out, const Matrix& m, std::span<const double> v) {
  require_dims(m.cols() == v.size() && m.rows() == out.size(), "matvec");
  const std::size_t cols = m.cols();
  const double* a = m.data().data();
  for (std::size_t r = 0; r < m.rows(); ++r, a += cols) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += a[c] * v[c];
    out[r] += s;
  }
}

void matvec_transposed_accumulate(std::span<double> out, const Matrix& m,
                                  std::span<const double> v) {
  require_dims(m.rows() == v.size() && m.cols() == out.size(), "matvec_transposed");
  const std::size_t cols = m.cols();
  const double* a = m.data().data();
  for (std::size_t r = 0; r < m.rows(); ++r, a += cols) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += a[c] * vr;
  }
}

void outer_accumulate(Matrix& g, std::span<const double> a, std::span<const double> b) {
  require_dims(g.rows() == a.size() && g.cols() == b.size(), "outer");
  const std::size_t cols = g.cols();
  double* row = g.data().data();
  for (std::size_t r = 0; r < g.rows(); ++r, row += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

double sigmoid(double x) {
  // Branch on sign so exp() never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return sigmoid(x); });
  return out;
}

Vector tanh(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::tanh(x); });
  return out;
}

Vector softmax(std::span<const double> v) {
  Vector out(v.size());
  if (v.empty()) return out;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

Vector hadamard(std::span<const double> a, std::span<const double> b) {
  require_dims(a.size() == b.size(), "hadamard");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void add_inplace(std::span<double> a, std::span<const double> b) {
  require_dims(a.size() == b.size(), "add");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void axpy_inplace(std::span<double> y, double alpha, std::span<const double> x) {
  require_dims(y.size() == x.size(), "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace srnlg
