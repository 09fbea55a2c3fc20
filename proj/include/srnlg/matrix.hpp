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

// Dense row-major double-precision kernels used by every recurrent cell.
//
// Vectors are plain std::vector<double>; kernels take std::span so callers
// can pass matrix rows without copying. Functions suffixed `_inplace` or
// `_accumulate` mutate their first argument, everything else is pure.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srnlg {

using Vector = std::vector<double>;

// Raised on any shape mismatch. Shape errors are programming or
// configuration mistakes, never data-dependent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;
  double squared_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// m * v
Vector matvec(const Matrix& m, std::span<const double> v);
// out += m * v
void matvec_accumulate(std::span<double> out, const Matrix& m, std::span<const double> v);
// out += m^T * v
void matvec_transposed_accumulate(std::span<double> out, const Matrix& m,
                                  std::span<const double> v);
// g += a * b^T
void outer_accumulate(Matrix& g, std::span<const double> a, std::span<const double> b);

Vector sigmoid(std::span<const double> v);
Vector tanh(std::span<const double> v);
Vector softmax(std::span<const double> v);
double sigmoid(double x);

Vector hadamard(std::span<const double> a, std::span<const double> b);
void add_inplace(std::span<double> a, std::span<const double> b);
void axpy_inplace(std::span<double> y, double alpha, std::span<const double> x);
bool all_finite(std::span<const double> v);

void require_dims(bool ok, const std::string& what);

}  // namespace srnlg
