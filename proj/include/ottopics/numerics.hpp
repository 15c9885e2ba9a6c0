// Copyright 2026 The ottopics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense double-precision matrices and the elementwise functions the topic
// model is built from. Every differentiable piece of the library computes its
// gradient by hand; finite_diff_grad is the oracle that certifies them.

#ifndef OTTOPICS_NUMERICS_HPP_
#define OTTOPICS_NUMERICS_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace ottopics {

using Vector = std::vector<double>;

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Takes ownership of row-major `data`; throws ShapeError on size mismatch.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vector col(std::size_t c) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const;
  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Numerically stable softmax (max-subtracted). Throws NumericError on
// non-finite input.
Vector softmax(std::span<const double> v);
// log(softmax(v)) without forming the exponentials of large entries.
Vector log_softmax(std::span<const double> v);
double log_sum_exp(std::span<const double> v);

// ln(1 + e^x), stable for large |x|.
double softplus(double x);
Vector softplus(std::span<const double> v);
// Derivative of softplus.
double sigmoid(double x);

// out(j, k) = ||A[:, j] - B[:, k]||^2 for column-stacked point sets A (D x m)
// and B (D x n). Evaluated as a difference norm, clamped at zero.
Matrix pairwise_sqdist(const Matrix& a, const Matrix& b);

// Central-difference gradient of `loss` at `params`. Throws NumericError
// naming the coordinate if any evaluation is non-finite.
using ScalarFunction = std::function<double(std::span<const double>)>;
Vector finite_diff_grad(const ScalarFunction& loss, std::span<const double> params,
                        double h = 1e-5);

// ||a - b|| / max(||a||, ||b||), with the denominator floored at `floor` so
// that two vanishing gradients compare as equal.
double relative_error(std::span<const double> a, std::span<const double> b,
                      double floor = 1e-8);

// Text dump: "rows cols" then one row per line, 17 significant digits.
void write_matrix_text(std::ostream& os, const Matrix& m);
Matrix read_matrix_text(std::istream& is);

}  // namespace ottopics

#endif  // OTTOPICS_NUMERICS_HPP_
