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

#include "ottopics/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ottopics/errors.hpp"

namespace ottopics {

namespace {

constexpr double kDenominatorFloor = 1e-300;

void check_simplex(const Vector& w, const char* name) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ValidationError(std::string(name) + " must be strictly positive");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError(std::string(name) + " must sum to 1");
  }
}

void check_scaling(const Vector& v, const char* name, std::size_t iteration,
                   double epsilon) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw StabilityError("sinkhorn: scaling vector " + std::string(name) +
                           " became non-finite at iteration " +
                           std::to_string(iteration) + " (epsilon " +
                           std::to_string(epsilon) +
                           "); use a larger epsilon");
    }
  }
}

}  // namespace

void SinkhornConfig::validate() const {
  if (max_iterations == 0) throw ValidationError("sinkhorn: max_iterations must be positive");
  if (!(stop_tolerance > 0.0)) throw ValidationError("sinkhorn: stop_tolerance must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("sinkhorn: epsilon must be positive");
}

OtProblem OtProblem::with_uniform_rows(Matrix cost, Vector col_weights) {
  OtProblem p;
  p.row_weights.assign(cost.rows(), cost.rows() ? 1.0 / double(cost.rows()) : 0.0);
  p.cost = std::move(cost);
  p.col_weights = std::move(col_weights);
  return p;
}

void OtProblem::validate() const {
  if (cost.rows() == 0 || cost.cols() == 0) throw ShapeError("sinkhorn: empty problem");
  if (row_weights.size() != cost.rows() || col_weights.size() != cost.cols()) {
    throw ShapeError("sinkhorn: marginal lengths do not match the cost matrix");
  }
  for (double c : cost.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ValidationError("sinkhorn: costs must be finite and nonnegative");
    }
  }
  check_simplex(row_weights, "row_weights");
  check_simplex(col_weights, "col_weights");
}

TransportPlan solve(const OtProblem& problem, const SinkhornConfig& cfg) {
  problem.validate();
  cfg.validate();
  const std::size_t rows = problem.cost.rows(), cols = problem.cost.cols();

  double scale = *std::max_element(problem.cost.data().begin(), problem.cost.data().end());
  if (!(scale > 0.0)) scale = 1.0;
  const double eps = cfg.epsilon;

  // Kernel on the normalized cost. Subtracting per-row and then per-column
  // minima keeps a unit entry in every row and column; the shifts are
  // absorbed by the scalings and leave the fixed-point plan unchanged.
  Matrix kernel(rows, cols);
  for (std::size_t j = 0; j < rows; ++j) {
    const auto c = problem.cost.row(j);
    const double lo = *std::min_element(c.begin(), c.end());
    auto out = kernel.row(j);
    for (std::size_t k = 0; k < cols; ++k) out[k] = (c[k] - lo) / scale;
  }
  Vector col_min(cols, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t k = 0; k < cols; ++k) col_min[k] = std::min(col_min[k], kernel(j, k));
  for (std::size_t j = 0; j < rows; ++j) {
    auto out = kernel.row(j);
    for (std::size_t k = 0; k < cols; ++k) out[k] = std::exp(-(out[k] - col_min[k]) / eps);
  }

  const Vector& r = problem.row_weights;
  const Vector& s = problem.col_weights;
  Vector a(rows, 0.0), b(cols, 1.0), mta(cols);

  TransportPlan result;
  result.cost_scale = scale;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t j = 0; j < rows; ++j) {
      const auto m = kernel.row(j);
      double mb = 0.0;
      for (std::size_t k = 0; k < cols; ++k) mb += m[k] * b[k];
      a[j] = r[j] / std::max(mb, kDenominatorFloor);
    }
    check_scaling(a, "a", it, eps);

    std::fill(mta.begin(), mta.end(), 0.0);
    for (std::size_t j = 0; j < rows; ++j) {
      const auto m = kernel.row(j);
      for (std::size_t k = 0; k < cols; ++k) mta[k] += m[k] * a[j];
    }
    double err = 0.0;
    for (std::size_t k = 0; k < cols; ++k) err += std::abs(b[k] * mta[k] - s[k]);
    result.iterations_used = it;
    if (err <= cfg.stop_tolerance) {
      result.converged = true;
      break;
    }
    if (it == cfg.max_iterations) break;

    for (std::size_t k = 0; k < cols; ++k) b[k] = s[k] / std::max(mta[k], kDenominatorFloor);
    check_scaling(b, "b", it, eps);
  }

  result.plan = Matrix(rows, cols);
  Vector colsum(cols, 0.0);
  for (std::size_t j = 0; j < rows; ++j) {
    const auto m = kernel.row(j);
    auto p = result.plan.row(j);
    for (std::size_t k = 0; k < cols; ++k) {
      p[k] = a[j] * m[k] * b[k];
      colsum[k] += p[k];
    }
  }
  result.marginal_error = 0.0;
  for (std::size_t k = 0; k < cols; ++k) result.marginal_error += std::abs(colsum[k] - s[k]);
  return result;
}

Vector plan_row_entropy(const TransportPlan& plan) {
  const Matrix& p = plan.plan;
  Vector out(p.rows(), 0.0);
  for (std::size_t j = 0; j < p.rows(); ++j) {
    const auto row = p.row(j);
    double total = 0.0;
    for (double x : row) total += x;
    if (!(total > 0.0)) continue;
    double h = 0.0;
    for (double x : row) {
      const double q = x / total;
      if (q > 0.0) h -= q * std::log(q);
    }
    out[j] = h;
  }
  return out;
}

double transport_cost(const Matrix& cost, const Matrix& plan) {
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols()) {
    throw ShapeError("transport_cost: shape mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < cost.size(); ++i) total += cost.data()[i] * plan.data()[i];
  return total;
}

}  // namespace ottopics
