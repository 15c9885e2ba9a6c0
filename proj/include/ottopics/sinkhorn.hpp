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

// Entropic optimal transport between word embeddings (uniform mass 1/V each)
// and topic embeddings (mass s_k each), solved with Sinkhorn scaling.

#ifndef OTTOPICS_SINKHORN_HPP_
#define OTTOPICS_SINKHORN_HPP_

#include <cstddef>

#include "ottopics/numerics.hpp"

namespace ottopics {

struct SinkhornConfig {
  std::size_t max_iterations = 1000;
  // Bound on the L1 deviation of the plan's column sums from col_weights.
  double stop_tolerance = 0.005;
  // Entropic weight, relative to the largest cost entry.
  double epsilon = 0.05;

  // Throws ValidationError unless every field is positive.
  void validate() const;
};

struct OtProblem {
  Matrix cost;           // V x K, nonnegative
  Vector row_weights;    // length V, sums to 1
  Vector col_weights;    // length K, sums to 1

  // Uniform row weights 1/V and the given column weights.
  static OtProblem with_uniform_rows(Matrix cost, Vector col_weights);
  void validate() const;
};

struct TransportPlan {
  Matrix plan;  // V x K
  std::size_t iterations_used = 0;
  // L1 deviation of the column sums from col_weights.
  double marginal_error = 0.0;
  bool converged = false;
  // Largest cost entry; the effective entropic weight is epsilon * cost_scale.
  double cost_scale = 1.0;
};

// Runs the alternating updates a <- r / (M b), b <- s / (M^T a) from b = 1
// with M = exp(-C / (epsilon * max C)). The a-update is applied last, so row
// sums match row_weights to rounding. Stops once the column deviation falls
// to stop_tolerance or max_iterations is reached; non-convergence is
// reported through `converged`, not thrown. Throws StabilityError if a
// scaling vector becomes non-finite.
TransportPlan solve(const OtProblem& problem, const SinkhornConfig& cfg);

// Shannon entropy of each row of the plan after normalizing it to sum to one.
Vector plan_row_entropy(const TransportPlan& plan);

double transport_cost(const Matrix& cost, const Matrix& plan);

}  // namespace ottopics

#endif  // OTTOPICS_SINKHORN_HPP_
