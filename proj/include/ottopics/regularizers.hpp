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

// Clustering regularizers on word embeddings W (D x V, one word per column)
// and topic embeddings T (D x K, one topic per column).
//
//   ECR          sum_jk ||w_j - t_k||^2 pi_jk, pi the entropic OT plan with
//                row mass 1/V and column mass s_k. The plan is held fixed
//                while differentiating.
//   DKM          sum_jk ||w_j - t_k||^2 p_jk, p_jk = softmax_k(-||w_j - t_k||^2 / tau).
//   DKM+Entropy  DKM + weight * sum_jk -p_jk log p_jk.

#ifndef OTTOPICS_REGULARIZERS_HPP_
#define OTTOPICS_REGULARIZERS_HPP_

#include <cstddef>
#include <optional>
#include <string_view>

#include "ottopics/numerics.hpp"
#include "ottopics/sinkhorn.hpp"

namespace ottopics {

// Preset cluster-size proportions s on the simplex.
class ClusterSizeSpec {
 public:
  static ClusterSizeSpec uniform(std::size_t num_topics);
  // Throws ValidationError unless every entry is positive and they sum to 1.
  explicit ClusterSizeSpec(Vector proportions);

  const Vector& proportions() const { return proportions_; }
  std::size_t size() const { return proportions_.size(); }

 private:
  Vector proportions_;
};

struct RegularizerOutput {
  double loss = 0.0;
  Matrix grad_w;  // D x V
  Matrix grad_t;  // D x K
  // Set by ecr_loss only.
  std::optional<TransportPlan> transport;
};

enum class RegularizerKind { kNone, kEcr, kDkm, kDkmEntropy };

std::string_view to_string(RegularizerKind kind);
// Accepts "none", "ecr", "dkm", "dkm-entropy".
RegularizerKind parse_regularizer(std::string_view name);

RegularizerOutput ecr_loss(const Matrix& w, const Matrix& t, const ClusterSizeSpec& sizes,
                           const SinkhornConfig& cfg);
// The ECR objective and gradient for a given, fixed plan.
RegularizerOutput ecr_loss_with_plan(const Matrix& w, const Matrix& t, const Matrix& plan);

// V x K soft assignments, each row a softmax over -sqdist / tau.
Matrix dkm_assignments(const Matrix& w, const Matrix& t, double tau);
RegularizerOutput dkm_loss(const Matrix& w, const Matrix& t, double tau);
RegularizerOutput dkm_entropy_loss(const Matrix& w, const Matrix& t, double tau,
                                   double entropy_weight);

// Chain rule from dL/dC (V x K) through C_jk = ||w_j - t_k||^2, accumulated
// into grad_w (D x V) and grad_t (D x K).
void backprop_sqdist(const Matrix& w, const Matrix& t, const Matrix& grad_cost,
                     Matrix& grad_w, Matrix& grad_t);

}  // namespace ottopics

#endif  // OTTOPICS_REGULARIZERS_HPP_
