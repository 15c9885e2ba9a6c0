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

#include "ottopics/regularizers.hpp"

#include <cmath>
#include <string>

#include "ottopics/errors.hpp"

namespace ottopics {

ClusterSizeSpec ClusterSizeSpec::uniform(std::size_t num_topics) {
  if (num_topics == 0) throw ValidationError("cluster sizes: need at least one topic");
  return ClusterSizeSpec(Vector(num_topics, 1.0 / double(num_topics)));
}

ClusterSizeSpec::ClusterSizeSpec(Vector proportions) : proportions_(std::move(proportions)) {
  if (proportions_.empty()) throw ValidationError("cluster sizes: empty");
  double sum = 0.0;
  for (double s : proportions_) {
    if (!(s > 0.0)) throw ValidationError("cluster sizes: proportions must be positive");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("cluster sizes: proportions must sum to 1");
}

std::string_view to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kNone: return "none";
    case RegularizerKind::kEcr: return "ecr";
    case RegularizerKind::kDkm: return "dkm";
    case RegularizerKind::kDkmEntropy: return "dkm-entropy";
  }
  return "none";
}

RegularizerKind parse_regularizer(std::string_view name) {
  if (name == "none") return RegularizerKind::kNone;
  if (name == "ecr") return RegularizerKind::kEcr;
  if (name == "dkm") return RegularizerKind::kDkm;
  if (name == "dkm-entropy") return RegularizerKind::kDkmEntropy;
  throw ValidationError("unknown regularizer '" + std::string(name) +
                        "' (expected ecr, dkm, dkm-entropy or none)");
}

namespace {

void check_embeddings(const Matrix& w, const Matrix& t) {
  if (w.rows() != t.rows()) {
    throw ShapeError("word and topic embeddings differ in dimension (" +
                     std::to_string(w.rows()) + " vs " + std::to_string(t.rows()) + ")");
  }
  if (w.cols() == 0 || t.cols() == 0) throw ShapeError("empty embedding matrix");
}

void check_tau(double tau) {
  if (!(tau > 0.0)) throw ValidationError("temperature tau must be positive");
}

}  // namespace

void backprop_sqdist(const Matrix& w, const Matrix& t, const Matrix& grad_cost,
                     Matrix& grad_w, Matrix& grad_t) {
  const std::size_t dim = w.rows(), vocab = w.cols(), topics = t.cols();
  // dC_jk/dw_j = 2 (w_j - t_k), dC_jk/dt_k = -2 (w_j - t_k).
  for (std::size_t d = 0; d < dim; ++d) {
    const auto wr = w.row(d);
    const auto tr = t.row(d);
    auto gw = grad_w.row(d);
    auto gt = grad_t.row(d);
    for (std::size_t j = 0; j < vocab; ++j) {
      const auto g = grad_cost.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < topics; ++k) {
        const double term = 2.0 * g[k] * (wr[j] - tr[k]);
        acc += term;
        gt[k] -= term;
      }
      gw[j] += acc;
    }
  }
}

RegularizerOutput ecr_loss_with_plan(const Matrix& w, const Matrix& t, const Matrix& plan) {
  check_embeddings(w, t);
  if (plan.rows() != w.cols() || plan.cols() != t.cols()) {
    throw ShapeError("ecr: plan must be V x K");
  }
  const Matrix cost = pairwise_sqdist(w, t);
  RegularizerOutput out;
  out.loss = transport_cost(cost, plan);
  out.grad_w = Matrix(w.rows(), w.cols());
  out.grad_t = Matrix(t.rows(), t.cols());
  backprop_sqdist(w, t, plan, out.grad_w, out.grad_t);
  return out;
}

RegularizerOutput ecr_loss(const Matrix& w, const Matrix& t, const ClusterSizeSpec& sizes,
                           const SinkhornConfig& cfg) {
  check_embeddings(w, t);
  if (t.cols() < 2) throw ValidationError("ecr: need at least two topics");
  if (w.cols() < t.cols()) throw ValidationError("ecr: need at least as many words as topics");
  if (sizes.size() != t.cols()) throw ShapeError("ecr: cluster sizes must have length K");

  Matrix cost = pairwise_sqdist(w, t);
  TransportPlan plan = solve(OtProblem::with_uniform_rows(cost, sizes.proportions()), cfg);

  RegularizerOutput out;
  out.loss = transport_cost(cost, plan.plan);
  out.grad_w = Matrix(w.rows(), w.cols());
  out.grad_t = Matrix(t.rows(), t.cols());
  backprop_sqdist(w, t, plan.plan, out.grad_w, out.grad_t);
  out.transport = std::move(plan);
  return out;
}

Matrix dkm_assignments(const Matrix& w, const Matrix& t, double tau) {
  check_embeddings(w, t);
  check_tau(tau);
  Matrix p = pairwise_sqdist(w, t);
  for (std::size_t j = 0; j < p.rows(); ++j) {
    auto row = p.row(j);
    for (double& x : row) x = -x / tau;
    const Vector s = softmax(row);
    std::copy(s.begin(), s.end(), row.begin());
  }
  return p;
}

namespace {

// Shared by the two DKM variants. dL/dC_jk for
//   L = sum_k C_jk p_jk + weight * sum_k -p_jk log p_jk
// is p_jk [1 - (C_jk - cbar_j) / tau] + weight * p_jk (log p_jk - sum_k p log p) / tau.
RegularizerOutput dkm_impl(const Matrix& w, const Matrix& t, double tau, double entropy_weight) {
  check_embeddings(w, t);
  check_tau(tau);
  const Matrix cost = pairwise_sqdist(w, t);
  const std::size_t vocab = cost.rows(), topics = cost.cols();

  RegularizerOutput out;
  Matrix grad_cost(vocab, topics);
  Vector logits(topics);
  for (std::size_t j = 0; j < vocab; ++j) {
    const auto c = cost.row(j);
    for (std::size_t k = 0; k < topics; ++k) logits[k] = -c[k] / tau;
    const Vector logp = log_softmax(logits);
    double cbar = 0.0, plogp = 0.0;
    Vector p(topics);
    for (std::size_t k = 0; k < topics; ++k) {
      p[k] = std::exp(logp[k]);
      cbar += c[k] * p[k];
      plogp += p[k] * logp[k];
    }
    out.loss += cbar - entropy_weight * plogp;
    auto g = grad_cost.row(j);
    for (std::size_t k = 0; k < topics; ++k) {
      g[k] = p[k] * (1.0 - (c[k] - cbar) / tau);
      if (entropy_weight != 0.0) g[k] += entropy_weight * p[k] * (logp[k] - plogp) / tau;
    }
  }
  out.grad_w = Matrix(w.rows(), w.cols());
  out.grad_t = Matrix(t.rows(), t.cols());
  backprop_sqdist(w, t, grad_cost, out.grad_w, out.grad_t);
  return out;
}

}  // namespace

RegularizerOutput dkm_loss(const Matrix& w, const Matrix& t, double tau) {
  return dkm_impl(w, t, tau, 0.0);
}

RegularizerOutput dkm_entropy_loss(const Matrix& w, const Matrix& t, double tau,
                                   double entropy_weight) {
  if (!(entropy_weight >= 0.0)) throw ValidationError("entropy weight must be nonnegative");
  return dkm_impl(w, t, tau, entropy_weight);
}

}  // namespace ottopics
