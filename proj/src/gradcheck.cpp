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

#include "ottopics/gradcheck.hpp"

#include <algorithm>
#include <random>

#include "ottopics/model.hpp"
#include "ottopics/numerics.hpp"
#include "ottopics/regularizers.hpp"

namespace ottopics {

bool GradCheckReport::passed() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

std::vector<std::string> GradCheckReport::losses() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (std::find(out.begin(), out.end(), e.loss) == out.end()) out.push_back(e.loss);
  }
  return out;
}

double GradCheckReport::max_error(const std::string& loss) const {
  double m = 0.0;
  for (const auto& e : entries) {
    if (e.loss == loss) m = std::max(m, e.relative_error);
  }
  return m;
}

namespace {

constexpr std::size_t kDim = 4, kVocab = 12, kTopics = 3, kHidden = 5, kDocs = 2;

struct Group {
  std::string name;
  std::size_t offset;
  std::size_t size;
};

Vector flatten(const Parameters& p, std::vector<Group>* groups) {
  Vector flat;
  p.for_each([&](std::string_view name, std::span<const double> v) {
    if (groups) groups->push_back({std::string(name), flat.size(), v.size()});
    flat.insert(flat.end(), v.begin(), v.end());
  });
  return flat;
}

void unflatten(std::span<const double> flat, Parameters& p) {
  std::size_t off = 0;
  p.for_each([&](std::string_view, std::span<double> v) {
    std::copy(flat.begin() + long(off), flat.begin() + long(off + v.size()), v.begin());
    off += v.size();
  });
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = n(rng);
  return m;
}

class Checker {
 public:
  Checker(const GradCheckOptions& opt, GradCheckReport& report) : opt_(opt), report_(report) {}

  // Compares per group and records one entry per (group, point).
  void compare(const std::string& loss, std::size_t point, const ScalarFunction& f,
               const Vector& at, Vector analytic, const std::vector<Group>& groups) {
    if (loss == opt_.perturb_loss) {
      for (double& g : analytic) g *= 1.01;
    }
    const Vector numeric = finite_diff_grad(f, at, opt_.step);
    for (const auto& g : groups) {
      std::span<const double> a(analytic.data() + g.offset, g.size);
      std::span<const double> n(numeric.data() + g.offset, g.size);
      const double err = relative_error(a, n);
      report_.entries.push_back({loss, g.name, point, err, err < opt_.tolerance});
    }
  }

 private:
  const GradCheckOptions& opt_;
  GradCheckReport& report_;
};

// Packs (W, T) into one vector for the regularizer checks.
Vector pack(const Matrix& w, const Matrix& t) {
  Vector v(w.data().begin(), w.data().end());
  v.insert(v.end(), t.data().begin(), t.data().end());
  return v;
}

std::pair<Matrix, Matrix> unpack(std::span<const double> v) {
  Matrix w(kDim, kVocab, Vector(v.begin(), v.begin() + kDim * kVocab));
  Matrix t(kDim, kTopics, Vector(v.begin() + kDim * kVocab, v.end()));
  return {std::move(w), std::move(t)};
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& options) {
  GradCheckReport report;
  report.tolerance = options.tolerance;
  Checker checker(options, report);
  std::mt19937_64 rng(options.seed);
  const std::vector<Group> wt_groups = {{"word_embeddings", 0, kDim * kVocab},
                                        {"topic_embeddings", kDim * kVocab, kDim * kTopics}};
  const double tau = 1.0, entropy_weight = 1.0;
  SinkhornConfig sinkhorn;

  // Regularizers on (W, T).
  for (std::size_t point = 0; point < options.points; ++point) {
    const Matrix w = random_matrix(kDim, kVocab, 1.0, rng);
    const Matrix t = random_matrix(kDim, kTopics, 1.0, rng);
    const Vector at = pack(w, t);

    const RegularizerOutput dkm = dkm_loss(w, t, tau);
    checker.compare(
        "dkm", point,
        [&](std::span<const double> v) {
          auto [pw, pt] = unpack(v);
          return dkm_loss(pw, pt, tau).loss;
        },
        at, pack(dkm.grad_w, dkm.grad_t), wt_groups);

    // Entropy term alone: difference of the two DKM variants.
    const RegularizerOutput dkme = dkm_entropy_loss(w, t, tau, entropy_weight);
    Vector ent_grad = pack(dkme.grad_w, dkme.grad_t);
    const Vector base_grad = pack(dkm.grad_w, dkm.grad_t);
    for (std::size_t i = 0; i < ent_grad.size(); ++i) ent_grad[i] -= base_grad[i];
    checker.compare(
        "dkm-entropy", point,
        [&](std::span<const double> v) {
          auto [pw, pt] = unpack(v);
          return dkm_entropy_loss(pw, pt, tau, entropy_weight).loss - dkm_loss(pw, pt, tau).loss;
        },
        at, std::move(ent_grad), wt_groups);

    const RegularizerOutput ecr = ecr_loss(w, t, ClusterSizeSpec::uniform(kTopics), sinkhorn);
    const Matrix plan = ecr.transport->plan;
    checker.compare(
        "ecr", point,
        [&](std::span<const double> v) {
          auto [pw, pt] = unpack(v);
          return ecr_loss_with_plan(pw, pt, plan).loss;
        },
        at, pack(ecr.grad_w, ecr.grad_t), wt_groups);
  }

  // Full model, with and without the ECR term.
  for (std::size_t point = 0; point < options.points; ++point) {
    ModelConfig cfg;
    cfg.num_topics = kTopics;
    cfg.embedding_dim = kDim;
    cfg.hidden_size = kHidden;
    cfg.tau = tau;
    cfg.init_std = 1.0;
    ModelState state = init_model(kVocab, cfg, rng());

    BowCorpus corpus;
    corpus.vocab_size = kVocab;
    std::uniform_int_distribution<std::uint32_t> count(1, 4);
    std::bernoulli_distribution present(0.5);
    for (std::size_t d = 0; d < kDocs; ++d) {
      std::vector<BowEntry> row;
      for (std::uint32_t j = 0; j < kVocab; ++j) {
        if (present(rng) || (j == kVocab - 1 && row.empty())) row.push_back({j, count(rng)});
      }
      corpus.rows.push_back(std::move(row));
    }
    const Matrix noise = random_matrix(kDocs, kTopics, 1.0, rng);

    std::vector<Group> groups;
    const Vector at = flatten(state.params, &groups);
    for (const bool with_ecr : {false, true}) {
      ModelState s = state;
      s.config.regularizer = with_ecr ? RegularizerKind::kEcr : RegularizerKind::kNone;
      s.config.lambda_ecr = with_ecr ? 10.0 : 0.0;
      const LossResult base = total_loss(corpus, s, noise);
      const Matrix plan = with_ecr ? base.transport->plan : Matrix();
      const Matrix* frozen = with_ecr ? &plan : nullptr;
      checker.compare(
          with_ecr ? "total" : "topic-model", point,
          [&](std::span<const double> v) {
            ModelState probe = s;
            unflatten(v, probe.params);
            return total_loss(corpus, probe, noise, frozen).total;
          },
          at, flatten(base.grads, nullptr), groups);
    }
  }
  return report;
}

}  // namespace ottopics
