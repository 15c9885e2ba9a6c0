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

// The embedding-clustering topic model.
//
// A document's counts x go through a two-layer softplus MLP whose last hidden
// layer feeds a mean head and a log-variance head. A latent r is sampled as
// mu + exp(logvar / 2) * noise, and theta = softmax(r) is the document's topic
// mixture. Topic-word weights come from embedding distances,
//
//   beta_jk = softmax_k(-||w_j - t_k||^2 / tau),
//
// and the reconstruction is softmax(beta theta) over the vocabulary. The loss
// per batch is the mean of reconstruction cross-entropy plus KL to a
// logistic-normal prior, plus lambda times a clustering regularizer on (W, T).
// Every gradient is written out by hand.

#ifndef OTTOPICS_MODEL_HPP_
#define OTTOPICS_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "ottopics/corpus.hpp"
#include "ottopics/numerics.hpp"
#include "ottopics/regularizers.hpp"
#include "ottopics/sinkhorn.hpp"

namespace ottopics {

struct EncoderParams {
  Matrix l1_weight;      // H x V
  Vector l1_bias;        // H
  Matrix l2_weight;      // H x H
  Vector l2_bias;        // H
  Matrix mean_weight;    // K x H
  Vector mean_bias;      // K
  Matrix logvar_weight;  // K x H
  Vector logvar_bias;    // K

  static EncoderParams zeros(std::size_t vocab, std::size_t hidden, std::size_t topics);
  // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static EncoderParams random(std::size_t vocab, std::size_t hidden, std::size_t topics,
                              std::mt19937_64& rng);

  std::size_t vocab_size() const { return l1_weight.cols(); }
  std::size_t hidden_size() const { return l1_weight.rows(); }
  std::size_t num_topics() const { return mean_weight.rows(); }
  void validate() const;
};

// Logistic-normal prior approximating a symmetric Dirichlet(alpha).
struct PriorParams {
  Vector mu0;
  Vector sigma0_diag;
  double alpha = 1.0;
};

// mu0 = 0, sigma0_kk = (K - 1) / (alpha K).
PriorParams make_prior(std::size_t num_topics, double alpha);

struct ModelConfig {
  std::size_t num_topics = 50;
  std::size_t embedding_dim = 200;
  std::size_t hidden_size = 200;
  double tau = 1.0;
  double lambda_ecr = 100.0;
  RegularizerKind regularizer = RegularizerKind::kEcr;
  double entropy_weight = 1.0;
  double alpha = 1.0;
  double init_std = 0.02;
  SinkhornConfig sinkhorn;

  // Throws ValidationError listing every violated constraint.
  void validate() const;
};

// Everything that receives a gradient step.
struct Parameters {
  EncoderParams encoder;
  Matrix word_embeddings;   // W, D x V
  Matrix topic_embeddings;  // T, D x K

  static Parameters zeros_like(const Parameters& p);

  // Visits every tensor as (name, flat data) in a fixed order.
  template <typename F>
  void for_each(F&& f) {
    f(std::string_view("encoder.l1_weight"), encoder.l1_weight.data());
    f(std::string_view("encoder.l1_bias"), std::span<double>(encoder.l1_bias));
    f(std::string_view("encoder.l2_weight"), encoder.l2_weight.data());
    f(std::string_view("encoder.l2_bias"), std::span<double>(encoder.l2_bias));
    f(std::string_view("encoder.mean_weight"), encoder.mean_weight.data());
    f(std::string_view("encoder.mean_bias"), std::span<double>(encoder.mean_bias));
    f(std::string_view("encoder.logvar_weight"), encoder.logvar_weight.data());
    f(std::string_view("encoder.logvar_bias"), std::span<double>(encoder.logvar_bias));
    f(std::string_view("word_embeddings"), word_embeddings.data());
    f(std::string_view("topic_embeddings"), topic_embeddings.data());
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<Parameters*>(this)->for_each(
        [&](std::string_view name, std::span<double> v) { f(name, std::span<const double>(v)); });
  }

  std::size_t total_size() const;
  bool all_finite() const;
  // this += scale * other.
  void add_scaled(const Parameters& other, double scale);
};

struct ModelState {
  Parameters params;
  PriorParams prior;
  ModelConfig config;
  std::uint64_t seed = 0;

  std::size_t vocab_size() const { return params.word_embeddings.cols(); }
  std::size_t num_topics() const { return params.topic_embeddings.cols(); }
  std::size_t embedding_dim() const { return params.word_embeddings.rows(); }
  void validate() const;
};

// Fresh state. W comes from `pretrained` (D x V) when given, otherwise
// N(0, init_std); T is N(0, init_std); the encoder uses EncoderParams::random.
ModelState init_model(std::size_t vocab_size, const ModelConfig& cfg, std::uint64_t seed,
                      const std::optional<Matrix>& pretrained = std::nullopt);

struct EncoderOutput {
  Vector mu;
  Vector logvar;
};

EncoderOutput encode(std::span<const double> x, const EncoderParams& enc);
EncoderOutput encode(std::span<const BowEntry> doc, const EncoderParams& enc);

// theta = softmax(mu + exp(logvar / 2) * noise).
Vector reparameterize(std::span<const double> mu, std::span<const double> logvar,
                      std::span<const double> noise);

// V x K; each row sums to one.
Matrix compute_beta(const Matrix& w, const Matrix& t, double tau);

// KL(N(mu, diag(exp(logvar))) || N(mu0, diag(sigma0))).
double kl_term(std::span<const double> mu, std::span<const double> logvar,
               const PriorParams& prior);

// -sum_j x_j log softmax(beta theta)_j.
double recon_term(std::span<const double> x, const Matrix& beta, std::span<const double> theta);

struct LossResult {
  double total = 0.0;
  double topic_model = 0.0;  // batch mean of reconstruction + KL
  double reconstruction = 0.0;
  double kl = 0.0;
  double regularizer = 0.0;  // unweighted
  // False when lambda_ecr == 0 or no regularizer is configured; nothing about
  // the regularizer (including any Sinkhorn solve) was computed then.
  bool regularizer_evaluated = false;
  std::optional<TransportPlan> transport;
  Parameters grads;
};

// Loss and gradients for the documents `batch` of `corpus`, with noise row i
// used for batch[i]. When `frozen_plan` is given it replaces the Sinkhorn
// solve (gradient checks use this to hold the plan fixed across
// perturbations).
LossResult total_loss(const BowCorpus& corpus, std::span<const std::size_t> batch,
                      const ModelState& state, const Matrix& noise,
                      const Matrix* frozen_plan = nullptr);
// All documents of `corpus` form the batch.
LossResult total_loss(const BowCorpus& corpus, const ModelState& state, const Matrix& noise,
                      const Matrix* frozen_plan = nullptr);

// Reconstruction and KL of one document under given noise (no gradients).
struct DocumentTerms {
  double reconstruction = 0.0;
  double kl = 0.0;
};
DocumentTerms document_terms(std::span<const BowEntry> doc, const ModelState& state,
                             const Matrix& beta, std::span<const double> noise);

// Doc-topic mixture with zero noise.
Vector infer_theta(std::span<const BowEntry> doc, const ModelState& state);

}  // namespace ottopics

#endif  // OTTOPICS_MODEL_HPP_
