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

#include "ottopics/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ottopics/errors.hpp"
#include "ottopics/parallel.hpp"

namespace ottopics {

// ---- Parameters ------------------------------------------------------------

EncoderParams EncoderParams::zeros(std::size_t vocab, std::size_t hidden, std::size_t topics) {
  EncoderParams p;
  p.l1_weight = Matrix(hidden, vocab);
  p.l1_bias.assign(hidden, 0.0);
  p.l2_weight = Matrix(hidden, hidden);
  p.l2_bias.assign(hidden, 0.0);
  p.mean_weight = Matrix(topics, hidden);
  p.mean_bias.assign(topics, 0.0);
  p.logvar_weight = Matrix(topics, hidden);
  p.logvar_bias.assign(topics, 0.0);
  return p;
}

EncoderParams EncoderParams::random(std::size_t vocab, std::size_t hidden, std::size_t topics,
                                    std::mt19937_64& rng) {
  EncoderParams p = zeros(vocab, hidden, topics);
  auto fill = [&rng](std::span<double> v, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(double(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& x : v) x = u(rng);
  };
  fill(p.l1_weight.data(), vocab);
  fill(p.l1_bias, vocab);
  fill(p.l2_weight.data(), hidden);
  fill(p.l2_bias, hidden);
  fill(p.mean_weight.data(), hidden);
  fill(p.mean_bias, hidden);
  fill(p.logvar_weight.data(), hidden);
  fill(p.logvar_bias, hidden);
  return p;
}

void EncoderParams::validate() const {
  const std::size_t v = vocab_size(), h = hidden_size(), k = num_topics();
  if (v == 0 || h == 0 || k == 0 || l1_bias.size() != h || l2_weight.rows() != h ||
      l2_weight.cols() != h || l2_bias.size() != h || mean_weight.cols() != h ||
      mean_bias.size() != k || logvar_weight.rows() != k || logvar_weight.cols() != h ||
      logvar_bias.size() != k) {
    throw ShapeError("encoder parameters have inconsistent shapes");
  }
}

Parameters Parameters::zeros_like(const Parameters& p) {
  Parameters z;
  z.encoder = EncoderParams::zeros(p.encoder.vocab_size(), p.encoder.hidden_size(),
                                   p.encoder.num_topics());
  z.word_embeddings = Matrix(p.word_embeddings.rows(), p.word_embeddings.cols());
  z.topic_embeddings = Matrix(p.topic_embeddings.rows(), p.topic_embeddings.cols());
  return z;
}

std::size_t Parameters::total_size() const {
  std::size_t n = 0;
  for_each([&n](std::string_view, std::span<const double> v) { n += v.size(); });
  return n;
}

bool Parameters::all_finite() const {
  bool ok = true;
  for_each([&ok](std::string_view, std::span<const double> v) {
    ok = ok && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  });
  return ok;
}

void Parameters::add_scaled(const Parameters& other, double scale) {
  std::vector<std::span<const double>> src;
  other.for_each([&src](std::string_view, std::span<const double> v) { src.push_back(v); });
  std::size_t i = 0;
  for_each([&](std::string_view name, std::span<double> v) {
    const auto s = src[i++];
    if (s.size() != v.size()) throw ShapeError("add_scaled: shape mismatch in " + std::string(name));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += scale * s[j];
  });
}

PriorParams make_prior(std::size_t num_topics, double alpha) {
  if (num_topics < 2) throw ValidationError("prior: need at least two topics");
  if (!(alpha > 0.0)) throw ValidationError("prior: alpha must be positive");
  PriorParams p;
  p.alpha = alpha;
  p.mu0.assign(num_topics, 0.0);
  p.sigma0_diag.assign(num_topics, double(num_topics - 1) / (alpha * double(num_topics)));
  return p;
}

void ModelConfig::validate() const {
  std::vector<std::string> problems;
  if (num_topics < 2) problems.push_back("num_topics must be at least 2");
  if (embedding_dim < 1) problems.push_back("embedding_dim must be positive");
  if (hidden_size < 1) problems.push_back("hidden_size must be positive");
  if (!(tau > 0.0)) problems.push_back("tau must be positive");
  if (!(lambda_ecr >= 0.0)) problems.push_back("lambda_ecr must be nonnegative");
  if (!(entropy_weight >= 0.0)) problems.push_back("entropy_weight must be nonnegative");
  if (!(alpha > 0.0)) problems.push_back("alpha must be positive");
  if (!(init_std > 0.0)) problems.push_back("init_std must be positive");
  if (sinkhorn.max_iterations == 0) problems.push_back("sinkhorn max_iterations must be positive");
  if (!(sinkhorn.stop_tolerance > 0.0)) problems.push_back("sinkhorn stop_tolerance must be positive");
  if (!(sinkhorn.epsilon > 0.0)) problems.push_back("epsilon must be positive");
  if (!problems.empty()) {
    std::string msg = "invalid model config: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw ValidationError(msg);
  }
}

void ModelState::validate() const {
  params.encoder.validate();
  const std::size_t v = vocab_size(), k = num_topics();
  if (params.encoder.vocab_size() != v || params.encoder.num_topics() != k ||
      params.topic_embeddings.rows() != embedding_dim() || prior.mu0.size() != k ||
      prior.sigma0_diag.size() != k) {
    throw ShapeError("model state: inconsistent V, K or D across members");
  }
  for (double s : prior.sigma0_diag) {
    if (!(s > 0.0)) throw ValidationError("model state: prior variances must be positive");
  }
}

ModelState init_model(std::size_t vocab_size, const ModelConfig& cfg, std::uint64_t seed,
                      const std::optional<Matrix>& pretrained) {
  cfg.validate();
  if (vocab_size < 1) throw ValidationError("init_model: empty vocabulary");
  std::mt19937_64 rng(seed);
  ModelState s;
  s.config = cfg;
  s.seed = seed;
  s.prior = make_prior(cfg.num_topics, cfg.alpha);
  s.params.encoder = EncoderParams::random(vocab_size, cfg.hidden_size, cfg.num_topics, rng);
  std::normal_distribution<double> normal(0.0, cfg.init_std);
  if (pretrained) {
    if (pretrained->rows() != cfg.embedding_dim || pretrained->cols() != vocab_size) {
      throw ShapeError("pretrained embeddings must be " + std::to_string(cfg.embedding_dim) +
                       " x " + std::to_string(vocab_size));
    }
    s.params.word_embeddings = *pretrained;
  } else {
    s.params.word_embeddings = Matrix(cfg.embedding_dim, vocab_size);
    for (double& x : s.params.word_embeddings.data()) x = normal(rng);
  }
  s.params.topic_embeddings = Matrix(cfg.embedding_dim, cfg.num_topics);
  for (double& x : s.params.topic_embeddings.data()) x = normal(rng);
  return s;
}

// ---- Forward pieces --------------------------------------------------------

namespace {

struct SparseInput {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

SparseInput from_bow(std::span<const BowEntry> doc, std::size_t vocab) {
  SparseInput s;
  for (const auto& e : doc) {
    if (e.index >= vocab) throw ShapeError("document word index out of range");
    s.index.push_back(e.index);
    s.value.push_back(double(e.count));
  }
  return s;
}

SparseInput from_dense(std::span<const double> x, std::size_t vocab) {
  if (x.size() != vocab) {
    throw ShapeError("input length " + std::to_string(x.size()) + " does not match vocabulary " +
                     std::to_string(vocab));
  }
  SparseInput s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) {
      s.index.push_back(static_cast<std::uint32_t>(j));
      s.value.push_back(x[j]);
    }
  }
  return s;
}

struct EncoderTrace {
  Vector a1, h1, a2, h2;
  Vector mu, logvar;
};

EncoderTrace encoder_forward(const SparseInput& x, const EncoderParams& enc) {
  const std::size_t hidden = enc.hidden_size(), topics = enc.num_topics();
  EncoderTrace tr;
  tr.a1 = enc.l1_bias;
  for (std::size_t h = 0; h < hidden; ++h) {
    const auto w = enc.l1_weight.row(h);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.index.size(); ++i) acc += w[x.index[i]] * x.value[i];
    tr.a1[h] += acc;
  }
  tr.h1 = softplus(tr.a1);
  tr.a2 = enc.l2_bias;
  for (std::size_t h = 0; h < hidden; ++h) {
    const auto w = enc.l2_weight.row(h);
    double acc = 0.0;
    for (std::size_t i = 0; i < hidden; ++i) acc += w[i] * tr.h1[i];
    tr.a2[h] += acc;
  }
  tr.h2 = softplus(tr.a2);
  tr.mu = enc.mean_bias;
  tr.logvar = enc.logvar_bias;
  for (std::size_t k = 0; k < topics; ++k) {
    const auto wm = enc.mean_weight.row(k);
    const auto wl = enc.logvar_weight.row(k);
    double am = 0.0, al = 0.0;
    for (std::size_t h = 0; h < hidden; ++h) {
      am += wm[h] * tr.h2[h];
      al += wl[h] * tr.h2[h];
    }
    tr.mu[k] += am;
    tr.logvar[k] += al;
  }
  return tr;
}

void check_prior(std::span<const double> mu, std::span<const double> logvar,
                 const PriorParams& prior) {
  if (mu.size() != logvar.size() || mu.size() != prior.mu0.size() ||
      prior.sigma0_diag.size() != mu.size()) {
    throw ShapeError("kl_term: length mismatch");
  }
}

Vector mix(const Matrix& beta, std::span<const double> theta) {
  if (beta.cols() != theta.size()) throw ShapeError("beta columns must match theta length");
  Vector z(beta.rows(), 0.0);
  for (std::size_t j = 0; j < beta.rows(); ++j) {
    const auto b = beta.row(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) acc += b[k] * theta[k];
    z[j] = acc;
  }
  return z;
}

}  // namespace

EncoderOutput encode(std::span<const double> x, const EncoderParams& enc) {
  enc.validate();
  EncoderTrace tr = encoder_forward(from_dense(x, enc.vocab_size()), enc);
  return {std::move(tr.mu), std::move(tr.logvar)};
}

EncoderOutput encode(std::span<const BowEntry> doc, const EncoderParams& enc) {
  enc.validate();
  EncoderTrace tr = encoder_forward(from_bow(doc, enc.vocab_size()), enc);
  return {std::move(tr.mu), std::move(tr.logvar)};
}

Vector reparameterize(std::span<const double> mu, std::span<const double> logvar,
                      std::span<const double> noise) {
  if (mu.size() != logvar.size() || mu.size() != noise.size()) {
    throw ShapeError("reparameterize: length mismatch");
  }
  Vector r(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) r[k] = mu[k] + std::exp(0.5 * logvar[k]) * noise[k];
  return softmax(r);
}

Matrix compute_beta(const Matrix& w, const Matrix& t, double tau) {
  return dkm_assignments(w, t, tau);
}

double kl_term(std::span<const double> mu, std::span<const double> logvar,
               const PriorParams& prior) {
  check_prior(mu, logvar, prior);
  double kl = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double s0 = prior.sigma0_diag[k];
    const double diff = mu[k] - prior.mu0[k];
    kl += (std::exp(logvar[k]) + diff * diff) / s0 - 1.0 + std::log(s0) - logvar[k];
  }
  return 0.5 * kl;
}

double recon_term(std::span<const double> x, const Matrix& beta, std::span<const double> theta) {
  if (x.size() != beta.rows()) throw ShapeError("recon_term: x length must equal V");
  const Vector logy = log_softmax(mix(beta, theta));
  double loss = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) loss -= x[j] * logy[j];
  }
  return loss;
}

DocumentTerms document_terms(std::span<const BowEntry> doc, const ModelState& state,
                             const Matrix& beta, std::span<const double> noise) {
  const EncoderOutput enc = encode(doc, state.params.encoder);
  const Vector theta = reparameterize(enc.mu, enc.logvar, noise);
  const Vector logy = log_softmax(mix(beta, theta));
  DocumentTerms out;
  for (const auto& e : doc) out.reconstruction -= double(e.count) * logy[e.index];
  out.kl = kl_term(enc.mu, enc.logvar, state.prior);
  return out;
}

Vector infer_theta(std::span<const BowEntry> doc, const ModelState& state) {
  const EncoderOutput enc = encode(doc, state.params.encoder);
  return softmax(enc.mu);
}

// ---- Loss and gradients ----------------------------------------------------

namespace {

constexpr std::size_t kDocsPerChunk = 16;

struct ChunkAccumulator {
  EncoderParams grad;
  Matrix grad_beta;
  double reconstruction = 0.0;
  double kl = 0.0;
};

// Adds scale * d(recon + kl)/d(params) for one document.
void accumulate_document(std::span<const BowEntry> doc, const ModelState& state,
                         const Matrix& beta, std::span<const double> noise, double scale,
                         ChunkAccumulator& acc) {
  const EncoderParams& enc = state.params.encoder;
  const PriorParams& prior = state.prior;
  const std::size_t vocab = beta.rows(), topics = beta.cols(), hidden = enc.hidden_size();
  const SparseInput x = from_bow(doc, vocab);
  const EncoderTrace tr = encoder_forward(x, enc);

  Vector sigma(topics), r(topics);
  for (std::size_t k = 0; k < topics; ++k) {
    sigma[k] = std::exp(0.5 * tr.logvar[k]);
    r[k] = tr.mu[k] + sigma[k] * noise[k];
  }
  const Vector theta = softmax(r);
  const Vector z = mix(beta, theta);
  const Vector logy = log_softmax(z);

  double tokens = 0.0;
  for (std::size_t i = 0; i < x.index.size(); ++i) {
    acc.reconstruction -= x.value[i] * logy[x.index[i]];
    tokens += x.value[i];
  }
  acc.kl += kl_term(tr.mu, tr.logvar, prior);

  // d recon / dz = n y - x.
  Vector dz(vocab);
  for (std::size_t j = 0; j < vocab; ++j) dz[j] = scale * tokens * std::exp(logy[j]);
  for (std::size_t i = 0; i < x.index.size(); ++i) dz[x.index[i]] -= scale * x.value[i];

  Vector dtheta(topics, 0.0);
  for (std::size_t j = 0; j < vocab; ++j) {
    const auto b = beta.row(j);
    auto gb = acc.grad_beta.row(j);
    for (std::size_t k = 0; k < topics; ++k) {
      gb[k] += dz[j] * theta[k];
      dtheta[k] += b[k] * dz[j];
    }
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < topics; ++k) dot += theta[k] * dtheta[k];

  Vector dmu(topics), dlv(topics);
  for (std::size_t k = 0; k < topics; ++k) {
    const double dr = theta[k] * (dtheta[k] - dot);
    const double s0 = prior.sigma0_diag[k];
    dmu[k] = dr + scale * (tr.mu[k] - prior.mu0[k]) / s0;
    dlv[k] = dr * noise[k] * 0.5 * sigma[k] + scale * 0.5 * (std::exp(tr.logvar[k]) / s0 - 1.0);
  }

  EncoderParams& g = acc.grad;
  Vector dh2(hidden, 0.0);
  for (std::size_t k = 0; k < topics; ++k) {
    g.mean_bias[k] += dmu[k];
    g.logvar_bias[k] += dlv[k];
    auto gm = g.mean_weight.row(k);
    auto gl = g.logvar_weight.row(k);
    const auto wm = enc.mean_weight.row(k);
    const auto wl = enc.logvar_weight.row(k);
    for (std::size_t h = 0; h < hidden; ++h) {
      gm[h] += dmu[k] * tr.h2[h];
      gl[h] += dlv[k] * tr.h2[h];
      dh2[h] += wm[h] * dmu[k] + wl[h] * dlv[k];
    }
  }
  Vector dh1(hidden, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    const double da2 = dh2[h] * sigmoid(tr.a2[h]);
    g.l2_bias[h] += da2;
    auto gw = g.l2_weight.row(h);
    const auto w = enc.l2_weight.row(h);
    for (std::size_t i = 0; i < hidden; ++i) {
      gw[i] += da2 * tr.h1[i];
      dh1[i] += w[i] * da2;
    }
  }
  for (std::size_t h = 0; h < hidden; ++h) {
    const double da1 = dh1[h] * sigmoid(tr.a1[h]);
    g.l1_bias[h] += da1;
    auto gw = g.l1_weight.row(h);
    for (std::size_t i = 0; i < x.index.size(); ++i) gw[x.index[i]] += da1 * x.value[i];
  }
}

void add_into(EncoderParams& dst, const EncoderParams& src) {
  auto add = [](std::span<double> d, std::span<const double> s) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
  };
  add(dst.l1_weight.data(), src.l1_weight.data());
  add(dst.l1_bias, src.l1_bias);
  add(dst.l2_weight.data(), src.l2_weight.data());
  add(dst.l2_bias, src.l2_bias);
  add(dst.mean_weight.data(), src.mean_weight.data());
  add(dst.mean_bias, src.mean_bias);
  add(dst.logvar_weight.data(), src.logvar_weight.data());
  add(dst.logvar_bias, src.logvar_bias);
}

}  // namespace

LossResult total_loss(const BowCorpus& corpus, std::span<const std::size_t> batch,
                      const ModelState& state, const Matrix& noise, const Matrix* frozen_plan) {
  state.validate();
  if (batch.empty()) throw ValidationError("total_loss: empty batch");
  if (corpus.vocab_size != state.vocab_size()) {
    throw ShapeError("total_loss: corpus vocabulary size differs from the model's");
  }
  const std::size_t topics = state.num_topics(), vocab = state.vocab_size();
  if (noise.rows() != batch.size() || noise.cols() != topics) {
    throw ShapeError("total_loss: noise must be batch_size x K");
  }
  for (std::size_t d : batch) {
    if (d >= corpus.num_docs()) throw ShapeError("total_loss: document id out of range");
  }
  const ModelConfig& cfg = state.config;
  const Parameters& params = state.params;
  const Matrix beta = compute_beta(params.word_embeddings, params.topic_embeddings, cfg.tau);
  const double scale = 1.0 / double(batch.size());

  // Fixed chunking keeps the summation order independent of the thread count.
  const std::size_t num_chunks = (batch.size() + kDocsPerChunk - 1) / kDocsPerChunk;
  std::vector<ChunkAccumulator> chunks(num_chunks);
  parallel_for(num_chunks, [&](std::size_t c) {
    ChunkAccumulator& acc = chunks[c];
    acc.grad = EncoderParams::zeros(vocab, params.encoder.hidden_size(), topics);
    acc.grad_beta = Matrix(vocab, topics);
    const std::size_t end = std::min(batch.size(), (c + 1) * kDocsPerChunk);
    for (std::size_t i = c * kDocsPerChunk; i < end; ++i) {
      accumulate_document(corpus.rows[batch[i]], state, beta, noise.row(i), scale, acc);
    }
  });

  LossResult out;
  out.grads = Parameters::zeros_like(params);
  Matrix grad_beta(vocab, topics);
  for (const auto& acc : chunks) {
    add_into(out.grads.encoder, acc.grad);
    for (std::size_t i = 0; i < grad_beta.size(); ++i) grad_beta.data()[i] += acc.grad_beta.data()[i];
    out.reconstruction += acc.reconstruction;
    out.kl += acc.kl;
  }
  out.reconstruction *= scale;
  out.kl *= scale;
  out.topic_model = out.reconstruction + out.kl;

  // Through beta = softmax_k(-C / tau).
  Matrix grad_cost(vocab, topics);
  for (std::size_t j = 0; j < vocab; ++j) {
    const auto b = beta.row(j);
    const auto gb = grad_beta.row(j);
    double dot = 0.0;
    for (std::size_t k = 0; k < topics; ++k) dot += b[k] * gb[k];
    auto gc = grad_cost.row(j);
    for (std::size_t k = 0; k < topics; ++k) gc[k] = -b[k] * (gb[k] - dot) / cfg.tau;
  }
  backprop_sqdist(params.word_embeddings, params.topic_embeddings, grad_cost,
                  out.grads.word_embeddings, out.grads.topic_embeddings);

  out.total = out.topic_model;
  if (cfg.lambda_ecr > 0.0 && cfg.regularizer != RegularizerKind::kNone) {
    const Matrix& w = params.word_embeddings;
    const Matrix& t = params.topic_embeddings;
    RegularizerOutput reg = [&]() -> RegularizerOutput {
      switch (cfg.regularizer) {
        case RegularizerKind::kEcr:
          return frozen_plan ? ecr_loss_with_plan(w, t, *frozen_plan)
                             : ecr_loss(w, t, ClusterSizeSpec::uniform(topics), cfg.sinkhorn);
        case RegularizerKind::kDkm:
          return dkm_loss(w, t, cfg.tau);
        case RegularizerKind::kDkmEntropy:
          return dkm_entropy_loss(w, t, cfg.tau, cfg.entropy_weight);
        case RegularizerKind::kNone:
          break;
      }
      return {};
    }();
    out.regularizer_evaluated = true;
    out.regularizer = reg.loss;
    out.transport = std::move(reg.transport);
    out.total += cfg.lambda_ecr * reg.loss;
    auto add = [&](Matrix& dst, const Matrix& src) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += cfg.lambda_ecr * src.data()[i];
    };
    add(out.grads.word_embeddings, reg.grad_w);
    add(out.grads.topic_embeddings, reg.grad_t);
  }
  return out;
}

LossResult total_loss(const BowCorpus& corpus, const ModelState& state, const Matrix& noise,
                      const Matrix* frozen_plan) {
  std::vector<std::size_t> all(corpus.num_docs());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return total_loss(corpus, all, state, noise, frozen_plan);
}

}  // namespace ottopics
