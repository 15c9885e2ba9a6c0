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

#include "ottopics/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ottopics/errors.hpp"

namespace ottopics {

void TopicSet::validate(std::size_t vocab_size) const {
  const std::size_t n = words_per_topic();
  for (const auto& t : topics) {
    if (t.size() != n) throw ValidationError("topic set: lists differ in length");
    std::set<std::size_t> seen;
    for (std::size_t w : t) {
      if (w >= vocab_size) throw ValidationError("topic set: word id out of range");
      if (!seen.insert(w).second) throw ValidationError("topic set: repeated word in a topic");
    }
  }
}

TopicSet extract_topics(const Matrix& beta, std::size_t n) {
  const std::size_t vocab = beta.rows();
  if (n == 0 || n > vocab) {
    throw ValidationError("extract_topics: n must lie in [1, V] (n = " + std::to_string(n) +
                          ", V = " + std::to_string(vocab) + ")");
  }
  TopicSet out;
  std::vector<std::size_t> ids(vocab);
  for (std::size_t k = 0; k < beta.cols(); ++k) {
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::partial_sort(ids.begin(), ids.begin() + long(n), ids.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double x = beta(a, k), y = beta(b, k);
                        if (x != y) return x > y;
                        return a < b;
                      });
    std::vector<std::size_t> top(ids.begin(), ids.begin() + long(n));
    std::vector<double> w;
    for (std::size_t j : top) w.push_back(beta(j, k));
    out.topics.push_back(std::move(top));
    out.weights.push_back(std::move(w));
  }
  return out;
}

TopicSet extract_topics(const ModelState& state, std::size_t n) {
  return extract_topics(compute_beta(state.params.word_embeddings, state.params.topic_embeddings,
                                     state.config.tau),
                        n);
}

double topic_diversity(const TopicSet& topics) {
  const std::size_t total = topics.num_topics() * topics.words_per_topic();
  if (total == 0) throw ValidationError("topic_diversity: empty topic set");
  std::set<std::size_t> unique;
  for (const auto& t : topics.topics) unique.insert(t.begin(), t.end());
  return double(unique.size()) / double(total);
}

double npmi_pair(std::uint64_t docs_i, std::uint64_t docs_j, std::uint64_t docs_ij,
                 std::uint64_t num_docs) {
  constexpr double kSmoothing = 1e-12;
  if (num_docs == 0) throw ValidationError("npmi: empty reference corpus");
  if (docs_ij == 0) return -1.0;
  if (docs_ij >= num_docs) return 1.0;
  const double n = double(num_docs);
  const double pi = double(docs_i) / n, pj = double(docs_j) / n, pij = double(docs_ij) / n;
  const double value = std::log((pij + kSmoothing) / (pi * pj)) / -std::log(pij + kSmoothing);
  return std::clamp(value, -1.0, 1.0);
}

NpmiResult npmi_coherence(const TopicSet& topics, const BowCorpus& reference) {
  if (reference.num_docs() == 0) throw ValidationError("npmi: empty reference corpus");
  NpmiResult out;
  std::set<std::size_t> words;
  for (const auto& t : topics.topics) words.insert(t.begin(), t.end());

  // Boolean document occurrence for the listed words only.
  std::map<std::size_t, std::vector<std::uint32_t>> occurs;
  for (std::size_t w : words) occurs[w];
  for (std::size_t d = 0; d < reference.num_docs(); ++d) {
    for (const auto& e : reference.rows[d]) {
      auto it = occurs.find(e.index);
      if (it != occurs.end()) it->second.push_back(static_cast<std::uint32_t>(d));
    }
  }
  for (const auto& [w, docs] : occurs) {
    if (docs.empty()) out.missing_words.push_back(w);
  }

  auto co_count = [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::uint64_t n = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) {
        ++n;
        ++i;
        ++j;
      } else if (a[i] < b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    return n;
  };

  double sum = 0.0;
  for (const auto& t : topics.topics) {
    double topic_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < t.size(); ++a) {
      for (std::size_t b = a + 1; b < t.size(); ++b) {
        const auto& da = occurs[t[a]];
        const auto& db = occurs[t[b]];
        topic_sum += npmi_pair(da.size(), db.size(), co_count(da, db), reference.num_docs());
        ++pairs;
      }
    }
    const double v = pairs ? topic_sum / double(pairs) : 0.0;
    out.per_topic.push_back(v);
    sum += v;
  }
  out.mean = out.per_topic.empty() ? 0.0 : sum / double(out.per_topic.size());
  return out;
}

ClusteringResult cluster_documents(const BowCorpus& corpus, const ModelState& state) {
  if (!corpus.labels) throw ValidationError("cluster_documents: corpus has no labels");
  ClusteringResult out;
  out.labels = *corpus.labels;
  for (const auto& doc : corpus.rows) {
    const Vector theta = infer_theta(doc, state);
    out.assignments.push_back(
        std::size_t(std::max_element(theta.begin(), theta.end()) - theta.begin()));
  }
  return out;
}

namespace {

using Contingency = std::map<std::pair<std::size_t, int>, std::uint64_t>;

Contingency contingency(const ClusteringResult& r) {
  if (r.assignments.empty()) throw ValidationError("clustering metrics: empty result");
  if (r.assignments.size() != r.labels.size()) {
    throw ValidationError("clustering metrics: assignments and labels differ in length");
  }
  Contingency c;
  for (std::size_t i = 0; i < r.assignments.size(); ++i) ++c[{r.assignments[i], r.labels[i]}];
  return c;
}

double entropy_of(const std::map<long long, std::uint64_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = double(c) / n;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double purity(const ClusteringResult& result) {
  const Contingency c = contingency(result);
  std::map<std::size_t, std::uint64_t> best;
  for (const auto& [key, count] : c) best[key.first] = std::max(best[key.first], count);
  std::uint64_t total = 0;
  for (const auto& [_, v] : best) total += v;
  return double(total) / double(result.assignments.size());
}

double nmi(const ClusteringResult& result) {
  const Contingency c = contingency(result);
  const double n = double(result.assignments.size());
  std::map<long long, std::uint64_t> clusters, classes;
  for (const auto& [key, count] : c) {
    clusters[static_cast<long long>(key.first)] += count;
    classes[key.second] += count;
  }
  const double hu = entropy_of(clusters, n), hv = entropy_of(classes, n);
  double mi = 0.0;
  for (const auto& [key, count] : c) {
    const double pij = double(count) / n;
    const double pi = double(clusters[static_cast<long long>(key.first)]) / n;
    const double pj = double(classes[key.second]) / n;
    mi += pij * std::log(pij / (pi * pj));
  }
  const double denom = 0.5 * (hu + hv);
  if (denom <= 0.0) return 1.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double perplexity(const BowCorpus& corpus, const ModelState& state, std::size_t samples_per_doc,
                  std::uint64_t seed) {
  state.validate();
  if (corpus.vocab_size != state.vocab_size()) {
    throw ShapeError("perplexity: corpus vocabulary size differs from the model's");
  }
  const Matrix beta = compute_beta(state.params.word_embeddings, state.params.topic_embeddings,
                                   state.config.tau);
  const std::size_t topics = state.num_topics();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector noise(topics, 0.0);
  double nll = 0.0;
  for (const auto& doc : corpus.rows) {
    if (samples_per_doc <= 1) {
      const DocumentTerms t = document_terms(doc, state, beta, noise);
      nll += t.reconstruction + t.kl;
      continue;
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < samples_per_doc; ++s) {
      for (double& x : noise) x = normal(rng);
      const DocumentTerms t = document_terms(doc, state, beta, noise);
      acc += t.reconstruction + t.kl;
    }
    nll += acc / double(samples_per_doc);
  }
  const double tokens = double(corpus.total_tokens());
  if (!(tokens > 0.0)) throw ValidationError("perplexity: corpus has no tokens");
  return std::exp(nll / tokens);
}

double min_topic_distance(const ModelState& state) {
  const Matrix d = pairwise_sqdist(state.params.topic_embeddings, state.params.topic_embeddings);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < d.rows(); ++a)
    for (std::size_t b = a + 1; b < d.cols(); ++b) best = std::min(best, d(a, b));
  return std::sqrt(best);
}

}  // namespace ottopics
