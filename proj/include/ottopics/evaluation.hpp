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

// Topic quality (diversity, NPMI coherence), document clustering quality
// (purity, NMI) and ELBO perplexity.

#ifndef OTTOPICS_EVALUATION_HPP_
#define OTTOPICS_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ottopics/corpus.hpp"
#include "ottopics/model.hpp"

namespace ottopics {

// K lists of top-n word ids, each with n distinct entries.
struct TopicSet {
  std::vector<std::vector<std::size_t>> topics;
  // Optional beta weight of each listed word, parallel to `topics`.
  std::vector<std::vector<double>> weights;

  std::size_t num_topics() const { return topics.size(); }
  std::size_t words_per_topic() const { return topics.empty() ? 0 : topics.front().size(); }
  // Throws ValidationError on ragged lists, repeats, or ids >= vocab_size.
  void validate(std::size_t vocab_size) const;
};

// Top-n words of each beta column (V x K), ties broken by ascending word id.
TopicSet extract_topics(const Matrix& beta, std::size_t n);
TopicSet extract_topics(const ModelState& state, std::size_t n = 15);

// |unique words| / (K n).
double topic_diversity(const TopicSet& topics);

struct NpmiResult {
  double mean = 0.0;               // mean over topics
  std::vector<double> per_topic;   // mean pairwise NPMI of each topic
  // Listed words that never occur in the reference corpus.
  std::vector<std::size_t> missing_words;
};

// Pairwise NPMI with document co-occurrence probabilities, averaged over the
// pairs of each topic and then over topics. Pairs that never co-occur score
// -1; a pair present in every document scores 1.
double npmi_pair(std::uint64_t docs_i, std::uint64_t docs_j, std::uint64_t docs_ij,
                 std::uint64_t num_docs);
NpmiResult npmi_coherence(const TopicSet& topics, const BowCorpus& reference);

struct ClusteringResult {
  std::vector<std::size_t> assignments;
  std::vector<int> labels;
};

// Assignments = argmax theta (zero-noise encoding) per document.
ClusteringResult cluster_documents(const BowCorpus& corpus, const ModelState& state);

double purity(const ClusteringResult& result);
// Mutual information over the arithmetic mean of the two entropies; 1 when
// both partitions are trivial.
double nmi(const ClusteringResult& result);

// exp(sum of per-document (reconstruction + KL) / total tokens). With
// samples_per_doc <= 1 the encoding is deterministic (zero noise); otherwise
// the per-document terms are averaged over that many seeded noise draws.
double perplexity(const BowCorpus& corpus, const ModelState& state,
                  std::size_t samples_per_doc = 1, std::uint64_t seed = 0);

// Smallest Euclidean distance between two distinct topic embeddings.
double min_topic_distance(const ModelState& state);

}  // namespace ottopics

#endif  // OTTOPICS_EVALUATION_HPP_
