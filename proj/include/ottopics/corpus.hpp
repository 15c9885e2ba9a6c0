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

// Text ingestion: tokenization and filtering, vocabulary construction with
// document-frequency limits, bag-of-words vectorization, and a synthetic
// corpus generator with planted topics.

#ifndef OTTOPICS_CORPUS_HPP_
#define OTTOPICS_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ottopics/numerics.hpp"

namespace ottopics {

using TokenList = std::vector<std::string>;

// The shipped English stopword list.
const std::unordered_set<std::string>& default_stopwords();

struct PreprocessConfig {
  std::size_t vocab_size = 5000;
  double max_df = 1.0;
  // Off unless set: words whose document frequency is below it are removed.
  std::optional<double> min_df;
  std::size_t min_token_len = 3;
  std::unordered_set<std::string> stopwords = default_stopwords();
  bool lowercase = true;

  void validate() const;
};

struct TokenizedCorpus {
  std::vector<TokenList> docs;
  // Position of each kept document in the raw input.
  std::vector<std::size_t> source_index;
  // Raw positions of documents that ended up with no tokens.
  std::vector<std::size_t> dropped;
};

// Lowercases (if configured), replaces ASCII punctuation with spaces, splits
// on whitespace, then drops tokens that contain a digit, are shorter than
// min_token_len code points, or are stopwords. Throws ValidationError
// ("empty corpus") if no document keeps a token.
TokenizedCorpus preprocess(std::span<const std::string> raw_docs, const PreprocessConfig& cfg);

class Vocabulary {
 public:
  // Throws ValidationError on duplicates, an empty list, a length mismatch
  // or doc_freq outside (0, 1].
  Vocabulary(std::vector<std::string> words, std::vector<double> doc_freq);
  // Vocabulary with every doc_freq set to 1 (used for files that carry only
  // the word list).
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  double doc_freq(std::size_t i) const { return doc_freq_.at(i); }
  const std::vector<double>& doc_freqs() const { return doc_freq_; }
  std::optional<std::size_t> index_of(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::vector<double> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Removes words with doc_freq > max_df (and below min_df when set), ranks the
// rest by corpus frequency (ties lexicographic) and keeps the top vocab_size.
// Index 0 is the most frequent word.
Vocabulary build_vocab(std::span<const TokenList> docs, const PreprocessConfig& cfg);

struct BowEntry {
  std::uint32_t index = 0;
  std::uint32_t count = 0;
  friend bool operator==(const BowEntry&, const BowEntry&) = default;
};

struct BowCorpus {
  std::size_t vocab_size = 0;
  // Per document, entries sorted by strictly increasing index, count >= 1.
  std::vector<std::vector<BowEntry>> rows;
  std::optional<std::vector<int>> labels;

  std::size_t num_docs() const { return rows.size(); }
  std::uint64_t doc_length(std::size_t d) const;
  std::uint64_t total_tokens() const;
  // Throws ValidationError if an invariant is violated.
  void validate() const;

  friend bool operator==(const BowCorpus&, const BowCorpus&) = default;
};

struct VectorizeResult {
  BowCorpus corpus;
  // Input positions of kept and dropped (all out-of-vocabulary) documents.
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
};

// Counts in-vocabulary tokens per document. Labels, when given, are filtered
// in lockstep with the documents. Throws ValidationError if every document
// is dropped.
VectorizeResult vectorize(std::span<const TokenList> docs, const Vocabulary& vocab,
                          std::optional<std::span<const int>> labels = std::nullopt);

struct ZipfCorpusConfig {
  std::size_t num_docs = 500;
  std::size_t vocab_size = 200;
  std::size_t num_topics = 10;
  std::size_t doc_len = 60;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 0;
  // Shared head words; 0 selects vocab_size / 10.
  std::size_t head_size = 0;
  // Probability mass each topic places on the shared head.
  double head_mass = 0.3;
  // Probability that a token comes from the document's labelled topic
  // rather than a uniformly chosen other topic.
  double dominant_weight = 0.8;

  void validate() const;
};

struct SyntheticCorpus {
  BowCorpus corpus;            // labels = dominant topic of each document
  Matrix planted_beta;         // V x K, column k is p(word | topic k)
  std::vector<std::size_t> head_words;
  // Words of each topic's block, most probable first.
  std::vector<std::vector<std::size_t>> topic_blocks;
};

// Word ids [0, head_size) form the shared head; the remaining ids are split
// into K contiguous disjoint blocks. Within the head and within each block,
// the r-th word has weight r^(-zipf_exponent). Labels are balanced across
// topics. Deterministic in the seed.
SyntheticCorpus generate_zipf_corpus(const ZipfCorpusConfig& cfg);

// ---- File formats ----------------------------------------------------------

// UTF-8 text, one document per line.
std::vector<std::string> read_lines(const std::string& path);
// One integer per line.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, std::span<const int> labels);

// "V <int> D <int>" header, then per document
// "label<TAB>idx:count idx:count ..." with label -1 when absent.
void write_bow(std::ostream& os, const BowCorpus& corpus);
BowCorpus read_bow(std::istream& is);
void write_bow_file(const std::string& path, const BowCorpus& corpus);
BowCorpus read_bow_file(const std::string& path);

// One word per line; line number is the index.
void write_vocab_file(const std::string& path, const Vocabulary& vocab);
Vocabulary read_vocab_file(const std::string& path);

}  // namespace ottopics

#endif  // OTTOPICS_CORPUS_HPP_
