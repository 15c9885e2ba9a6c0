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

#include "ottopics/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ottopics/errors.hpp"

namespace ottopics {

void PreprocessConfig::validate() const {
  if (!(max_df > 0.0 && max_df <= 1.0)) throw ValidationError("max_df must lie in (0, 1]");
  if (min_df && !(*min_df >= 0.0 && *min_df <= max_df)) {
    throw ValidationError("min_df must lie in [0, max_df]");
  }
  if (min_token_len < 1) throw ValidationError("min_token_len must be at least 1");
  if (vocab_size < 2) throw ValidationError("vocab_size must be at least 2");
}

namespace {

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }
bool is_ascii_space(unsigned char c) { return c < 128 && std::isspace(c); }

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

TokenList tokenize(std::string_view raw, const PreprocessConfig& cfg) {
  std::string text(raw);
  for (char& ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ascii_punct(c)) {
      ch = ' ';
    } else if (cfg.lowercase && c < 128) {
      ch = static_cast<char>(std::tolower(c));
    }
  }
  TokenList out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string_view tok(text.data() + i, j - i);
      const bool has_digit =
          std::any_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
      if (!has_digit && utf8_length(tok) >= cfg.min_token_len &&
          !cfg.stopwords.contains(std::string(tok))) {
        out.emplace_back(tok);
      }
    }
    i = j;
  }
  return out;
}

}  // namespace

TokenizedCorpus preprocess(std::span<const std::string> raw_docs, const PreprocessConfig& cfg) {
  cfg.validate();
  if (raw_docs.empty()) throw ValidationError("preprocess: no input documents");
  TokenizedCorpus out;
  for (std::size_t d = 0; d < raw_docs.size(); ++d) {
    TokenList tokens = tokenize(raw_docs[d], cfg);
    if (tokens.empty()) {
      out.dropped.push_back(d);
      continue;
    }
    out.docs.push_back(std::move(tokens));
    out.source_index.push_back(d);
  }
  if (out.docs.empty()) throw ValidationError("empty corpus: every document is empty after filtering");
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<double> doc_freq)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)) {
  if (words_.empty()) throw ValidationError("empty vocabulary");
  if (doc_freq_.size() != words_.size()) {
    throw ValidationError("vocabulary: doc_freq length differs from word count");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!(doc_freq_[i] > 0.0 && doc_freq_[i] <= 1.0)) {
      throw ValidationError("vocabulary: doc_freq of '" + words_[i] + "' outside (0, 1]");
    }
    if (!index_.emplace(words_[i], i).second) {
      throw ValidationError("vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::vector<double> df(words.size(), 1.0);
  return Vocabulary(std::move(words), std::move(df));
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(std::span<const TokenList> docs, const PreprocessConfig& cfg) {
  cfg.validate();
  if (docs.empty()) throw ValidationError("build_vocab: no documents");
  struct Stats {
    std::uint64_t freq = 0;
    std::uint64_t df = 0;
    std::size_t last_doc = SIZE_MAX;
  };
  std::unordered_map<std::string, Stats> stats;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d]) {
      Stats& s = stats[tok];
      ++s.freq;
      if (s.last_doc != d) {
        ++s.df;
        s.last_doc = d;
      }
    }
  }
  const double n = static_cast<double>(docs.size());
  struct Candidate {
    const std::string* word;
    std::uint64_t freq;
    double df;
  };
  std::vector<Candidate> kept;
  for (const auto& [word, s] : stats) {
    const double df = double(s.df) / n;
    if (df > cfg.max_df) continue;
    if (cfg.min_df && df < *cfg.min_df) continue;
    kept.push_back({&word, s.freq, df});
  }
  if (kept.empty()) throw ValidationError("empty vocabulary: no word survives document-frequency filtering");
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return *a.word < *b.word;
  });
  if (kept.size() > cfg.vocab_size) kept.resize(cfg.vocab_size);
  std::vector<std::string> words;
  std::vector<double> dfs;
  for (const auto& c : kept) {
    words.push_back(*c.word);
    dfs.push_back(c.df);
  }
  return Vocabulary(std::move(words), std::move(dfs));
}

std::uint64_t BowCorpus::doc_length(std::size_t d) const {
  std::uint64_t n = 0;
  for (const auto& e : rows.at(d)) n += e.count;
  return n;
}

std::uint64_t BowCorpus::total_tokens() const {
  std::uint64_t n = 0;
  for (std::size_t d = 0; d < rows.size(); ++d) n += doc_length(d);
  return n;
}

void BowCorpus::validate() const {
  if (vocab_size == 0) throw ValidationError("bow corpus: vocab_size must be positive");
  if (labels && labels->size() != rows.size()) {
    throw ValidationError("bow corpus: label count differs from document count");
  }
  for (std::size_t d = 0; d < rows.size(); ++d) {
    const auto& row = rows[d];
    if (row.empty()) throw ValidationError("bow corpus: document " + std::to_string(d) + " is empty");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].index >= vocab_size || row[i].count == 0 ||
          (i > 0 && row[i].index <= row[i - 1].index)) {
        throw ValidationError("bow corpus: malformed entries in document " + std::to_string(d));
      }
    }
  }
}

VectorizeResult vectorize(std::span<const TokenList> docs, const Vocabulary& vocab,
                          std::optional<std::span<const int>> labels) {
  if (labels && labels->size() != docs.size()) {
    throw ValidationError("vectorize: label count differs from document count");
  }
  VectorizeResult out;
  out.corpus.vocab_size = vocab.size();
  if (labels) out.corpus.labels.emplace();
  std::map<std::uint32_t, std::uint32_t> counts;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    counts.clear();
    for (const auto& tok : docs[d]) {
      if (auto idx = vocab.index_of(tok)) ++counts[static_cast<std::uint32_t>(*idx)];
    }
    if (counts.empty()) {
      out.dropped.push_back(d);
      continue;
    }
    std::vector<BowEntry> row;
    row.reserve(counts.size());
    for (const auto& [idx, c] : counts) row.push_back({idx, c});
    out.corpus.rows.push_back(std::move(row));
    out.kept.push_back(d);
    if (labels) out.corpus.labels->push_back((*labels)[d]);
  }
  if (out.corpus.rows.empty()) throw ValidationError("empty corpus: no document has in-vocabulary tokens");
  return out;
}

// ---- Synthetic corpus ------------------------------------------------------

void ZipfCorpusConfig::validate() const {
  if (num_topics < 2) throw ValidationError("synthetic corpus: num_topics must be at least 2");
  if (vocab_size < 10 * num_topics) {
    throw ValidationError("synthetic corpus: vocab_size must be at least 10 * num_topics");
  }
  if (num_docs == 0) throw ValidationError("synthetic corpus: num_docs must be positive");
  if (doc_len == 0) throw ValidationError("synthetic corpus: doc_len must be positive");
  if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent)) {
    throw ValidationError("synthetic corpus: zipf_exponent must be finite and nonnegative");
  }
  const std::size_t head = head_size ? head_size : vocab_size / 10;
  if (head + num_topics > vocab_size) {
    throw ValidationError("synthetic corpus: head leaves no room for topic blocks");
  }
  if (!(head_mass >= 0.0 && head_mass < 1.0)) throw ValidationError("synthetic corpus: head_mass must lie in [0, 1)");
  if (!(dominant_weight >= 0.0 && dominant_weight <= 1.0)) {
    throw ValidationError("synthetic corpus: dominant_weight must lie in [0, 1]");
  }
}

namespace {

Vector zipf_weights(std::size_t n, double exponent) {
  Vector w(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    w[r] = std::pow(double(r + 1), -exponent);
    total += w[r];
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

SyntheticCorpus generate_zipf_corpus(const ZipfCorpusConfig& cfg) {
  cfg.validate();
  const std::size_t vocab = cfg.vocab_size, topics = cfg.num_topics;
  const std::size_t head = cfg.head_size ? cfg.head_size : vocab / 10;

  SyntheticCorpus out;
  for (std::size_t j = 0; j < head; ++j) out.head_words.push_back(j);
  const std::size_t rest = vocab - head;
  std::size_t next = head;
  for (std::size_t k = 0; k < topics; ++k) {
    const std::size_t len = rest / topics + (k < rest % topics ? 1 : 0);
    std::vector<std::size_t> block(len);
    for (std::size_t i = 0; i < len; ++i) block[i] = next++;
    out.topic_blocks.push_back(std::move(block));
  }

  out.planted_beta = Matrix(vocab, topics);
  const Vector head_w = zipf_weights(head, cfg.zipf_exponent);
  for (std::size_t k = 0; k < topics; ++k) {
    const auto& block = out.topic_blocks[k];
    const Vector block_w = zipf_weights(block.size(), cfg.zipf_exponent);
    for (std::size_t i = 0; i < head; ++i) out.planted_beta(i, k) = cfg.head_mass * head_w[i];
    for (std::size_t i = 0; i < block.size(); ++i) {
      out.planted_beta(block[i], k) = (1.0 - cfg.head_mass) * block_w[i];
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> labels(cfg.num_docs);
  for (std::size_t d = 0; d < cfg.num_docs; ++d) labels[d] = static_cast<int>(d % topics);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::discrete_distribution<std::size_t>> word_dists;
  for (std::size_t k = 0; k < topics; ++k) {
    const Vector col = out.planted_beta.col(k);
    word_dists.emplace_back(col.begin(), col.end());
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> other(0, topics - 2);

  out.corpus.vocab_size = vocab;
  out.corpus.rows.reserve(cfg.num_docs);
  std::vector<std::uint32_t> counts(vocab);
  for (std::size_t d = 0; d < cfg.num_docs; ++d) {
    std::fill(counts.begin(), counts.end(), 0);
    const auto label = static_cast<std::size_t>(labels[d]);
    for (std::size_t n = 0; n < cfg.doc_len; ++n) {
      std::size_t topic = label;
      if (unit(rng) >= cfg.dominant_weight) {
        topic = other(rng);
        if (topic >= label) ++topic;
      }
      ++counts[word_dists[topic](rng)];
    }
    std::vector<BowEntry> row;
    for (std::size_t j = 0; j < vocab; ++j) {
      if (counts[j]) row.push_back({static_cast<std::uint32_t>(j), counts[j]});
    }
    out.corpus.rows.push_back(std::move(row));
  }
  out.corpus.labels = std::move(labels);
  return out;
}

// ---- File formats ----------------------------------------------------------

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<int> read_labels(const std::string& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    int v = 0;
    if (!parse_number(line, v)) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected an integer label");
    }
    labels.push_back(v);
  }
  return labels;
}

void write_labels(const std::string& path, std::span<const int> labels) {
  auto out = open_out(path);
  for (int v : labels) out << v << '\n';
}

void write_bow(std::ostream& os, const BowCorpus& corpus) {
  os << "V " << corpus.vocab_size << " D " << corpus.num_docs() << '\n';
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    os << (corpus.labels ? (*corpus.labels)[d] : -1) << '\t';
    bool first = true;
    for (const auto& e : corpus.rows[d]) {
      if (!first) os << ' ';
      first = false;
      os << e.index << ':' << e.count;
    }
    os << '\n';
  }
}

BowCorpus read_bow(std::istream& is) {
  std::string line;
  std::size_t lineno = 1;
  auto fail = [&](const std::string& msg) -> IoError {
    return IoError("bow line " + std::to_string(lineno) + ": " + msg);
  };
  if (!std::getline(is, line)) throw fail("missing header");
  strip_cr(line);
  BowCorpus corpus;
  std::size_t num_docs = 0;
  {
    std::istringstream hs(line);
    std::string v_tag, d_tag, extra;
    if (!(hs >> v_tag >> corpus.vocab_size >> d_tag >> num_docs) || v_tag != "V" ||
        d_tag != "D" || (hs >> extra)) {
      throw fail("header must be 'V <int> D <int>'");
    }
  }
  std::vector<int> labels;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw fail("missing TAB after label");
    int label = 0;
    if (!parse_number(std::string_view(line).substr(0, tab), label)) throw fail("bad label");
    labels.push_back(label);
    std::vector<BowEntry> row;
    std::istringstream es(line.substr(tab + 1));
    std::string item;
    while (es >> item) {
      const auto colon = item.find(':');
      BowEntry e;
      if (colon == std::string::npos ||
          !parse_number(std::string_view(item).substr(0, colon), e.index) ||
          !parse_number(std::string_view(item).substr(colon + 1), e.count)) {
        throw fail("bad entry '" + item + "'");
      }
      if (e.index >= corpus.vocab_size) throw fail("index " + std::to_string(e.index) + " out of range");
      if (e.count == 0) throw fail("zero count");
      if (!row.empty() && e.index <= row.back().index) throw fail("indices must be strictly increasing");
      row.push_back(e);
    }
    if (row.empty()) throw fail("document has no entries");
    corpus.rows.push_back(std::move(row));
  }
  if (corpus.rows.size() != num_docs) {
    throw IoError("bow: header declares " + std::to_string(num_docs) + " documents, found " +
                  std::to_string(corpus.rows.size()));
  }
  const bool any = std::any_of(labels.begin(), labels.end(), [](int l) { return l != -1; });
  if (any) {
    if (std::any_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) {
      throw IoError("bow: labels must be all -1 or all nonnegative");
    }
    corpus.labels = std::move(labels);
  }
  return corpus;
}

void write_bow_file(const std::string& path, const BowCorpus& corpus) {
  auto out = open_out(path);
  write_bow(out, corpus);
  if (!out) throw IoError("failed writing '" + path + "'");
}

BowCorpus read_bow_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_bow(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_vocab_file(const std::string& path, const Vocabulary& vocab) {
  auto out = open_out(path);
  for (const auto& w : vocab.words()) out << w << '\n';
}

Vocabulary read_vocab_file(const std::string& path) {
  std::vector<std::string> words = read_lines(path);
  while (!words.empty() && words.back().empty()) words.pop_back();
  return Vocabulary::from_words(std::move(words));
}

}  // namespace ottopics
