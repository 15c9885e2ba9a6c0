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

#include "ottopics/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "ottopics/errors.hpp"

namespace ottopics {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void write_tensor(std::ostream& os, std::string_view name, std::span<const double> data,
                  std::size_t rows, std::size_t cols) {
  os << "tensor " << name << ' ' << rows << ' ' << cols << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) os << ' ';
      os << fmt(data[r * cols + c]);
    }
    os << '\n';
  }
}

std::pair<std::size_t, std::size_t> shape_of(const Parameters& p, std::string_view name) {
  const auto& e = p.encoder;
  if (name == "encoder.l1_weight") return {e.l1_weight.rows(), e.l1_weight.cols()};
  if (name == "encoder.l2_weight") return {e.l2_weight.rows(), e.l2_weight.cols()};
  if (name == "encoder.mean_weight") return {e.mean_weight.rows(), e.mean_weight.cols()};
  if (name == "encoder.logvar_weight") return {e.logvar_weight.rows(), e.logvar_weight.cols()};
  if (name == "word_embeddings") return {p.word_embeddings.rows(), p.word_embeddings.cols()};
  if (name == "topic_embeddings") return {p.topic_embeddings.rows(), p.topic_embeddings.cols()};
  if (name == "encoder.l1_bias") return {1, e.l1_bias.size()};
  if (name == "encoder.l2_bias") return {1, e.l2_bias.size()};
  if (name == "encoder.mean_bias") return {1, e.mean_bias.size()};
  return {1, e.logvar_bias.size()};
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}
  bool next(std::string& line) {
    if (!std::getline(is_, line)) return false;
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  IoError error(const std::string& msg) const {
    return IoError("checkpoint line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& is_;
  std::size_t lineno_ = 0;
};

template <typename T>
T parse_value(const std::string& s, const LineReader& r) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw r.error("bad value '" + s + "'");
  return v;
}

}  // namespace

void save_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  const ModelState& s = ckpt.state;
  const ModelConfig& c = s.config;
  os << "ottopics-checkpoint " << kCheckpointVersion << '\n';
  os << "seed " << s.seed << '\n';
  os << "config.num_topics " << c.num_topics << '\n';
  os << "config.embedding_dim " << c.embedding_dim << '\n';
  os << "config.hidden_size " << c.hidden_size << '\n';
  os << "config.tau " << fmt(c.tau) << '\n';
  os << "config.lambda_ecr " << fmt(c.lambda_ecr) << '\n';
  os << "config.regularizer " << to_string(c.regularizer) << '\n';
  os << "config.entropy_weight " << fmt(c.entropy_weight) << '\n';
  os << "config.alpha " << fmt(c.alpha) << '\n';
  os << "config.init_std " << fmt(c.init_std) << '\n';
  os << "config.sinkhorn.max_iterations " << c.sinkhorn.max_iterations << '\n';
  os << "config.sinkhorn.stop_tolerance " << fmt(c.sinkhorn.stop_tolerance) << '\n';
  os << "config.sinkhorn.epsilon " << fmt(c.sinkhorn.epsilon) << '\n';
  if (ckpt.train) {
    const TrainConfig& t = *ckpt.train;
    os << "train.epochs " << t.epochs << '\n';
    os << "train.batch_size " << t.batch_size << '\n';
    os << "train.learning_rate " << fmt(t.learning_rate) << '\n';
    os << "train.adam_beta1 " << fmt(t.adam_beta1) << '\n';
    os << "train.adam_beta2 " << fmt(t.adam_beta2) << '\n';
    os << "train.adam_eps " << fmt(t.adam_eps) << '\n';
    os << "train.seed " << t.seed << '\n';
    os << "train.checkpoint_every " << t.checkpoint_every << '\n';
  }
  os << "prior.alpha " << fmt(s.prior.alpha) << '\n';
  write_tensor(os, "prior.mu0", s.prior.mu0, 1, s.prior.mu0.size());
  write_tensor(os, "prior.sigma0_diag", s.prior.sigma0_diag, 1, s.prior.sigma0_diag.size());
  s.params.for_each([&](std::string_view name, std::span<const double> v) {
    const auto [rows, cols] = shape_of(s.params, name);
    write_tensor(os, name, v, rows, cols);
  });
  if (!ckpt.vocabulary.empty()) {
    os << "vocab " << ckpt.vocabulary.size() << '\n';
    for (const auto& w : ckpt.vocabulary) os << w << '\n';
  }
  os << "end\n";
}

Checkpoint load_checkpoint(std::istream& is) {
  LineReader reader(is);
  std::string line;
  if (!reader.next(line)) throw reader.error("empty file");
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "ottopics-checkpoint") {
      throw reader.error("not an ottopics checkpoint");
    }
    if (version != kCheckpointVersion) {
      throw reader.error("unsupported checkpoint version " + std::to_string(version));
    }
  }

  std::map<std::string, std::string> scalars;
  std::map<std::string, Matrix> tensors;
  Checkpoint ckpt;
  bool ended = false;
  while (reader.next(line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "tensor") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      if (!(ls >> name >> rows >> cols)) throw reader.error("bad tensor header");
      std::vector<double> data;
      data.reserve(rows * cols);
      for (std::size_t r = 0; r < rows; ++r) {
        if (!reader.next(line)) throw reader.error("truncated tensor " + name);
        std::istringstream rs(line);
        std::string tok;
        std::size_t n = 0;
        while (rs >> tok) {
          data.push_back(parse_value<double>(tok, reader));
          ++n;
        }
        if (n != cols) throw reader.error("tensor " + name + " row has wrong length");
      }
      tensors.emplace(name, Matrix(rows, cols, std::move(data)));
      continue;
    }
    if (key == "vocab") {
      std::size_t n = 0;
      if (!(ls >> n)) throw reader.error("bad vocab header");
      for (std::size_t i = 0; i < n; ++i) {
        if (!reader.next(line)) throw reader.error("truncated vocabulary");
        ckpt.vocabulary.push_back(line);
      }
      continue;
    }
    std::string value;
    if (!(ls >> value)) throw reader.error("missing value for " + key);
    scalars[key] = value;
  }
  if (!ended) throw reader.error("missing 'end' marker");

  auto get = [&](const std::string& key) -> const std::string& {
    auto it = scalars.find(key);
    if (it == scalars.end()) throw IoError("checkpoint: missing field " + key);
    return it->second;
  };
  auto as_size = [&](const std::string& key) { return parse_value<std::size_t>(get(key), reader); };
  auto as_double = [&](const std::string& key) { return parse_value<double>(get(key), reader); };

  ModelState& s = ckpt.state;
  s.seed = parse_value<std::uint64_t>(get("seed"), reader);
  ModelConfig& c = s.config;
  c.num_topics = as_size("config.num_topics");
  c.embedding_dim = as_size("config.embedding_dim");
  c.hidden_size = as_size("config.hidden_size");
  c.tau = as_double("config.tau");
  c.lambda_ecr = as_double("config.lambda_ecr");
  c.regularizer = parse_regularizer(get("config.regularizer"));
  c.entropy_weight = as_double("config.entropy_weight");
  c.alpha = as_double("config.alpha");
  c.init_std = as_double("config.init_std");
  c.sinkhorn.max_iterations = as_size("config.sinkhorn.max_iterations");
  c.sinkhorn.stop_tolerance = as_double("config.sinkhorn.stop_tolerance");
  c.sinkhorn.epsilon = as_double("config.sinkhorn.epsilon");
  if (scalars.contains("train.epochs")) {
    TrainConfig t;
    t.epochs = as_size("train.epochs");
    t.batch_size = as_size("train.batch_size");
    t.learning_rate = as_double("train.learning_rate");
    t.adam_beta1 = as_double("train.adam_beta1");
    t.adam_beta2 = as_double("train.adam_beta2");
    t.adam_eps = as_double("train.adam_eps");
    t.seed = parse_value<std::uint64_t>(get("train.seed"), reader);
    t.checkpoint_every = as_size("train.checkpoint_every");
    ckpt.train = t;
  }
  s.prior.alpha = as_double("prior.alpha");

  auto take = [&](const std::string& name) -> Matrix {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw IoError("checkpoint: missing tensor " + name);
    return std::move(it->second);
  };
  auto take_vec = [&](const std::string& name) -> Vector {
    Matrix m = take(name);
    return Vector(m.data().begin(), m.data().end());
  };
  s.prior.mu0 = take_vec("prior.mu0");
  s.prior.sigma0_diag = take_vec("prior.sigma0_diag");
  EncoderParams& e = s.params.encoder;
  e.l1_weight = take("encoder.l1_weight");
  e.l1_bias = take_vec("encoder.l1_bias");
  e.l2_weight = take("encoder.l2_weight");
  e.l2_bias = take_vec("encoder.l2_bias");
  e.mean_weight = take("encoder.mean_weight");
  e.mean_bias = take_vec("encoder.mean_bias");
  e.logvar_weight = take("encoder.logvar_weight");
  e.logvar_bias = take_vec("encoder.logvar_bias");
  s.params.word_embeddings = take("word_embeddings");
  s.params.topic_embeddings = take("topic_embeddings");
  try {
    s.validate();
  } catch (const ValidationError& err) {
    throw IoError(std::string("checkpoint: ") + err.what());
  }
  if (!ckpt.vocabulary.empty() && ckpt.vocabulary.size() != s.vocab_size()) {
    throw IoError("checkpoint: vocabulary length differs from the model's V");
  }
  return ckpt;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_checkpoint(out, ckpt);
  if (!out) throw IoError("failed writing '" + path + "'");
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return load_checkpoint(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

Matrix load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                  double init_std, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::optional<Vector>> found(vocab.size());
  std::size_t dim = 0, lineno = 0, hits = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string word, tok;
    if (!(ls >> word)) continue;
    Vector v;
    while (ls >> tok) {
      double x = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
      v.push_back(x);
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim || dim == 0) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                    " values");
    }
    if (auto idx = vocab.index_of(word); idx && !found[*idx]) {
      found[*idx] = std::move(v);
      ++hits;
    }
  }
  if (hits == 0) throw IoError(path + ": no vocabulary word has an embedding");
  Matrix w(dim, vocab.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, init_std);
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    for (std::size_t d = 0; d < dim; ++d) w(d, j) = found[j] ? (*found[j])[d] : normal(rng);
  }
  return w;
}

}  // namespace ottopics
