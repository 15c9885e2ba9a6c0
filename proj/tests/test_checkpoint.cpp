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

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ottopics/checkpoint.hpp"
#include "ottopics/errors.hpp"

using namespace ottopics;

namespace {

Checkpoint sample() {
  ModelConfig m;
  m.num_topics = 3;
  m.embedding_dim = 4;
  m.hidden_size = 5;
  m.tau = 0.3;
  m.lambda_ecr = 7.5;
  m.regularizer = RegularizerKind::kDkmEntropy;
  m.sinkhorn.epsilon = 0.07;
  Checkpoint c{init_model(9, m, 77), TrainConfig{}, {}};
  c.train->epochs = 12;
  c.train->learning_rate = 1.0 / 3.0;
  c.train->seed = 5;
  // Values that only survive a shortest-round-trip encoding.
  c.state.params.word_embeddings(0, 0) = 0.1 + 0.2;
  c.state.params.word_embeddings(1, 1) = 5e-324;
  c.state.params.topic_embeddings(0, 0) = -1.7976931348623157e308;
  for (int i = 0; i < 9; ++i) c.vocabulary.push_back("w" + std::to_string(i));
  return c;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  const Checkpoint c = sample();
  std::stringstream ss;
  save_checkpoint(ss, c);
  const std::string first = ss.str();
  const Checkpoint back = load_checkpoint(ss);
  bool same = true;
  std::vector<std::span<const double>> a, b;
  c.state.params.for_each([&](std::string_view, std::span<const double> v) { a.push_back(v); });
  back.state.params.for_each([&](std::string_view, std::span<const double> v) { b.push_back(v); });
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].size() == b[i].size());
    for (std::size_t j = 0; j < a[i].size(); ++j) same &= std::memcmp(&a[i][j], &b[i][j], sizeof(double)) == 0;
  }
  CHECK(same);
  CHECK(back.state.config.tau == 0.3);
  CHECK(back.state.config.regularizer == RegularizerKind::kDkmEntropy);
  CHECK(back.state.config.sinkhorn.epsilon == 0.07);
  CHECK(back.state.seed == 77);
  CHECK(back.state.prior.sigma0_diag == c.state.prior.sigma0_diag);
  REQUIRE(back.train);
  CHECK(back.train->learning_rate == 1.0 / 3.0);
  CHECK(back.vocabulary == c.vocabulary);
  std::stringstream again;
  save_checkpoint(again, back);
  CHECK(again.str() == first);
}

TEST_CASE("checkpoint: corrupt input") {
  std::stringstream ss;
  save_checkpoint(ss, sample());
  const std::string text = ss.str();
  for (const std::string bad :
       {std::string("ottopics-checkpoint 2\n") + text.substr(text.find('\n') + 1),
        text.substr(0, text.size() / 2), std::string("hello\n")}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(load_checkpoint(in), IoError);
  }
  CHECK_THROWS_AS(load_checkpoint_file("/nonexistent/ckpt"), IoError);
}

TEST_CASE("pretrained embeddings: aligned, missing words drawn, errors") {
  const std::string path = std::string(OTTOPICS_TEST_TMPDIR) + "/emb.txt";
  {
    std::ofstream out(path);
    out << "dog 1 2\nzebra 9 9\ncat 3 4\n";
  }
  const auto vocab = Vocabulary::from_words({"cat", "dog", "emu"});
  const Matrix w = load_pretrained_embeddings(path, vocab, 0.02, 1);
  REQUIRE(w.rows() == 2);
  REQUIRE(w.cols() == 3);
  CHECK(w(0, 0) == 3.0);
  CHECK(w(1, 0) == 4.0);
  CHECK(w(0, 1) == 1.0);
  CHECK(std::abs(w(0, 2)) < 0.2);
  CHECK(load_pretrained_embeddings(path, vocab, 0.02, 1) == w);
  {
    std::ofstream out(path);
    out << "dog 1 2\ncat 3\n";
  }
  CHECK_THROWS_AS(load_pretrained_embeddings(path, vocab, 0.02, 1), IoError);
  {
    std::ofstream out(path);
    out << "yak 1 2\n";
  }
  CHECK_THROWS_AS(load_pretrained_embeddings(path, vocab, 0.02, 1), IoError);
}
