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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "ottopics/checkpoint.hpp"
#include "ottopics/corpus.hpp"
#include "ottopics/numerics.hpp"

using namespace ottopics;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::path(OTTOPICS_TEST_TMPDIR) / "cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

// Small synthetic corpus shared by the training tests.
std::string synth_dir() {
  static const std::string dir = [] {
    const std::string d = scratch("synth");
    const auto r = invoke({"gen-synth", "--docs", "60", "--vocab-size", "40", "--k", "4", "--doc-len",
                        "30", "--seed", "3", "--out-dir", d});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> small_train(const std::string& bow, const std::string& out) {
  return {"train", "--bow", bow, "--k", "4", "--dim", "6", "--hidden", "8", "--epochs", "3",
          "--batch-size", "20", "--lr", "0.01", "--seed", "7", "--quiet", "--out-dir", out};
}

}  // namespace

TEST_CASE("sha256 of a known string") {
  const std::string path = scratch("sha") + "/abc.txt";
  write_text(path, "abc");
  CHECK(cli::sha256_file(path) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("gen-synth writes reproducible files") {
  const std::string a = scratch("gen_a"), b = scratch("gen_b");
  for (const auto& d : {a, b}) {
    const auto r = invoke({"gen-synth", "--docs", "30", "--vocab-size", "50", "--k", "5", "--seed",
                        "11", "--out-dir", d});
    REQUIRE(r.code == 0);
  }
  for (const char* f : {"synth.bow", "labels.txt", "planted_beta.txt"}) {
    CHECK(slurp(a + "/" + f) == slurp(b + "/" + f));
  }
  const BowCorpus corpus = read_bow_file(a + "/synth.bow");
  CHECK(corpus.num_docs() == 30);
  CHECK(corpus.vocab_size == 50);
  CHECK(read_labels(a + "/labels.txt") == *corpus.labels);

  ZipfCorpusConfig cfg;
  cfg.num_docs = 30;
  cfg.vocab_size = 50;
  cfg.num_topics = 5;
  cfg.seed = 11;
  const SyntheticCorpus direct = generate_zipf_corpus(cfg);
  CHECK(corpus == direct.corpus);
  std::ifstream beta(a + "/planted_beta.txt");
  CHECK(read_matrix_text(beta) == direct.planted_beta);

  const auto m = read_json(a + "/manifest.json");
  CHECK(m["command"] == "gen-synth");
  CHECK(m["seed"] == 11);
  CHECK(m["config"]["docs"] == 30);

  CHECK(invoke({"gen-synth", "--docs", "0", "--out-dir", scratch("gen_zero")}).code == 2);
}

TEST_CASE("train is bit-reproducible and writes a manifest") {
  const std::string bow = synth_dir() + "/synth.bow";
  const std::string a = scratch("train_a"), b = scratch("train_b");
  REQUIRE(invoke(small_train(bow, a)).code == 0);
  REQUIRE(invoke(small_train(bow, b)).code == 0);
  CHECK(slurp(a + "/model.ckpt") == slurp(b + "/model.ckpt"));
  CHECK(slurp(a + "/history.csv") == slurp(b + "/history.csv"));

  const auto m = read_json(a + "/manifest.json");
  CHECK(m["command"] == "train");
  CHECK(m["seed"] == 7);
  CHECK(m["config"]["model"]["k"] == 4);
  CHECK(m["config"]["model"]["tau"] == 1.0);  // default materialized
  REQUIRE(m["inputs"].size() == 1);
  CHECK(m["inputs"][0]["sha256"] == cli::sha256_file(bow));
  CHECK(m["outputs"].contains("checkpoint"));
  CHECK(m.dump().find("time") == std::string::npos);

  const Checkpoint ckpt = load_checkpoint_file(a + "/model.ckpt");
  CHECK(ckpt.state.num_topics() == 4);
  CHECK(ckpt.train->epochs == 3);
}

TEST_CASE("train rejects bad configuration with exit code 2") {
  const std::string bow = synth_dir() + "/synth.bow";
  auto args = small_train(bow, scratch("train_bad"));
  args.insert(args.end(), {"--k", "1"});
  const auto r = invoke(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("num_topics") != std::string::npos);

  // All problems are listed together.
  auto both = small_train(bow, scratch("train_bad2"));
  both.insert(both.end(), {"--k", "1", "--tau", "0", "--lr", "0"});
  const auto r2 = invoke(both);
  CHECK(r2.code == 2);
  CHECK(r2.err.find("num_topics") != std::string::npos);
  CHECK(r2.err.find("tau") != std::string::npos);
  CHECK(r2.err.find("learning_rate") != std::string::npos);

  CHECK(invoke({"train", "--out-dir", scratch("train_none")}).code == 2);
  CHECK(invoke({"train", "--bow", bow, "--regularizer", "kmeans", "--out-dir", scratch("x")}).code ==
        2);
  CHECK(invoke({"train", "--bow", bow, "--k", "many", "--out-dir", scratch("x")}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("malformed and missing files exit with code 4") {
  const std::string dir = scratch("badfile");
  write_text(dir + "/bad.bow", "V 5 D 2\n-1\t0:1 2:3\n-1\t4:x\n");
  const auto r = invoke({"train", "--bow", dir + "/bad.bow", "--k", "2", "--out-dir", dir + "/o"});
  CHECK(r.code == 4);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(invoke({"train", "--bow", dir + "/nope.bow", "--out-dir", dir + "/o"}).code == 4);
}

TEST_CASE("config file sits between flags and defaults") {
  const std::string bow = synth_dir() + "/synth.bow";
  const std::string dir = scratch("config");
  write_text(dir + "/run.ini", "[train]\nk = 3\ntau = 0.5\nepochs = 2\n");
  auto args = small_train(bow, dir + "/out");
  // Drop the --k flag so the file supplies it; keep --epochs 3 from flags.
  args.erase(args.begin() + 3, args.begin() + 5);
  args.insert(args.begin(), {"--config", dir + "/run.ini"});
  REQUIRE(invoke(args).code == 0);
  const auto m = read_json(dir + "/out/manifest.json");
  CHECK(m["config"]["model"]["k"] == 3);
  CHECK(m["config"]["model"]["tau"] == 0.5);
  CHECK(m["config"]["train"]["epochs"] == 3);
  CHECK(m["config"]["model"]["lambda_ecr"] == 100.0);
}

TEST_CASE("eval writes metrics and topics") {
  const std::string bow = synth_dir() + "/synth.bow";
  const std::string run = scratch("eval_run");
  REQUIRE(invoke(small_train(bow, run)).code == 0);

  const std::string e1 = scratch("eval_1"), e2 = scratch("eval_2");
  REQUIRE(invoke({"eval", "--checkpoint", run + "/model.ckpt", "--bow", bow, "--top-n", "5",
               "--out-dir", e1})
              .code == 0);
  // Falls back to the corpus recorded in the train manifest.
  REQUIRE(invoke({"eval", "--checkpoint", run + "/model.ckpt", "--top-n", "5", "--out-dir", e2})
              .code == 0);
  CHECK(slurp(e1 + "/metrics.json") == slurp(e2 + "/metrics.json"));
  CHECK(slurp(e1 + "/topics.json") == slurp(e2 + "/topics.json"));

  const auto metrics = read_json(e1 + "/metrics.json");
  for (const char* key : {"td", "npmi", "purity", "nmi", "perplexity", "config_echo"}) {
    CHECK_MESSAGE(metrics.contains(key), key);
  }
  CHECK(metrics["td"].get<double>() > 0.0);
  CHECK(metrics["td"].get<double>() <= 1.0);
  CHECK(metrics["config_echo"]["top_n"] == 5);
  const auto topics = read_json(e1 + "/topics.json");
  REQUIRE(topics.size() == 4);
  CHECK(topics[2]["topic_id"] == 2);
  CHECK(topics[2]["words"].size() == 5);
  CHECK(topics[2]["weights"].size() == 5);
}

TEST_CASE("eval without labels omits clustering metrics") {
  const std::string dir = scratch("eval_nolabels");
  BowCorpus corpus = read_bow_file(synth_dir() + "/synth.bow");
  corpus.labels.reset();
  write_bow_file(dir + "/plain.bow", corpus);
  const std::string run = dir + "/run";
  REQUIRE(invoke(small_train(dir + "/plain.bow", run)).code == 0);
  const auto r = invoke({"eval", "--checkpoint", run + "/model.ckpt", "--out-dir", dir + "/eval"});
  CHECK(r.code == 0);
  CHECK(r.err.find("purity and nmi omitted") != std::string::npos);
  const auto metrics = read_json(dir + "/eval/metrics.json");
  CHECK_FALSE(metrics.contains("purity"));
  CHECK_FALSE(metrics.contains("nmi"));
  CHECK(metrics.contains("td"));

  // Labels supplied separately bring them back.
  REQUIRE(invoke({"eval", "--checkpoint", run + "/model.ckpt", "--labels",
               synth_dir() + "/labels.txt", "--out-dir", dir + "/eval2"})
              .code == 0);
  CHECK(read_json(dir + "/eval2/metrics.json").contains("purity"));
}

TEST_CASE("eval of a planted-block checkpoint gives TD = 1") {
  // Word j sits on the axis of its block's topic; head words sit at the
  // origin, equidistant from every topic.
  const std::size_t k = 4, v = 40, head = 4, block = (v - head) / k;
  ModelConfig cfg;
  cfg.num_topics = k;
  cfg.embedding_dim = k;
  cfg.hidden_size = 3;
  cfg.tau = 0.1;
  ModelState state = init_model(v, cfg, 1);
  Matrix& w = state.params.word_embeddings;
  Matrix& t = state.params.topic_embeddings;
  for (double& x : w.data()) x = 0.0;
  for (double& x : t.data()) x = 0.0;
  for (std::size_t j = head; j < v; ++j) w((j - head) / block, j) = 1.0;
  for (std::size_t c = 0; c < k; ++c) t(c, c) = 1.0;

  const std::string dir = scratch("planted");
  save_checkpoint_file(dir + "/planted.ckpt", {state, std::nullopt, {}});
  ZipfCorpusConfig zc;
  zc.num_docs = 20;
  zc.vocab_size = v;
  zc.num_topics = k;
  zc.head_size = head;
  write_bow_file(dir + "/c.bow", generate_zipf_corpus(zc).corpus);
  REQUIRE(invoke({"eval", "--checkpoint", dir + "/planted.ckpt", "--bow", dir + "/c.bow", "--top-n",
               std::to_string(block), "--out-dir", dir + "/eval"})
              .code == 0);
  CHECK(read_json(dir + "/eval/metrics.json")["td"].get<double>() == 1.0);
  const auto topics = read_json(dir + "/eval/topics.json");
  CHECK(topics[1]["word_ids"][0] == head + block);
}

TEST_CASE("raw text corpus round trip through train and eval") {
  const std::string dir = scratch("raw");
  const std::string docs = std::string(OTTOPICS_FIXTURE_DIR) + "/preprocess_docs.txt";
  REQUIRE(invoke({"train", "--corpus", docs, "--k", "2", "--dim", "3",
               "--hidden", "4", "--epochs", "2", "--batch-size", "5", "--quiet", "--out-dir",
               dir + "/run"})
              .code == 0);
    CHECK(read_bow_file(dir + "/run/corpus.bow").num_docs() == 17);
  REQUIRE(invoke({"eval", "--checkpoint", dir + "/run/model.ckpt", "--corpus", docs, "--top-n", "3",
               "--out-dir", dir + "/eval"})
              .code == 0);
  const auto topics = read_json(dir + "/eval/topics.json");
  const auto vocab = read_vocab_file(dir + "/run/vocab.txt");
  for (const auto& topic : topics) {
    for (const auto& word : topic["words"]) CHECK(vocab.index_of(word.get<std::string>()));
  }
  CHECK(read_json(dir + "/eval/metrics.json")["config_echo"]["num_docs"] == 17);
}

TEST_CASE("gradcheck passes, and fails under fault injection") {
  const auto ok = invoke({"gradcheck", "--points", "2"});
  CHECK(ok.code == 0);
  for (const char* loss : {"dkm", "dkm-entropy", "ecr", "topic-model", "total"}) {
    CHECK_MESSAGE(ok.out.find(loss) != std::string::npos, loss);
  }
  CHECK(ok.out.find("gradcheck passed") != std::string::npos);

  const std::string dir = scratch("gradcheck");
  const auto bad = invoke({"gradcheck", "--points", "2", "--perturb-loss", "ecr", "--out-dir", dir});
  CHECK(bad.code == 3);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  const auto report = read_json(dir + "/gradcheck.json");
  CHECK(report["passed"] == false);
  for (const auto& row : report["results"]) CHECK(row["passed"] == (row["loss"] != "ecr"));
}

TEST_CASE("export-embeddings dumps W and T") {
  const std::string run = scratch("export_run"), out = scratch("export");
  REQUIRE(invoke(small_train(synth_dir() + "/synth.bow", run)).code == 0);
  REQUIRE(invoke({"export-embeddings", "--checkpoint", run + "/model.ckpt", "--out-dir", out}).code ==
          0);
  const Checkpoint ckpt = load_checkpoint_file(run + "/model.ckpt");
  std::ifstream w(out + "/word_embeddings.txt"), t(out + "/topic_embeddings.txt");
  CHECK(read_matrix_text(w) == ckpt.state.params.word_embeddings);
  CHECK(read_matrix_text(t) == ckpt.state.params.topic_embeddings);
  CHECK(invoke({"export-embeddings", "--checkpoint", out + "/missing.ckpt", "--out-dir", out}).code ==
        2);
}
