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

#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ottopics/checkpoint.hpp"
#include "ottopics/corpus.hpp"
#include "ottopics/errors.hpp"
#include "ottopics/evaluation.hpp"
#include "ottopics/gradcheck.hpp"
#include "ottopics/model.hpp"
#include "ottopics/trainer.hpp"

#ifndef OTTOPICS_VERSION
#define OTTOPICS_VERSION "0.0.0"
#endif

namespace ottopics::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256: digest unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), std::streamsize(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  }
  return hex.str();
}

namespace {

// ---- Manifest --------------------------------------------------------------

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void input(const std::string& role, const std::string& path) {
    inputs_.push_back({{"role", role},
                       {"path", fs::absolute(path).lexically_normal().string()},
                       {"sha256", sha256_file(path)}});
  }
  void output(const std::string& role, const fs::path& path) {
    outputs_[role] = fs::absolute(path).lexically_normal().string();
  }
  Json& config() { return config_; }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& dir) const {
    Json j;
    j["command"] = command_;
    j["tool_version"] = OTTOPICS_VERSION;
    if (seed_) j["seed"] = *seed_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    Json outputs = outputs_;
    outputs["manifest"] = fs::absolute(dir / "manifest.json").lexically_normal().string();
    j["outputs"] = outputs;
    write_json(dir / "manifest.json", j);
  }

  static void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }

 private:
  std::string command_;
  Json config_ = Json::object();
  Json inputs_ = Json::array();
  Json outputs_ = Json::object();
  std::optional<std::uint64_t> seed_;
};

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

Json model_config_json(const ModelConfig& c) {
  return {{"k", c.num_topics},
          {"dim", c.embedding_dim},
          {"hidden", c.hidden_size},
          {"tau", c.tau},
          {"lambda_ecr", c.lambda_ecr},
          {"regularizer", std::string(to_string(c.regularizer))},
          {"entropy_weight", c.entropy_weight},
          {"alpha", c.alpha},
          {"init_std", c.init_std},
          {"epsilon", c.sinkhorn.epsilon},
          {"sinkhorn_tol", c.sinkhorn.stop_tolerance},
          {"sinkhorn_max_iter", c.sinkhorn.max_iterations}};
}

Json train_config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.learning_rate},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every}};
}

Json preprocess_config_json(const PreprocessConfig& c) {
  Json j = {{"vocab_size", c.vocab_size}, {"max_df", c.max_df}};
  j["min_df"] = c.min_df ? Json(*c.min_df) : Json(nullptr);
  j["min_token_len"] = c.min_token_len;
  j["lowercase"] = c.lowercase;
  return j;
}

// Runs every validator and reports all failures together.
void validate_all(const std::vector<std::function<void()>>& checks) {
  std::string msg;
  for (const auto& check : checks) {
    try {
      check();
    } catch (const ValidationError& e) {
      msg += (msg.empty() ? "" : "\n") + std::string(e.what());
    }
  }
  if (!msg.empty()) throw ValidationError(msg);
}

std::vector<int> labels_for(const std::string& path, std::size_t expected) {
  std::vector<int> labels = read_labels(path);
  if (labels.size() != expected) {
    throw ValidationError("labels: " + path + " has " + std::to_string(labels.size()) +
                          " entries for " + std::to_string(expected) + " documents");
  }
  return labels;
}

// Raw text -> BoW against a known vocabulary. Labels follow the kept documents.
BowCorpus vectorize_raw(const std::vector<std::string>& raw, const PreprocessConfig& pre,
                        const Vocabulary& vocab, const std::optional<std::vector<int>>& labels,
                        std::ostream& out) {
  const TokenizedCorpus tok = preprocess(raw, pre);
  std::optional<std::vector<int>> kept_labels;
  if (labels) {
    kept_labels.emplace();
    for (std::size_t i : tok.source_index) kept_labels->push_back((*labels)[i]);
  }
  std::optional<std::span<const int>> span;
  if (kept_labels) span = std::span<const int>(*kept_labels);
  VectorizeResult vr = vectorize(tok.docs, vocab, span);
  const std::size_t dropped = tok.dropped.size() + vr.dropped.size();
  if (dropped) out << "dropped " << dropped << " empty documents\n";
  return std::move(vr.corpus);
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string corpus, bow, labels, vocab, embeddings, out_dir;
  std::string regularizer = "ecr";
  PreprocessConfig pre;
  std::optional<double> min_df;
  ModelConfig model;
  TrainConfig train;
  bool quiet = false;
};

void add_model_options(CLI::App* app, ModelConfig& m, std::string& regularizer) {
  app->add_option("--k", m.num_topics, "Number of topics")->capture_default_str();
  app->add_option("--dim", m.embedding_dim, "Embedding dimension")->capture_default_str();
  app->add_option("--hidden", m.hidden_size, "Encoder hidden width")->capture_default_str();
  app->add_option("--tau", m.tau, "Softmax temperature for beta")->capture_default_str();
  app->add_option("--lambda-ecr", m.lambda_ecr, "Regularizer weight")->capture_default_str();
  app->add_option("--regularizer", regularizer, "Clustering regularizer")
      ->check(CLI::IsMember({"ecr", "dkm", "dkm-entropy", "none"}))
      ->capture_default_str();
  app->add_option("--entropy-weight", m.entropy_weight, "Entropy weight for dkm-entropy")
      ->capture_default_str();
  app->add_option("--alpha", m.alpha, "Dirichlet concentration of the prior")
      ->capture_default_str();
  app->add_option("--init-std", m.init_std, "Std of embedding initialization")
      ->capture_default_str();
  app->add_option("--epsilon", m.sinkhorn.epsilon, "Sinkhorn entropic weight")
      ->capture_default_str();
  app->add_option("--sinkhorn-tol", m.sinkhorn.stop_tolerance, "Sinkhorn stop tolerance")
      ->capture_default_str();
  app->add_option("--sinkhorn-max-iter", m.sinkhorn.max_iterations, "Sinkhorn iteration cap")
      ->capture_default_str();
}

void add_train_options(CLI::App* app, TrainArgs& a) {
  auto* corpus = app->add_option("--corpus", a.corpus, "Raw text, one document per line");
  auto* bow = app->add_option("--bow", a.bow, "Bag-of-words file");
  corpus->excludes(bow);
  app->add_option("--labels", a.labels, "Integer labels, one per document");
  app->add_option("--vocab", a.vocab, "Vocabulary file for --bow input");
  app->add_option("--embeddings", a.embeddings, "Pretrained word vectors (word v1 ... vD)");
  app->add_option("--out-dir", a.out_dir, "Output directory")->required();
  app->add_option("--vocab-size", a.pre.vocab_size, "Vocabulary size cap")->capture_default_str();
  app->add_option("--max-df", a.pre.max_df, "Maximum document frequency")->capture_default_str();
  app->add_option("--min-df", a.min_df, "Minimum document frequency");
  app->add_option("--min-token-len", a.pre.min_token_len, "Shortest kept token")
      ->capture_default_str();
  add_model_options(app, a.model, a.regularizer);
  app->add_option("--epochs", a.train.epochs, "Training epochs")->capture_default_str();
  app->add_option("--batch-size", a.train.batch_size, "Minibatch size")->capture_default_str();
  app->add_option("--lr", a.train.learning_rate, "Adam learning rate")->capture_default_str();
  app->add_option("--seed", a.train.seed, "Random seed")->capture_default_str();
  app->add_option("--checkpoint-every", a.train.checkpoint_every,
                  "Epochs between intermediate checkpoints (0 = off)")
      ->capture_default_str();
  app->add_flag("--quiet", a.quiet, "Suppress progress output");
}

int cmd_train(TrainArgs& a, const CLI::App& app, std::ostream& out) {
  a.pre.min_df = a.min_df;
  a.model.regularizer = parse_regularizer(a.regularizer);
  validate_all({[&] { a.pre.validate(); }, [&] { a.model.validate(); },
                [&] { a.train.validate(); },
                [&] {
                  if (a.corpus.empty() && a.bow.empty()) {
                    throw ValidationError("one of --corpus or --bow is required");
                  }
                }});
  const fs::path dir = prepare_out_dir(a.out_dir);
  Manifest manifest("train");

  BowCorpus corpus;
  std::optional<Vocabulary> vocab;
  if (!a.corpus.empty()) {
    manifest.input("corpus", a.corpus);
    const auto raw = read_lines(a.corpus);
    std::optional<std::vector<int>> labels;
    if (!a.labels.empty()) {
      manifest.input("labels", a.labels);
      labels = labels_for(a.labels, raw.size());
    }
    const TokenizedCorpus tok = preprocess(raw, a.pre);
    vocab = build_vocab(tok.docs, a.pre);
    corpus = vectorize_raw(raw, a.pre, *vocab, labels, out);
    write_bow_file((dir / "corpus.bow").string(), corpus);
    write_vocab_file((dir / "vocab.txt").string(), *vocab);
    manifest.output("corpus_bow", dir / "corpus.bow");
    manifest.output("vocab", dir / "vocab.txt");
  } else {
    manifest.input("bow", a.bow);
    corpus = read_bow_file(a.bow);
    if (!a.labels.empty()) {
      manifest.input("labels", a.labels);
      corpus.labels = labels_for(a.labels, corpus.num_docs());
    }
    if (!a.vocab.empty()) {
      manifest.input("vocab", a.vocab);
      vocab = read_vocab_file(a.vocab);
      if (vocab->size() != corpus.vocab_size) {
        throw ValidationError("vocab: " + std::to_string(vocab->size()) +
                              " words but the corpus has V = " +
                              std::to_string(corpus.vocab_size));
      }
    }
  }

  std::optional<Matrix> pretrained;
  if (!a.embeddings.empty()) {
    if (!vocab) throw ValidationError("--embeddings needs a vocabulary (--corpus or --vocab)");
    manifest.input("embeddings", a.embeddings);
    pretrained = load_pretrained_embeddings(a.embeddings, *vocab, a.model.init_std, a.train.seed);
    if (pretrained->rows() != a.model.embedding_dim) {
      if (app.count("--dim") > 0) {
        throw ValidationError("--dim " + std::to_string(a.model.embedding_dim) +
                              " differs from the embedding file's " +
                              std::to_string(pretrained->rows()));
      }
      a.model.embedding_dim = pretrained->rows();
    }
  }

  manifest.seed(a.train.seed);
  manifest.config() = {{"preprocess", a.corpus.empty() ? Json(nullptr)
                                                       : preprocess_config_json(a.pre)},
                       {"model", model_config_json(a.model)},
                       {"train", train_config_json(a.train)},
                       {"num_docs", corpus.num_docs()},
                       {"vocab_size", corpus.vocab_size}};

  std::vector<std::string> words = vocab ? vocab->words() : std::vector<std::string>{};
  const std::size_t report_every = std::max<std::size_t>(1, a.train.epochs / 10);
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochStats& s) {
    if (a.quiet || (s.epoch % report_every != 0 && s.epoch != 1)) return;
    out << "epoch " << s.epoch << " loss " << s.mean_loss;
    if (a.model.regularizer != RegularizerKind::kNone) out << " reg " << s.ecr_loss;
    out << '\n';
  };
  hooks.on_checkpoint = [&](const ModelState& state, std::size_t epoch) {
    const fs::path p = dir / ("model-epoch" + std::to_string(epoch) + ".ckpt");
    save_checkpoint_file(p.string(), {state, a.train, words});
    manifest.output("checkpoint_epoch" + std::to_string(epoch), p);
  };

  TrainResult result = train(corpus, a.train, a.model, pretrained, hooks);

  save_checkpoint_file((dir / "model.ckpt").string(), {result.state, a.train, words});
  write_history_csv((dir / "history.csv").string(), result.history);
  manifest.output("checkpoint", dir / "model.ckpt");
  manifest.output("history", dir / "history.csv");
  manifest.write(dir);
  if (!result.history.empty()) {
    out << "trained " << result.history.size() << " epochs, final loss "
        << result.history.back().mean_loss << '\n';
  }
  out << "wrote " << (dir / "model.ckpt").string() << '\n';
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint, corpus, bow, labels, reference, out_dir;
  std::size_t top_n = 15;
  std::size_t perplexity_samples = 1;
  std::uint64_t seed = 0;
};

// BoW recorded by the train manifest next to the checkpoint.
std::string manifest_corpus(const std::string& checkpoint) {
  const fs::path mpath = fs::path(checkpoint).parent_path() / "manifest.json";
  std::ifstream in(mpath);
  if (!in) {
    throw ValidationError("no --bow or --corpus given and no manifest at " + mpath.string());
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError(mpath.string() + ": " + e.what());
  }
  if (j.contains("outputs") && j["outputs"].contains("corpus_bow")) {
    return j["outputs"]["corpus_bow"].get<std::string>();
  }
  for (const auto& input : j.value("inputs", Json::array())) {
    if (input.value("role", "") == "bow") return input.value("path", "");
  }
  throw ValidationError(mpath.string() + " records no bag-of-words corpus");
}

int cmd_eval(EvalArgs& a, std::ostream& out, std::ostream& err) {
  validate_all({[&] {
    if (a.top_n < 2) throw ValidationError("--top-n must be at least 2");
  }});
  Manifest manifest("eval");
  manifest.input("checkpoint", a.checkpoint);
  const Checkpoint ckpt = load_checkpoint_file(a.checkpoint);
  const ModelState& state = ckpt.state;
  if (a.top_n > state.vocab_size()) {
    throw ValidationError("--top-n exceeds the vocabulary size " +
                          std::to_string(state.vocab_size()));
  }

  BowCorpus corpus;
  if (!a.corpus.empty()) {
    if (ckpt.vocabulary.empty()) {
      throw ValidationError("--corpus needs a checkpoint that stores its vocabulary");
    }
    manifest.input("corpus", a.corpus);
    const auto raw = read_lines(a.corpus);
    std::optional<std::vector<int>> labels;
    if (!a.labels.empty()) {
      manifest.input("labels", a.labels);
      labels = labels_for(a.labels, raw.size());
    }
    PreprocessConfig pre;
    pre.vocab_size = std::max<std::size_t>(2, ckpt.vocabulary.size());
    corpus = vectorize_raw(raw, pre, Vocabulary::from_words(ckpt.vocabulary), labels, out);
  } else {
    const std::string bow = a.bow.empty() ? manifest_corpus(a.checkpoint) : a.bow;
    manifest.input("bow", bow);
    corpus = read_bow_file(bow);
    if (!a.labels.empty()) {
      manifest.input("labels", a.labels);
      corpus.labels = labels_for(a.labels, corpus.num_docs());
    }
  }
  if (corpus.vocab_size != state.vocab_size()) {
    throw ValidationError("corpus has V = " + std::to_string(corpus.vocab_size) +
                          " but the checkpoint has V = " + std::to_string(state.vocab_size()));
  }
  BowCorpus reference = corpus;
  if (!a.reference.empty()) {
    manifest.input("reference", a.reference);
    reference = read_bow_file(a.reference);
    if (reference.vocab_size != state.vocab_size()) {
      throw ValidationError("reference corpus vocabulary size differs from the checkpoint's");
    }
  }

  const TopicSet topics = extract_topics(state, a.top_n);
  const NpmiResult npmi = npmi_coherence(topics, reference);
  Json metrics;
  metrics["td"] = topic_diversity(topics);
  metrics["npmi"] = npmi.mean;
  metrics["npmi_per_topic"] = npmi.per_topic;
  if (corpus.labels) {
    const ClusteringResult clusters = cluster_documents(corpus, state);
    metrics["purity"] = purity(clusters);
    metrics["nmi"] = nmi(clusters);
  } else {
    err << "notice: no labels available; purity and nmi omitted\n";
  }
  metrics["perplexity"] = perplexity(corpus, state, a.perplexity_samples, a.seed);
  metrics["min_topic_distance"] = min_topic_distance(state);
  metrics["config_echo"] = {{"model", model_config_json(state.config)},
                            {"seed", state.seed},
                            {"top_n", a.top_n},
                            {"perplexity_samples", a.perplexity_samples},
                            {"eval_seed", a.seed},
                            {"num_docs", corpus.num_docs()}};
  if (ckpt.train) metrics["config_echo"]["train"] = train_config_json(*ckpt.train);
  if (!npmi.missing_words.empty()) {
    err << "notice: " << npmi.missing_words.size()
        << " top words never occur in the reference corpus\n";
  }

  Json topics_json = Json::array();
  for (std::size_t k = 0; k < topics.num_topics(); ++k) {
    Json words = Json::array();
    for (std::size_t id : topics.topics[k]) {
      words.push_back(ckpt.vocabulary.empty() ? std::to_string(id) : ckpt.vocabulary[id]);
    }
    topics_json.push_back({{"topic_id", k},
                           {"words", words},
                           {"word_ids", topics.topics[k]},
                           {"weights", topics.weights[k]}});
  }

  const fs::path dir = prepare_out_dir(a.out_dir);
  Manifest::write_json(dir / "metrics.json", metrics);
  Manifest::write_json(dir / "topics.json", topics_json);
  manifest.seed(a.seed);
  manifest.config() = {{"top_n", a.top_n}, {"perplexity_samples", a.perplexity_samples}};
  manifest.output("metrics", dir / "metrics.json");
  manifest.output("topics", dir / "topics.json");
  manifest.write(dir);

  out << "td " << metrics["td"].get<double>() << " npmi " << npmi.mean;
  if (corpus.labels) {
    out << " purity " << metrics["purity"].get<double>() << " nmi "
        << metrics["nmi"].get<double>();
  }
  out << " perplexity " << metrics["perplexity"].get<double>() << '\n';
  return kExitOk;
}

// ---- gen-synth -------------------------------------------------------------

struct SynthArgs {
  ZipfCorpusConfig cfg;
  std::string out_dir;
};

int cmd_gen_synth(SynthArgs& a, std::ostream& out) {
  a.cfg.validate();
  const fs::path dir = prepare_out_dir(a.out_dir);
  const SyntheticCorpus synth = generate_zipf_corpus(a.cfg);
  write_bow_file((dir / "synth.bow").string(), synth.corpus);
  write_labels((dir / "labels.txt").string(), *synth.corpus.labels);
  {
    const std::string path = (dir / "planted_beta.txt").string();
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_matrix_text(os, synth.planted_beta);
    if (!os) throw IoError("failed writing '" + path + "'");
  }
  Manifest manifest("gen-synth");
  manifest.seed(a.cfg.seed);
  manifest.config() = {{"docs", a.cfg.num_docs},
                       {"vocab_size", a.cfg.vocab_size},
                       {"k", a.cfg.num_topics},
                       {"doc_len", a.cfg.doc_len},
                       {"zipf_exponent", a.cfg.zipf_exponent},
                       {"head_size", a.cfg.head_size ? a.cfg.head_size : a.cfg.vocab_size / 10},
                       {"head_mass", a.cfg.head_mass},
                       {"dominant_weight", a.cfg.dominant_weight},
                       {"seed", a.cfg.seed}};
  manifest.output("bow", dir / "synth.bow");
  manifest.output("labels", dir / "labels.txt");
  manifest.output("planted_beta", dir / "planted_beta.txt");
  manifest.write(dir);
  out << "wrote " << synth.corpus.num_docs() << " documents to " << (dir / "synth.bow").string()
      << '\n';
  return kExitOk;
}

// ---- gradcheck -------------------------------------------------------------

struct GradArgs {
  GradCheckOptions opt;
  std::string out_dir;
};

int cmd_gradcheck(GradArgs& a, std::ostream& out) {
  validate_all({[&] {
                  if (a.opt.points < 1) throw ValidationError("--points must be at least 1");
                },
                [&] {
                  if (!(a.opt.tolerance > 0.0)) throw ValidationError("--tolerance must be positive");
                },
                [&] {
                  if (!(a.opt.step > 0.0)) throw ValidationError("--step must be positive");
                }});
  const GradCheckReport report = run_gradcheck(a.opt);

  // One line per (loss, group): worst relative error over the points.
  Json rows = Json::array();
  std::vector<std::pair<std::string, std::string>> seen;
  for (const auto& e : report.entries) {
    const std::pair<std::string, std::string> key{e.loss, e.group};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    double worst = 0.0;
    bool ok = true;
    for (const auto& f : report.entries) {
      if (f.loss == e.loss && f.group == e.group) {
        worst = std::max(worst, f.relative_error);
        ok = ok && f.passed;
      }
    }
    out << std::left << std::setw(12) << e.loss << ' ' << std::setw(22) << e.group << ' '
        << std::scientific << std::setprecision(2) << worst << std::defaultfloat << ' '
        << (ok ? "ok" : "FAIL") << '\n';
    rows.push_back({{"loss", e.loss}, {"group", e.group}, {"max_relative_error", worst},
                    {"passed", ok}});
  }
  const bool passed = report.passed();
  out << (passed ? "gradcheck passed" : "gradcheck FAILED") << " (" << report.losses().size()
      << " losses, tolerance " << report.tolerance << ")\n";

  if (!a.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(a.out_dir);
    Manifest::write_json(dir / "gradcheck.json",
                         {{"passed", passed}, {"tolerance", report.tolerance}, {"results", rows}});
    Manifest manifest("gradcheck");
    manifest.seed(a.opt.seed);
    manifest.config() = {{"points", a.opt.points}, {"tolerance", a.opt.tolerance},
                         {"step", a.opt.step}, {"perturb_loss", a.opt.perturb_loss}};
    manifest.output("report", dir / "gradcheck.json");
    manifest.write(dir);
  }
  return passed ? kExitOk : kExitNumeric;
}

// ---- export-embeddings -----------------------------------------------------

struct ExportArgs {
  std::string checkpoint, out_dir;
};

void write_matrix_file(const fs::path& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matrix_text(os, m);
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

int cmd_export(ExportArgs& a, std::ostream& out) {
  Manifest manifest("export-embeddings");
  manifest.input("checkpoint", a.checkpoint);
  const Checkpoint ckpt = load_checkpoint_file(a.checkpoint);
  const fs::path dir = prepare_out_dir(a.out_dir);
  write_matrix_file(dir / "word_embeddings.txt", ckpt.state.params.word_embeddings);
  write_matrix_file(dir / "topic_embeddings.txt", ckpt.state.params.topic_embeddings);
  manifest.output("word_embeddings", dir / "word_embeddings.txt");
  manifest.output("topic_embeddings", dir / "topic_embeddings.txt");
  if (!ckpt.vocabulary.empty()) {
    write_vocab_file((dir / "vocab.txt").string(), Vocabulary::from_words(ckpt.vocabulary));
    manifest.output("vocab", dir / "vocab.txt");
  }
  manifest.seed(ckpt.state.seed);
  manifest.config() = {{"model", model_config_json(ckpt.state.config)}};
  manifest.write(dir);
  out << "wrote W (" << ckpt.state.embedding_dim() << " x " << ckpt.state.vocab_size()
      << ") and T (" << ckpt.state.embedding_dim() << " x " << ckpt.state.num_topics()
      << ") to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic modeling with embedding clustering regularization", "ottopics"};
  app.set_version_flag("--version", OTTOPICS_VERSION);
  app.set_config("--config", "", "TOML or INI file; keys under [train], [eval], ...");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_train_options(train_cmd, train_args);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compute metrics and export topics");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* eval_corpus = eval_cmd->add_option("--corpus", eval_args.corpus, "Raw text corpus");
  auto* eval_bow = eval_cmd->add_option("--bow", eval_args.bow, "Bag-of-words corpus");
  eval_corpus->excludes(eval_bow);
  eval_cmd->add_option("--labels", eval_args.labels, "Integer labels, one per document");
  eval_cmd->add_option("--reference", eval_args.reference, "BoW corpus for NPMI statistics");
  eval_cmd->add_option("--top-n", eval_args.top_n, "Words per topic")->capture_default_str();
  eval_cmd->add_option("--perplexity-samples", eval_args.perplexity_samples,
                       "Noise draws per document (<= 1: deterministic)")
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "Seed for perplexity sampling")
      ->capture_default_str();
  eval_cmd->add_option("--out-dir", eval_args.out_dir, "Output directory")->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("gen-synth", "Generate a synthetic Zipf corpus");
  synth_cmd->add_option("--docs", synth_args.cfg.num_docs, "Number of documents")
      ->capture_default_str();
  synth_cmd->add_option("--vocab-size", synth_args.cfg.vocab_size, "Vocabulary size")
      ->capture_default_str();
  synth_cmd->add_option("--k", synth_args.cfg.num_topics, "Number of planted topics")
      ->capture_default_str();
  synth_cmd->add_option("--doc-len", synth_args.cfg.doc_len, "Tokens per document")
      ->capture_default_str();
  synth_cmd->add_option("--zipf-exponent", synth_args.cfg.zipf_exponent, "Zipf exponent")
      ->capture_default_str();
  synth_cmd->add_option("--head-size", synth_args.cfg.head_size,
                        "Shared head words (0 = vocab-size / 10)")
      ->capture_default_str();
  synth_cmd->add_option("--head-mass", synth_args.cfg.head_mass, "Topic mass on the head")
      ->capture_default_str();
  synth_cmd->add_option("--dominant-weight", synth_args.cfg.dominant_weight,
                        "Probability of the labelled topic per token")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.cfg.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "Output directory")->required();

  GradArgs grad_args;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Check analytic gradients numerically");
  grad_cmd->add_option("--points", grad_args.opt.points, "Random points per loss")
      ->capture_default_str();
  grad_cmd->add_option("--tolerance", grad_args.opt.tolerance, "Relative error bound")
      ->capture_default_str();
  grad_cmd->add_option("--step", grad_args.opt.step, "Finite-difference step")
      ->capture_default_str();
  grad_cmd->add_option("--seed", grad_args.opt.seed, "Random seed")->capture_default_str();
  grad_cmd->add_option("--perturb-loss", grad_args.opt.perturb_loss,
                       "Scale one loss's analytic gradient by 1.01 (fault injection)")
      ->check(CLI::IsMember({"dkm", "dkm-entropy", "ecr", "topic-model", "total"}))
      ->group("Testing");
  grad_cmd->add_option("--out-dir", grad_args.out_dir, "Write a JSON report here");

  ExportArgs export_args;
  auto* export_cmd =
      app.add_subcommand("export-embeddings", "Dump W and T in matrix text format");
  export_cmd->add_option("--checkpoint", export_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--out-dir", export_args.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, *train_cmd, out);
    if (*eval_cmd) return cmd_eval(eval_args, out, err);
    if (*synth_cmd) return cmd_gen_synth(synth_args, out);
    if (*grad_cmd) return cmd_gradcheck(grad_args, out);
    if (*export_cmd) return cmd_export(export_args, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace ottopics::cli
