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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/transport_lp.hpp"
#include "ottopics/corpus.hpp"
#include "ottopics/evaluation.hpp"
#include "ottopics/gradcheck.hpp"
#include "ottopics/model.hpp"
#include "ottopics/sinkhorn.hpp"
#include "ottopics/trainer.hpp"

#ifdef OTTOPICS_HAVE_CLI
#include "cli.hpp"
#endif

using namespace ottopics;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  int id;
  bool pass;
  std::string text;
};
std::vector<Line> lines;

// Lines are printed in criterion order once every check has run.
void report(int id, const char* name, bool pass, const std::string& detail) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d %-28s ", pass ? "PASS" : "FAIL", id, name);
  lines.push_back({id, pass, head + detail});
}

void note(const std::string& text) { lines.back().text += "\n       " + text; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix uniform_cost(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(rows, cols);
  for (double& x : c.data()) x = u(rng);
  return c;
}

// ---- 1 ---------------------------------------------------------------------

void sinkhorn_feasibility() {
  std::mt19937_64 rng(101);
  const Matrix cost = uniform_cost(100, 10, rng);
  const Vector rows(100, 0.01), cols(10, 0.1);
  SinkhornConfig cfg;  // epsilon 0.05, tolerance 0.005, 1000 iterations
  const auto t0 = Clock::now();
  const TransportPlan t = solve({cost, rows, cols}, cfg);
  const double secs = seconds_since(t0);
  double row_err = 0.0, col_err = 0.0;
  for (std::size_t j = 0; j < 100; ++j) {
    double s = 0.0;
    for (double x : t.plan.row(j)) s += x;
    row_err = std::max(row_err, std::abs(s - rows[j]));
  }
  for (std::size_t k = 0; k < 10; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < 100; ++j) s += t.plan(j, k);
    col_err += std::abs(s - cols[k]);
  }
  const bool pass = t.converged && col_err <= 0.005 && row_err <= 1e-12 && secs < 1.0;
  report(1, "sinkhorn feasibility", pass,
         fmt("converged=%d iters=%zu col_l1=%.2e row_max=%.2e time=%.4fs", int(t.converged),
             t.iterations_used, col_err, row_err, secs));
}

// ---- 2 ---------------------------------------------------------------------

void ot_oracle_equivalence() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix cost = uniform_cost(6, 3, rng);
    const Vector rows(6, 1.0 / 6.0);
    Vector cols{w(rng), w(rng), w(rng)};
    const double total = cols[0] + cols[1] + cols[2];
    for (double& c : cols) c /= total;
    const auto lp = testing::solve_transport_lp(Vector(cost.data().begin(), cost.data().end()), 6,
                                                3, rows, cols);
    SinkhornConfig cfg;
    cfg.epsilon = 0.001;
    cfg.stop_tolerance = 1e-9;
    cfg.max_iterations = 100000;
    const TransportPlan t = solve({cost, rows, cols}, cfg);
    const double gap = std::abs(transport_cost(cost, t.plan) - lp.cost) / lp.cost;
    worst = std::max(worst, gap);
    ok = ok && std::isfinite(lp.cost) && gap <= 0.02;
  }
  report(2, "OT oracle equivalence", ok, fmt("20 instances, worst relative gap %.3e", worst));
}

// ---- 3 ---------------------------------------------------------------------

void sparsity() {
  std::mt19937_64 rng(303);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix cost = uniform_cost(100, 10, rng);
    const Vector rows(100, 0.01), cols(10, 0.1);
    std::vector<double> means;
    for (double eps : {1.0, 0.1, 0.05}) {
      SinkhornConfig cfg;
      cfg.epsilon = eps;
      cfg.stop_tolerance = 1e-8;
      cfg.max_iterations = 100000;
      const Vector h = plan_row_entropy(solve({cost, rows, cols}, cfg));
      double m = 0.0;
      for (double x : h) m += x;
      means.push_back(m / double(h.size()));
    }
    ok = ok && means[0] > means[1] && means[1] > means[2];
    if (trial == 0) detail = fmt("instance 0: %.4f > %.4f > %.4f", means[0], means[1], means[2]);
  }
  report(3, "sparsity (row entropy)", ok, detail + ", 5 instances");
}

// ---- 4 ---------------------------------------------------------------------

void gradient_certification() {
  GradCheckOptions opt;
  opt.points = 10;
  opt.tolerance = 1e-4;
  const auto t0 = Clock::now();
  const GradCheckReport r = run_gradcheck(opt);
  const double secs = seconds_since(t0);
  std::string detail;
  for (const auto& loss : r.losses()) detail += fmt("%s=%.1e ", loss.c_str(), r.max_error(loss));
  const bool pass = r.passed() && r.losses().size() == 5 && secs < 30.0;
  report(4, "gradient certification", pass, detail + fmt("time=%.2fs", secs));
}

// ---- 5 ---------------------------------------------------------------------

void kl_identity() {
  const PriorParams prior = make_prior(50, 1.0);
  Vector logvar(50);
  for (std::size_t k = 0; k < 50; ++k) logvar[k] = std::log(prior.sigma0_diag[k]);
  const double kl = kl_term(prior.mu0, logvar, prior);
  const bool exact = std::all_of(prior.sigma0_diag.begin(), prior.sigma0_diag.end(),
                                 [](double s) { return s == 0.98; });
  report(5, "KL identity", std::abs(kl) <= 1e-10 && exact,
         fmt("kl(prior, prior)=%.1e sigma0_kk=0.98 exactly: %s", kl, exact ? "yes" : "no"));
}

// ---- 6, 7, 10 --------------------------------------------------------------

struct RunSummary {
  double td = 0, min_dist = 0, purity = 0, nmi = 0, first_loss = 0, final_loss = 0, ppl = 0;
  ModelState state;
};

struct Bench {
  SyntheticCorpus synth;
  ModelConfig model;
  TrainConfig train;
};

Bench make_bench() {
  Bench b;
  ZipfCorpusConfig zc;  // 500 docs, V = 200, K = 10
  zc.seed = 7;
  b.synth = generate_zipf_corpus(zc);
  b.model.num_topics = 10;
  b.model.embedding_dim = 50;
  b.model.hidden_size = 100;
  b.model.init_std = 0.3;
  b.model.tau = 0.05;
  b.train.epochs = 200;
  b.train.batch_size = 50;
  b.train.learning_rate = 1e-2;
  b.train.seed = 1;
  return b;
}

RunSummary run(const Bench& b, RegularizerKind kind, double lambda) {
  ModelConfig mc = b.model;
  mc.regularizer = kind;
  mc.lambda_ecr = lambda;
  TrainResult r = train(b.synth.corpus, b.train, mc);
  RunSummary s;
  const TopicSet topics = extract_topics(r.state, 15);
  const ClusteringResult clusters = cluster_documents(b.synth.corpus, r.state);
  s.td = topic_diversity(topics);
  s.min_dist = min_topic_distance(r.state);
  s.purity = purity(clusters);
  s.nmi = nmi(clusters);
  s.first_loss = r.history.front().mean_loss;
  s.final_loss = r.history.back().mean_loss;
  s.ppl = perplexity(b.synth.corpus, r.state);
  s.state = std::move(r.state);
  return s;
}

// Best TD over the lambda grid; ties keep the smaller lambda.
std::pair<double, RunSummary> tuned(const Bench& b, RegularizerKind kind, std::string& log) {
  std::pair<double, RunSummary> best{0.0, {}};
  best.second.td = -1.0;
  for (double lambda : {1.0, 10.0, 100.0}) {
    RunSummary s = run(b, kind, lambda);
    log += fmt("%s(%g)=%.3f ", std::string(to_string(kind)).c_str(), lambda, s.td);
    if (s.td > best.second.td) best = {lambda, std::move(s)};
  }
  return best;
}

void reproduction(const Bench& bench) {
  const auto t0 = Clock::now();
  std::string log;
  const auto [ecr_lambda, ecr] = tuned(bench, RegularizerKind::kEcr, log);
  const RunSummary none = run(bench, RegularizerKind::kNone, 0.0);
  const double secs6 = seconds_since(t0);

  const bool a = ecr.td >= 0.9;
  const bool b = none.td < ecr.td;
  const bool c = ecr.min_dist > none.min_dist;
  const bool d = ecr.purity >= none.purity;
  report(6, "anti-collapse reproduction", a && b && c && d && secs6 < 600.0,
         fmt("(a) best ECR lambda=%g TD=%.3f %s; (b) w/o ECR TD=%.3f %s; (c) min topic dist "
             "%.4f vs %.4f %s; (d) purity %.3f vs %.3f %s; time=%.0fs",
             ecr_lambda, ecr.td, a ? "ok" : "FAIL", none.td, b ? "ok" : "FAIL", ecr.min_dist,
             none.min_dist, c ? "ok" : "FAIL", ecr.purity, none.purity, d ? "ok" : "FAIL", secs6));
  note("grid: " + log);

  std::string ablog;
  const auto dkm = tuned(bench, RegularizerKind::kDkm, ablog);
  const auto dkme = tuned(bench, RegularizerKind::kDkmEntropy, ablog);
  report(7, "ablation direction", dkm.second.td < ecr.td && dkme.second.td < ecr.td,
         fmt("best TD: dkm=%.3f dkm-entropy=%.3f ecr=%.3f", dkm.second.td, dkme.second.td,
             ecr.td));
  note("grid: " + ablog);

  ModelConfig mc = bench.model;
  mc.lambda_ecr = ecr_lambda;
  const ModelState untrained = init_model(bench.synth.corpus.vocab_size, mc, bench.train.seed);
  const double ppl0 = perplexity(bench.synth.corpus, untrained);
  report(10, "training sanity", ecr.final_loss < ecr.first_loss && ecr.ppl < ppl0,
         fmt("loss %.2f -> %.2f; perplexity %.1f -> %.1f", ecr.first_loss, ecr.final_loss, ppl0,
             ecr.ppl));
}

// ---- 8 ---------------------------------------------------------------------

TopicSet topic_set(std::vector<std::vector<std::size_t>> lists) {
  TopicSet t;
  t.topics = std::move(lists);
  return t;
}

void metric_oracles() {
  std::vector<std::string> bad;
  auto expect = [&](const char* what, double got, double want) {
    if (!(std::abs(got - want) <= 1e-9)) bad.push_back(fmt("%s=%.12g want %.12g", what, got, want));
  };
  // TD: disjoint lists, K identical lists (1/K), and 10 unique words of 12.
  expect("td_disjoint", topic_diversity(topic_set({{0, 1, 2}, {3, 4, 5}, {6, 7, 8}})), 1.0);
  expect("td_identical", topic_diversity(topic_set({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}})),
         0.25);
  expect("td_partial", topic_diversity(topic_set({{0, 1, 2, 3}, {0, 1, 4, 5}, {6, 7, 8, 9}})),
         10.0 / 12.0);
  // Purity: clusters {0,1,2,9}, {3,4,5,6}, {7,8}; majorities 3 + 3 + 2 of 10.
  expect("purity", purity({{0, 0, 0, 1, 1, 1, 1, 2, 2, 0}, {0, 0, 0, 0, 1, 1, 1, 2, 2, 2}}), 0.8);
  // NMI on the contingency table [[5, 1], [1, 5]]: both entropies are ln 2.
  {
    std::vector<std::size_t> assign;
    std::vector<int> labels;
    const int table[2][2] = {{5, 1}, {1, 5}};
    for (int c = 0; c < 2; ++c)
      for (int l = 0; l < 2; ++l)
        for (int i = 0; i < table[c][l]; ++i) {
          assign.push_back(std::size_t(c));
          labels.push_back(l);
        }
    const double mi = (5.0 / 6.0) * std::log(5.0 / 3.0) + (1.0 / 6.0) * std::log(1.0 / 3.0);
    expect("nmi", nmi({assign, labels}), mi / std::log(2.0));
  }
  // NPMI on six documents {0,1} {0,1,2} {0,2} {1,3} {2,3} {0,3}: pairs (0,1) and
  // (0,2) are independent (0); the other pairs co-occur once among words of
  // df 3, giving ln(2/3) / ln 6.
  {
    BowCorpus ref;
    ref.vocab_size = 4;
    for (const std::vector<std::uint32_t>& doc :
         std::vector<std::vector<std::uint32_t>>{{0, 1}, {0, 1, 2}, {0, 2}, {1, 3}, {2, 3}, {0, 3}}) {
      std::vector<BowEntry> row;
      for (auto w : doc) row.push_back({w, 1});
      ref.rows.push_back(row);
    }
    const double weak = std::log(2.0 / 3.0) / std::log(6.0);
    const NpmiResult r = npmi_coherence(topic_set({{0, 1, 2}, {3, 2, 1}}), ref);
    expect("npmi_topic0", r.per_topic.at(0), weak / 3.0);
    expect("npmi_topic1", r.per_topic.at(1), weak);
    expect("npmi_mean", r.mean, (weak / 3.0 + weak) / 2.0);
  }
  std::string detail = "td, purity, nmi, npmi within 1e-9";
  for (const auto& s : bad) detail += "; " + s;
  report(8, "metric oracles", bad.empty(), detail);
}

// ---- 9 ---------------------------------------------------------------------

#ifdef OTTOPICS_HAVE_CLI
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(const std::string& workdir) {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(workdir) / "determinism";
  fs::remove_all(root);
  std::ostringstream out, err;
  int code = cli::run({"gen-synth", "--seed", "7", "--out-dir", (root / "synth").string()}, out, err);
  std::vector<std::string> base = {"train", "--bow", (root / "synth" / "synth.bow").string(),
                                   "--k", "10", "--dim", "50", "--hidden", "100", "--init-std",
                                   "0.3", "--tau", "0.05", "--lambda-ecr", "1", "--epochs", "200",
                                   "--batch-size", "50", "--lr", "0.01", "--seed", "1", "--quiet"};
  for (const char* run : {"a", "b"}) {
    if (code != 0) break;
    auto args = base;
    args.insert(args.end(), {"--out-dir", (root / run).string()});
    code = cli::run(args, out, err);
  }
  const bool ckpt = code == 0 && slurp(root / "a" / "model.ckpt") == slurp(root / "b" / "model.ckpt");
  const bool csv = code == 0 && slurp(root / "a" / "history.csv") == slurp(root / "b" / "history.csv");
  report(9, "determinism", code == 0 && ckpt && csv,
         fmt("exit=%d checkpoint identical=%s history identical=%s (%zu bytes)", code,
             ckpt ? "yes" : "no", csv ? "yes" : "no", slurp(root / "a" / "model.ckpt").size()) +
             (err.str().empty() ? "" : " stderr: " + err.str()));
}
#endif

}  // namespace

int main(int argc, char** argv) {
  const std::string workdir = argc > 1 ? argv[1] : OTTOPICS_TEST_TMPDIR;
  sinkhorn_feasibility();
  ot_oracle_equivalence();
  sparsity();
  gradient_certification();
  kl_identity();
  const Bench bench = make_bench();
  reproduction(bench);
  metric_oracles();
#ifdef OTTOPICS_HAVE_CLI
  determinism(workdir);
#else
  report(9, "determinism", false, "the CLI was not built");
#endif
  std::stable_sort(lines.begin(), lines.end(),
                   [](const Line& a, const Line& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& l : lines) {
    std::printf("%s\n", l.text.c_str());
    failures += l.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, lines.size());
  return failures == 0 ? 0 : 1;
}
