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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ottopics/checkpoint.hpp"
#include "ottopics/corpus.hpp"
#include "ottopics/errors.hpp"
#include "ottopics/evaluation.hpp"
#include "ottopics/gradcheck.hpp"
#include "ottopics/model.hpp"
#include "ottopics/regularizers.hpp"
#include "ottopics/sinkhorn.hpp"
#include "ottopics/trainer.hpp"

namespace py = pybind11;
using namespace ottopics;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  const auto* p = a.data();
  return Matrix(std::size_t(a.shape(0)), std::size_t(a.shape(1)),
                Vector(p, p + a.size()));
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw ShapeError("expected a 1-d array");
  return Vector(a.data(), a.data() + a.size());
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array from_vector(const Vector& v) {
  Array out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict plan_dict(const TransportPlan& t) {
  py::dict d;
  d["plan"] = from_matrix(t.plan);
  d["iterations"] = t.iterations_used;
  d["marginal_error"] = t.marginal_error;
  d["converged"] = t.converged;
  d["cost_scale"] = t.cost_scale;
  return d;
}

py::tuple reg_tuple(const RegularizerOutput& r) {
  return py::make_tuple(r.loss, from_matrix(r.grad_w), from_matrix(r.grad_t));
}

TopicSet to_topics(const std::vector<std::vector<std::size_t>>& lists) {
  TopicSet t;
  t.topics = lists;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topic modeling with embedding clustering regularization";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  // ---- sinkhorn and regularizers ----
  m.def(
      "sinkhorn",
      [](const Array& cost, const Array& rows, const Array& cols, double epsilon, double tol,
         std::size_t max_iter) {
        SinkhornConfig cfg{max_iter, tol, epsilon};
        TransportPlan t;
        {
          OtProblem p{to_matrix(cost), to_vector(rows), to_vector(cols)};
          py::gil_scoped_release release;
          t = solve(p, cfg);
        }
        return plan_dict(t);
      },
      py::arg("cost"), py::arg("row_weights"), py::arg("col_weights"), py::arg("epsilon") = 0.05,
      py::arg("tol") = 0.005, py::arg("max_iter") = 1000);
  m.def(
      "transport_cost",
      [](const Array& cost, const Array& plan) {
        return transport_cost(to_matrix(cost), to_matrix(plan));
      },
      py::arg("cost"), py::arg("plan"));
  m.def(
      "ecr_loss",
      [](const Array& w, const Array& t, double epsilon) {
        const Matrix tm = to_matrix(t);
        SinkhornConfig cfg;
        cfg.epsilon = epsilon;
        return reg_tuple(ecr_loss(to_matrix(w), tm, ClusterSizeSpec::uniform(tm.cols()), cfg));
      },
      py::arg("w"), py::arg("t"), py::arg("epsilon") = 0.05,
      "Returns (loss, grad_w, grad_t) under uniform cluster sizes.");
  m.def(
      "dkm_loss",
      [](const Array& w, const Array& t, double tau) {
        return reg_tuple(dkm_loss(to_matrix(w), to_matrix(t), tau));
      },
      py::arg("w"), py::arg("t"), py::arg("tau") = 1.0);
  m.def(
      "dkm_entropy_loss",
      [](const Array& w, const Array& t, double tau, double weight) {
        return reg_tuple(dkm_entropy_loss(to_matrix(w), to_matrix(t), tau, weight));
      },
      py::arg("w"), py::arg("t"), py::arg("tau") = 1.0, py::arg("entropy_weight") = 1.0);
  m.def(
      "compute_beta",
      [](const Array& w, const Array& t, double tau) {
        return from_matrix(compute_beta(to_matrix(w), to_matrix(t), tau));
      },
      py::arg("w"), py::arg("t"), py::arg("tau") = 1.0);

  // ---- corpus ----
  py::class_<BowCorpus>(m, "BowCorpus")
      .def_property_readonly("vocab_size", [](const BowCorpus& c) { return c.vocab_size; })
      .def_property_readonly("num_docs", &BowCorpus::num_docs)
      .def_property_readonly("total_tokens", &BowCorpus::total_tokens)
      .def_property(
          "labels", [](const BowCorpus& c) { return c.labels; },
          [](BowCorpus& c, std::optional<std::vector<int>> l) { c.labels = std::move(l); })
      .def("document",
           [](const BowCorpus& c, std::size_t d) {
             std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
             for (const auto& e : c.rows.at(d)) out.emplace_back(e.index, e.count);
             return out;
           })
      .def("to_dense",
           [](const BowCorpus& c) {
             Array out({c.num_docs(), c.vocab_size});
             std::fill(out.mutable_data(), out.mutable_data() + out.size(), 0.0);
             for (std::size_t d = 0; d < c.num_docs(); ++d)
               for (const auto& e : c.rows[d]) out.mutable_at(d, e.index) = e.count;
             return out;
           })
      .def("save", [](const BowCorpus& c, const std::string& path) { write_bow_file(path, c); })
      .def_static("load", &read_bow_file)
      .def("__len__", &BowCorpus::num_docs)
      .def("__eq__", [](const BowCorpus& a, const BowCorpus& b) { return a == b; });

  m.def(
      "corpus_from_dense",
      [](const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& counts,
         std::optional<std::vector<int>> labels) {
        if (counts.ndim() != 2) throw ShapeError("expected a 2-d count array");
        BowCorpus c;
        c.vocab_size = std::size_t(counts.shape(1));
        for (py::ssize_t d = 0; d < counts.shape(0); ++d) {
          std::vector<BowEntry> row;
          for (py::ssize_t j = 0; j < counts.shape(1); ++j) {
            const auto n = counts.at(d, j);
            if (n < 0) throw ValidationError("counts must be nonnegative");
            if (n > 0) row.push_back({std::uint32_t(j), std::uint32_t(n)});
          }
          c.rows.push_back(std::move(row));
        }
        c.labels = std::move(labels);
        c.validate();
        return c;
      },
      py::arg("counts"), py::arg("labels") = py::none());

  m.def(
      "generate_zipf_corpus",
      [](std::size_t num_docs, std::size_t vocab_size, std::size_t num_topics, std::size_t doc_len,
         double zipf_exponent, std::uint64_t seed, std::size_t head_size, double head_mass,
         double dominant_weight) {
        ZipfCorpusConfig cfg{num_docs, vocab_size, num_topics, doc_len, zipf_exponent,
                             seed,     head_size,  head_mass,  dominant_weight};
        SyntheticCorpus s = generate_zipf_corpus(cfg);
        return py::make_tuple(std::move(s.corpus), from_matrix(s.planted_beta));
      },
      py::arg("num_docs") = 500, py::arg("vocab_size") = 200, py::arg("num_topics") = 10,
      py::arg("doc_len") = 60, py::arg("zipf_exponent") = 1.0, py::arg("seed") = 0,
      py::arg("head_size") = 0, py::arg("head_mass") = 0.3, py::arg("dominant_weight") = 0.8,
      "Returns (corpus, planted_beta) with planted_beta of shape (V, K).");

  m.def(
      "build_corpus",
      [](const std::vector<std::string>& docs, std::size_t vocab_size, double max_df,
         std::optional<double> min_df, std::optional<std::vector<int>> labels) {
        PreprocessConfig pre;
        pre.vocab_size = vocab_size;
        pre.max_df = max_df;
        pre.min_df = min_df;
        const TokenizedCorpus tok = preprocess(docs, pre);
        const Vocabulary vocab = build_vocab(tok.docs, pre);
        std::optional<std::vector<int>> kept;
        if (labels) {
          if (labels->size() != docs.size()) throw ValidationError("one label per document");
          kept.emplace();
          for (std::size_t i : tok.source_index) kept->push_back((*labels)[i]);
        }
        std::optional<std::span<const int>> span;
        if (kept) span = std::span<const int>(*kept);
        VectorizeResult vr = vectorize(tok.docs, vocab, span);
        return py::make_tuple(std::move(vr.corpus), vocab.words());
      },
      py::arg("docs"), py::arg("vocab_size") = 5000, py::arg("max_df") = 1.0,
      py::arg("min_df") = py::none(), py::arg("labels") = py::none(),
      "Preprocesses raw text; returns (corpus, vocabulary words).");

  // ---- model ----
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("num_topics", &ModelConfig::num_topics)
      .def_readwrite("embedding_dim", &ModelConfig::embedding_dim)
      .def_readwrite("hidden_size", &ModelConfig::hidden_size)
      .def_readwrite("tau", &ModelConfig::tau)
      .def_readwrite("lambda_ecr", &ModelConfig::lambda_ecr)
      .def_property(
          "regularizer", [](const ModelConfig& c) { return std::string(to_string(c.regularizer)); },
          [](ModelConfig& c, const std::string& s) { c.regularizer = parse_regularizer(s); })
      .def_readwrite("entropy_weight", &ModelConfig::entropy_weight)
      .def_readwrite("alpha", &ModelConfig::alpha)
      .def_readwrite("init_std", &ModelConfig::init_std)
      .def_property(
          "epsilon", [](const ModelConfig& c) { return c.sinkhorn.epsilon; },
          [](ModelConfig& c, double v) { c.sinkhorn.epsilon = v; })
      .def_property(
          "sinkhorn_tol", [](const ModelConfig& c) { return c.sinkhorn.stop_tolerance; },
          [](ModelConfig& c, double v) { c.sinkhorn.stop_tolerance = v; })
      .def_property(
          "sinkhorn_max_iter", [](const ModelConfig& c) { return c.sinkhorn.max_iterations; },
          [](ModelConfig& c, std::size_t v) { c.sinkhorn.max_iterations = v; })
      .def("validate", &ModelConfig::validate);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("seed", &TrainConfig::seed)
      .def("validate", &TrainConfig::validate);

  py::class_<ModelState>(m, "ModelState")
      .def_property_readonly("vocab_size", &ModelState::vocab_size)
      .def_property_readonly("num_topics", &ModelState::num_topics)
      .def_property_readonly("embedding_dim", &ModelState::embedding_dim)
      .def_readonly("seed", &ModelState::seed)
      .def_readonly("config", &ModelState::config)
      .def_property_readonly(
          "word_embeddings", [](const ModelState& s) { return from_matrix(s.params.word_embeddings); })
      .def_property_readonly(
          "topic_embeddings",
          [](const ModelState& s) { return from_matrix(s.params.topic_embeddings); })
      .def("beta",
           [](const ModelState& s) {
             return from_matrix(compute_beta(s.params.word_embeddings, s.params.topic_embeddings,
                                             s.config.tau));
           })
      .def("theta",
           [](const ModelState& s, const BowCorpus& c) {
             Matrix out(c.num_docs(), s.num_topics());
             const Vector zero(s.num_topics(), 0.0);
             for (std::size_t d = 0; d < c.num_docs(); ++d) {
               const EncoderOutput e = encode(c.rows[d], s.params.encoder);
               const Vector th = reparameterize(e.mu, e.logvar, zero);
               std::copy(th.begin(), th.end(), out.row(d).begin());
             }
             return from_matrix(out);
           },
           "Zero-noise doc-topic proportions, one row per document.")
      .def("save",
           [](const ModelState& s, const std::string& path, std::vector<std::string> vocab) {
             save_checkpoint_file(path, {s, std::nullopt, std::move(vocab)});
           },
           py::arg("path"), py::arg("vocabulary") = std::vector<std::string>{})
      .def_static(
          "load", [](const std::string& path) { return load_checkpoint_file(path).state; });

  m.def("init_model", [](std::size_t v, const ModelConfig& cfg, std::uint64_t seed) {
    return init_model(v, cfg, seed);
  }, py::arg("vocab_size"), py::arg("config"), py::arg("seed") = 0);

  m.def(
      "train",
      [](const BowCorpus& corpus, const TrainConfig& tc, const ModelConfig& mc,
         std::function<void(py::dict)> on_epoch) {
        TrainHooks hooks;
        if (on_epoch) {
          hooks.on_epoch = [&](const EpochStats& s) {
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["epoch"] = s.epoch;
            d["mean_loss"] = s.mean_loss;
            d["ecr_loss"] = s.ecr_loss;
            d["marginal_error"] = s.marginal_error;
            on_epoch(d);
          };
        }
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(corpus, tc, mc, std::nullopt, hooks);
        }
        py::list history;
        for (const auto& s : r.history) {
          py::dict d;
          d["epoch"] = s.epoch;
          d["mean_loss"] = s.mean_loss;
          d["ecr_loss"] = s.ecr_loss;
          d["marginal_error"] = s.marginal_error;
          history.append(d);
        }
        return py::make_tuple(std::move(r.state), history);
      },
      py::arg("corpus"), py::arg("train_config"), py::arg("model_config"),
      py::arg("on_epoch") = nullptr, "Returns (state, history).");

  m.def("make_prior", [](std::size_t k, double alpha) {
    const PriorParams p = make_prior(k, alpha);
    return py::make_tuple(from_vector(p.mu0), from_vector(p.sigma0_diag));
  }, py::arg("num_topics"), py::arg("alpha") = 1.0, "Returns (mu0, sigma0_diag).");

  // ---- evaluation ----
  m.def(
      "extract_topics",
      [](const ModelState& s, std::size_t n) { return extract_topics(s, n).topics; },
      py::arg("state"), py::arg("top_n") = 15);
  m.def(
      "topic_diversity",
      [](const std::vector<std::vector<std::size_t>>& t) { return topic_diversity(to_topics(t)); },
      py::arg("topics"));
  m.def(
      "npmi",
      [](const std::vector<std::vector<std::size_t>>& t, const BowCorpus& ref) {
        const NpmiResult r = npmi_coherence(to_topics(t), ref);
        return py::make_tuple(r.mean, r.per_topic);
      },
      py::arg("topics"), py::arg("reference"), "Returns (mean, per_topic).");
  m.def(
      "purity",
      [](std::vector<std::size_t> assignments, std::vector<int> labels) {
        return purity({std::move(assignments), std::move(labels)});
      },
      py::arg("assignments"), py::arg("labels"));
  m.def(
      "nmi",
      [](std::vector<std::size_t> assignments, std::vector<int> labels) {
        return nmi({std::move(assignments), std::move(labels)});
      },
      py::arg("assignments"), py::arg("labels"));
  m.def(
      "cluster_documents",
      [](const BowCorpus& c, const ModelState& s) { return cluster_documents(c, s).assignments; },
      py::arg("corpus"), py::arg("state"));
  m.def("perplexity", &perplexity, py::arg("corpus"), py::arg("state"),
        py::arg("samples_per_doc") = 1, py::arg("seed") = 0);
  m.def("min_topic_distance", &min_topic_distance, py::arg("state"));

  m.def(
      "gradcheck",
      [](std::size_t points, double tolerance, std::uint64_t seed) {
        GradCheckOptions opt;
        opt.points = points;
        opt.tolerance = tolerance;
        opt.seed = seed;
        const GradCheckReport r = run_gradcheck(opt);
        py::dict worst;
        for (const auto& loss : r.losses()) worst[py::str(loss)] = r.max_error(loss);
        return py::make_tuple(r.passed(), worst);
      },
      py::arg("points") = 10, py::arg("tolerance") = 1e-4, py::arg("seed") = 20240601,
      "Returns (passed, {loss: max relative error}).");
}
