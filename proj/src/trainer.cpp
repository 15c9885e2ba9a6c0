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

#include "ottopics/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ottopics/errors.hpp"

namespace ottopics {

void TrainConfig::validate() const {
  std::vector<std::string> problems;
  if (epochs < 1) problems.push_back("epochs must be at least 1");
  if (batch_size < 1) problems.push_back("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) problems.push_back("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) problems.push_back("adam_beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) problems.push_back("adam_beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) problems.push_back("adam_eps must be positive");
  if (!problems.empty()) {
    std::string msg = "invalid training config: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw ValidationError(msg);
  }
}

void adam_step(std::span<const ParamGroup> groups, AdamState& state, const AdamConfig& cfg) {
  if (state.first_moment.empty()) {
    for (const auto& g : groups) {
      state.first_moment.emplace_back(g.value.size(), 0.0);
      state.second_moment.emplace_back(g.value.size(), 0.0);
    }
  }
  if (state.first_moment.size() != groups.size()) throw ShapeError("adam: parameter group count changed");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    if (g.grad.size() != g.value.size() || state.first_moment[i].size() != g.value.size()) {
      throw ShapeError("adam: shape mismatch in " + std::string(g.name));
    }
    for (double x : g.grad) {
      if (!std::isfinite(x)) throw NumericError("adam: non-finite gradient in " + std::string(g.name));
    }
  }
  ++state.step;
  const double t = double(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    const auto& g = groups[i];
    for (std::size_t j = 0; j < g.value.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g.grad[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g.grad[j] * g.grad[j];
      g.value[j] -= cfg.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
    }
  }
}

void adam_step(Parameters& params, const Parameters& grads, AdamState& state,
               const AdamConfig& cfg) {
  std::vector<ParamGroup> groups;
  params.for_each([&groups](std::string_view name, std::span<double> v) {
    groups.push_back({name, v, {}});
  });
  std::size_t i = 0;
  grads.for_each([&](std::string_view, std::span<const double> g) { groups[i++].grad = g; });
  adam_step(groups, state, cfg);
}

namespace {

// Training draws from a stream separate from the one used for
// initialization so that changing the epoch count does not move the
// initial parameters.
constexpr std::uint64_t kTrainStreamSalt = 0x9E3779B97F4A7C15ull;

}  // namespace

TrainResult train_from(ModelState state, const BowCorpus& corpus, const TrainConfig& cfg,
                       const TrainHooks& hooks) {
  cfg.validate();
  state.config.validate();
  state.validate();
  corpus.validate();
  if (corpus.num_docs() == 0) throw ValidationError("train: empty corpus");
  if (corpus.vocab_size != state.vocab_size()) {
    throw ValidationError("train: corpus vocabulary size differs from the model's");
  }

  const std::size_t topics = state.num_topics();
  std::mt19937_64 rng(cfg.seed ^ kTrainStreamSalt);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> order(corpus.num_docs());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const AdamConfig adam = AdamConfig::from(cfg);
  AdamState adam_state;

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0, reg_sum = 0.0, marg_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      Matrix noise(batch.size(), topics);
      for (double& x : noise.data()) x = normal(rng);
      LossResult loss;
      try {
        loss = total_loss(corpus, batch, state, noise);
      } catch (const StabilityError& e) {
        throw StabilityError("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batches + 1) + ": " + e.what());
      }
      adam_step(state.params, loss.grads, adam_state, adam);
      loss_sum += loss.total * double(batch.size());
      reg_sum += loss.regularizer;
      if (loss.transport) marg_sum += loss.transport->marginal_error;
      ++batches;
    }
    if (!state.params.all_finite()) {
      throw NumericError("train: parameters became non-finite in epoch " + std::to_string(epoch));
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / double(order.size());
    stats.ecr_loss = reg_sum / double(batches);
    stats.marginal_error = marg_sum / double(batches);
    result.history.push_back(stats);
    if (hooks.on_epoch) hooks.on_epoch(stats);
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
      hooks.on_checkpoint(state, epoch);
    }
  }
  result.state = std::move(state);
  return result;
}

TrainResult train(const BowCorpus& corpus, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const std::optional<Matrix>& pretrained, const TrainHooks& hooks) {
  cfg.validate();
  model_cfg.validate();
  return train_from(init_model(corpus.vocab_size, model_cfg, cfg.seed, pretrained), corpus, cfg,
                    hooks);
}

std::string history_csv(std::span<const EpochStats> history) {
  std::ostringstream os;
  os << "epoch,mean_loss,ecr_loss,marginal_error\n";
  char buf[128];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", h.epoch, h.mean_loss, h.ecr_loss,
                  h.marginal_error);
    os << buf;
  }
  return os.str();
}

void write_history_csv(const std::string& path, std::span<const EpochStats> history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << history_csv(history);
}

}  // namespace ottopics
