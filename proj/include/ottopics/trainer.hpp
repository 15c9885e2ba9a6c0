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

#ifndef OTTOPICS_TRAINER_HPP_
#define OTTOPICS_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ottopics/corpus.hpp"
#include "ottopics/model.hpp"

namespace ottopics {

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 200;
  double learning_rate = 2e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  // Epochs between checkpoint callbacks; 0 disables them.
  std::size_t checkpoint_every = 0;

  // Throws ValidationError listing every violated constraint.
  void validate() const;
};

struct AdamConfig {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamConfig from(const TrainConfig& cfg) {
    return {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  }
};

struct AdamState {
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
  std::uint64_t step = 0;
};

struct ParamGroup {
  std::string_view name;
  std::span<double> value;
  std::span<const double> grad;
};

// Bias-corrected Adam. Moments are created on the first call. Throws
// NumericError naming the group if any gradient entry is non-finite; no
// parameter is modified in that case.
void adam_step(std::span<const ParamGroup> groups, AdamState& state, const AdamConfig& cfg);
void adam_step(Parameters& params, const Parameters& grads, AdamState& state,
               const AdamConfig& cfg);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double ecr_loss = 0.0;        // mean unweighted regularizer value
  double marginal_error = 0.0;  // mean Sinkhorn column deviation (0 without ECR)
};

struct TrainResult {
  ModelState state;
  std::vector<EpochStats> history;
};

struct TrainHooks {
  std::function<void(const EpochStats&)> on_epoch;
  // Called every checkpoint_every epochs with the current state.
  std::function<void(const ModelState&, std::size_t epoch)> on_checkpoint;
};

// Shuffles document order each epoch and draws reparameterization noise from
// one generator seeded by cfg.seed; the model is initialized from the same
// seed. Identical inputs give bit-identical results.
TrainResult train(const BowCorpus& corpus, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const std::optional<Matrix>& pretrained = std::nullopt,
                  const TrainHooks& hooks = {});
// Continues from an existing state.
TrainResult train_from(ModelState state, const BowCorpus& corpus, const TrainConfig& cfg,
                       const TrainHooks& hooks = {});

// CSV with header "epoch,mean_loss,ecr_loss,marginal_error".
void write_history_csv(const std::string& path, std::span<const EpochStats> history);
std::string history_csv(std::span<const EpochStats> history);

}  // namespace ottopics

#endif  // OTTOPICS_TRAINER_HPP_
