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

// Versioned text checkpoints. Doubles are written in shortest round-trip
// form, so save followed by load reproduces every parameter bit for bit.
//
//   ottopics-checkpoint 1
//   <key> <value>                 scalars: seed, config.*, train.*, prior.alpha
//   tensor <name> <rows> <cols>   followed by `rows` lines of values
//   vocab <n>                     followed by n words, one per line
//   end

#ifndef OTTOPICS_CHECKPOINT_HPP_
#define OTTOPICS_CHECKPOINT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ottopics/corpus.hpp"
#include "ottopics/model.hpp"
#include "ottopics/trainer.hpp"

namespace ottopics {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelState state;
  std::optional<TrainConfig> train;
  std::vector<std::string> vocabulary;  // empty when unknown
};

void save_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& is);
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

// Reads "word v1 ... vD" lines and returns a D x V matrix aligned with
// `vocab`. Vocabulary words missing from the file get N(0, init_std) columns
// drawn from `seed`. Throws IoError on ragged rows or when no vocabulary word
// is found.
Matrix load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                  double init_std, std::uint64_t seed);

}  // namespace ottopics

#endif  // OTTOPICS_CHECKPOINT_HPP_
