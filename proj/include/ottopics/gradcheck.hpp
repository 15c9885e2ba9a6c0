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

// Certifies every hand-written gradient against central finite differences
// on small seeded instances (D = 4, V = 12, K = 3, two documents).

#ifndef OTTOPICS_GRADCHECK_HPP_
#define OTTOPICS_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ottopics {

struct GradCheckOptions {
  std::size_t points = 10;
  double tolerance = 1e-4;
  double step = 1e-5;
  std::uint64_t seed = 20240601;
  // Fault injection: scale the analytic gradient of this loss by 1.01.
  std::string perturb_loss;
};

struct GradCheckEntry {
  std::string loss;
  std::string group;
  std::size_t point = 0;
  double relative_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  double tolerance = 0.0;
  std::vector<GradCheckEntry> entries;

  bool passed() const;
  std::vector<std::string> losses() const;
  double max_error(const std::string& loss) const;
};

// Checked losses, in report order.
//   dkm           sum_jk C_jk p_jk                         (W, T)
//   dkm-entropy   sum_jk -p_jk log p_jk                    (W, T)
//   ecr           sum_jk C_jk pi_jk, plan held fixed       (W, T)
//   topic-model   mean reconstruction + KL                 (encoder, W, T)
//   total         topic-model + lambda * ecr, plan fixed   (encoder, W, T)
GradCheckReport run_gradcheck(const GradCheckOptions& options = {});

}  // namespace ottopics

#endif  // OTTOPICS_GRADCHECK_HPP_
