// Copyright 2026 The dptg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPTG_WORD_MECHANISM_H_
#define DPTG_WORD_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dptg/embedding_store.h"
#include "dptg/geometry.h"
#include "dptg/rng.h"

namespace dptg {

// What to do with tokens that have no embedding. Both choices break the
// fixed-length DP guarantee; Ignore is flagged in the budget report.
enum class OovPolicy { kIgnore, kRemove };

std::string OovPolicyName(OovPolicy policy);
absl::StatusOr<OovPolicy> ParseOovPolicy(std::string_view name);

struct MechanismConfig {
  double epsilon = 1.0;  // per word
  Geometry geometry = Geometry::kEuclidean;
  OovPolicy oov_policy = OovPolicy::kIgnore;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

// Privacy accounting for one sentence: n perturbed words cost n * epsilon.
struct BudgetReport {
  double per_word_epsilon = 0.0;
  size_t perturbed_token_count = 0;
  double total_epsilon = 0.0;
  size_t oov_passthrough_count = 0;
  size_t oov_removed_count = 0;
  // Set whenever an OOV token was released unperturbed.
  bool dp_violation = false;
};

BudgetReport MakeBudgetReport(size_t perturbed_tokens, double epsilon,
                              size_t oov_passthrough = 0, size_t oov_removed = 0);

struct Substitution {
  std::string original;
  // Empty when an OOV token was removed.
  std::string replacement;
  // Distance between the original embedding and its noisy copy.
  double distance_moved = 0.0;
  bool oov = false;
};

struct AnonymizedSentence {
  std::vector<std::string> output_tokens;
  std::vector<Substitution> substitutions;
  BudgetReport budget;
};

// Perturbs one in-vocabulary word: phi + eta, then the nearest stored word.
absl::StatusOr<Neighbor> PerturbWord(const EmbeddingStore& store, size_t word_index,
                                     double epsilon, RngStream& rng,
                                     double* distance_moved = nullptr);

// Word-level perturb-and-replace over a token sequence. Deterministic given
// the tokens and the RNG stream.
absl::StatusOr<AnonymizedSentence> AnonymizeSentence(
    std::span<const std::string> tokens, const EmbeddingStore& store,
    const MechanismConfig& config, RngStream& rng);

// Fraction of (token, trial) pairs mapped back onto themselves.
absl::StatusOr<double> SelfSubstitutionRate(const EmbeddingStore& store,
                                            const MechanismConfig& config,
                                            std::span<const std::string> sample_tokens,
                                            size_t trials, RngStream& rng);

}  // namespace dptg

#endif  // DPTG_WORD_MECHANISM_H_
