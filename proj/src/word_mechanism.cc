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

#include "dptg/word_mechanism.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dptg/noise.h"
#include "dptg/status_macros.h"

namespace dptg {

std::string OovPolicyName(OovPolicy policy) {
  return policy == OovPolicy::kIgnore ? "ignore" : "remove";
}

absl::StatusOr<OovPolicy> ParseOovPolicy(std::string_view name) {
  if (name == "ignore") return OovPolicy::kIgnore;
  if (name == "remove") return OovPolicy::kRemove;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown OOV policy '", std::string(name), "' (expected ignore, remove)"));
}

absl::Status MechanismConfig::Validate() const {
  if (!(epsilon > 0.0) || std::isnan(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  return absl::OkStatus();
}

BudgetReport MakeBudgetReport(size_t perturbed_tokens, double epsilon,
                              size_t oov_passthrough, size_t oov_removed) {
  BudgetReport report;
  report.per_word_epsilon = epsilon;
  report.perturbed_token_count = perturbed_tokens;
  report.total_epsilon = epsilon * static_cast<double>(perturbed_tokens);
  report.oov_passthrough_count = oov_passthrough;
  report.oov_removed_count = oov_removed;
  report.dp_violation = oov_passthrough > 0;
  return report;
}

absl::StatusOr<Neighbor> PerturbWord(const EmbeddingStore& store, size_t word_index,
                                     double epsilon, RngStream& rng,
                                     double* distance_moved) {
  DPTG_ASSIGN_OR_RETURN(NoiseSpec spec,
                        NoiseSpec::Create(epsilon, store.dim(), store.geometry()));
  const std::span<const double> phi = store.row(word_index);
  DPTG_ASSIGN_OR_RETURN(std::vector<double> noisy, PerturbEmbedding(spec, phi, rng));
  if (distance_moved != nullptr) {
    DPTG_ASSIGN_OR_RETURN(*distance_moved, store.Distance(phi, noisy));
  }
  return store.NearestNeighbor(noisy);
}

absl::StatusOr<AnonymizedSentence> AnonymizeSentence(
    std::span<const std::string> tokens, const EmbeddingStore& store,
    const MechanismConfig& config, RngStream& rng) {
  DPTG_RETURN_IF_ERROR(config.Validate());
  if (tokens.empty()) return absl::InvalidArgumentError("empty token sequence");
  if (store.geometry() != config.geometry) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mechanism geometry ", GeometryName(config.geometry),
        " does not match store geometry ", GeometryName(store.geometry())));
  }
  AnonymizedSentence result;
  result.output_tokens.reserve(tokens.size());
  result.substitutions.reserve(tokens.size());
  size_t perturbed = 0, passthrough = 0, removed = 0;
  for (const std::string& token : tokens) {
    const std::optional<size_t> index = store.IndexOf(token);
    if (!index.has_value()) {
      Substitution sub{token, "", 0.0, true};
      if (config.oov_policy == OovPolicy::kIgnore) {
        sub.replacement = token;
        result.output_tokens.push_back(token);
        ++passthrough;
      } else {
        ++removed;
      }
      result.substitutions.push_back(std::move(sub));
      continue;
    }
    double moved = 0.0;
    DPTG_ASSIGN_OR_RETURN(Neighbor nn,
                          PerturbWord(store, *index, config.epsilon, rng, &moved));
    result.output_tokens.push_back(store.word(nn.index));
    result.substitutions.push_back({token, store.word(nn.index), moved, false});
    ++perturbed;
  }
  result.budget = MakeBudgetReport(perturbed, config.epsilon, passthrough, removed);
  return result;
}

absl::StatusOr<double> SelfSubstitutionRate(const EmbeddingStore& store,
                                            const MechanismConfig& config,
                                            std::span<const std::string> sample_tokens,
                                            size_t trials, RngStream& rng) {
  DPTG_RETURN_IF_ERROR(config.Validate());
  if (sample_tokens.empty() || trials == 0) {
    return absl::InvalidArgumentError("need at least one token and one trial");
  }
  std::vector<size_t> indices;
  indices.reserve(sample_tokens.size());
  for (const std::string& token : sample_tokens) {
    auto index = store.IndexOf(token);
    if (!index.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample token '", token, "' is out of vocabulary"));
    }
    indices.push_back(*index);
  }
  size_t same = 0;
  for (size_t index : indices) {
    for (size_t t = 0; t < trials; ++t) {
      DPTG_ASSIGN_OR_RETURN(Neighbor nn, PerturbWord(store, index, config.epsilon, rng));
      if (nn.index == index) ++same;
    }
  }
  return static_cast<double>(same) /
         static_cast<double>(indices.size() * trials);
}

}  // namespace dptg
