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

#ifndef DPTG_NGRAM_DECODER_H_
#define DPTG_NGRAM_DECODER_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "dptg/dp_softmax.h"
#include "dptg/rng.h"
#include "json.hpp"

namespace dptg {

// End of sentence. An ordinary vocabulary entry, so the model learns lengths.
inline constexpr std::string_view kEndToken = "</s>";
// Left padding for contexts shorter than order - 1. Never emitted.
inline constexpr std::string_view kStartToken = "<s>";

// Add-alpha smoothed k-gram language model. Contexts never seen in training
// fall back to the uniform distribution.
class NgramModel {
 public:
  static absl::StatusOr<NgramModel> Train(
      const std::vector<std::vector<std::string>>& corpus, int order, double alpha);

  static absl::StatusOr<NgramModel> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  size_t end_index() const { return end_index_; }
  std::optional<size_t> IndexOf(std::string_view token) const;

  // p(. | context) over the vocabulary. Only the last order - 1 context tokens
  // are used; shorter contexts are padded with kStartToken.
  std::vector<double> Distribution(std::span<const std::string> context) const;
  // p(token | context); tokens outside the vocabulary get the zero-count
  // smoothed mass alpha / (total + alpha |V|).
  double Probability(std::span<const std::string> context,
                     std::string_view token) const;

 private:
  struct ContextCounts {
    std::map<size_t, double> next;  // vocabulary index -> count
    double total = 0.0;
  };

  std::string ContextKey(std::span<const std::string> context) const;
  const ContextCounts* Find(std::span<const std::string> context) const;

  int order_ = 1;
  double alpha_ = 1.0;
  std::vector<std::string> vocabulary_;
  absl::flat_hash_map<std::string, size_t> index_;
  size_t end_index_ = 0;
  std::map<std::string, ContextCounts> counts_;
};

// Input-sentence tokens the decoder is steered towards, as a queue. Each
// pending token gets weight proportional to kContentDecay^position, so the
// next unread token dominates. Emitting a pending token removes its first
// occurrence; once the queue is empty the bias moves to the end marker.
inline constexpr double kContentDecay = 0.5;

class ContentBias {
 public:
  ContentBias() = default;
  ContentBias(const NgramModel& model, std::span<const std::string> tokens);

  bool empty() const { return pending_.empty(); }
  // Bias distribution over the vocabulary, or all zeros for a bias that never
  // held content.
  std::vector<double> Weights(size_t vocab_size, size_t end_index) const;
  void Consume(size_t index);

 private:
  std::vector<size_t> pending_;
  bool had_content_ = false;
};

// Weight of the language model against the content bias.
inline constexpr double kDefaultLmWeight = 0.3;

// Mixture lambda * p(v | context) + (1 - lambda) * bias(v), normalized, then
// min-max rescaled into [0, 1].
LogitVector DecoderLogits(const NgramModel& model, std::span<const std::string> context,
                          const ContentBias& bias,
                          double lambda = kDefaultLmWeight);

struct GenerationOptions {
  double temperature = 1.0;
  double delta_q = 1.0;
  size_t max_len = 32;
  double lambda = kDefaultLmWeight;
  // Retains each step's clamped logits for auditing.
  bool keep_step_logits = false;
};

struct GenerationResult {
  std::vector<std::string> tokens;  // without the end marker
  // Number of sampling steps, including a final end-marker draw. Each step is
  // one Exponential-mechanism release.
  size_t length = 0;
  double per_step_epsilon = 0.0;
  double total_epsilon = 0.0;
  double temperature = 0.0;
  std::vector<LogitVector> step_logits;
};

// Autoregressive temperature sampling conditioned on `input_text`.
absl::StatusOr<GenerationResult> Generate(const NgramModel& model,
                                          std::string_view input_text,
                                          const GenerationOptions& options,
                                          RngStream& rng);

// exp(mean negative log-probability) of the tokenized text plus end marker.
absl::StatusOr<double> Perplexity(const NgramModel& model, std::string_view text);

}  // namespace dptg

#endif  // DPTG_NGRAM_DECODER_H_
