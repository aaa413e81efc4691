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

#include "dptg/ngram_decoder.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dptg/internal/absl_compat.h"
#include "dptg/status_macros.h"
#include "dptg/tokenizer.h"

namespace dptg {
namespace {

// Unit separator; cannot appear inside a token.
constexpr char kKeySeparator = '\x1f';

}  // namespace

absl::StatusOr<NgramModel> NgramModel::Train(
    const std::vector<std::vector<std::string>>& corpus, int order, double alpha) {
  if (order < 1) return absl::InvalidArgumentError("order must be at least 1");
  if (!(alpha > 0.0)) return absl::InvalidArgumentError("alpha must be positive");
  size_t total_tokens = 0;
  for (const auto& sentence : corpus) total_tokens += sentence.size();
  if (corpus.empty() || total_tokens == 0) {
    return absl::InvalidArgumentError("empty training corpus");
  }
  NgramModel model;
  model.order_ = order;
  model.alpha_ = alpha;
  for (const auto& sentence : corpus) {
    for (const std::string& token : sentence) {
      if (token == kStartToken || token == kEndToken) continue;
      if (model.index_.emplace(token, model.vocabulary_.size()).second) {
        model.vocabulary_.push_back(token);
      }
    }
  }
  model.end_index_ = model.vocabulary_.size();
  model.vocabulary_.emplace_back(kEndToken);
  model.index_.emplace(std::string(kEndToken), model.end_index_);

  const size_t ctx_len = static_cast<size_t>(order - 1);
  for (const auto& sentence : corpus) {
    std::vector<std::string> padded(ctx_len, std::string(kStartToken));
    for (const std::string& token : sentence) {
      if (token != kStartToken && token != kEndToken) padded.push_back(token);
    }
    padded.emplace_back(kEndToken);
    for (size_t i = ctx_len; i < padded.size(); ++i) {
      std::span<const std::string> context(padded.data() + i - ctx_len, ctx_len);
      ContextCounts& cc = model.counts_[model.ContextKey(context)];
      cc.next[model.index_.at(padded[i])] += 1.0;
      cc.total += 1.0;
    }
  }
  return model;
}

std::string NgramModel::ContextKey(std::span<const std::string> context) const {
  const size_t ctx_len = static_cast<size_t>(order_ - 1);
  std::vector<absl::string_view> window;
  window.reserve(ctx_len);
  for (size_t i = 0; i < ctx_len; ++i) {
    // Right-aligned: the last ctx_len tokens, left padded.
    const ptrdiff_t src = static_cast<ptrdiff_t>(context.size()) -
                          static_cast<ptrdiff_t>(ctx_len) + static_cast<ptrdiff_t>(i);
    window.push_back(internal::Sv(src >= 0 ? std::string_view(context[src]) : kStartToken));
  }
  return absl::StrJoin(window, std::string(1, kKeySeparator));
}

const NgramModel::ContextCounts* NgramModel::Find(
    std::span<const std::string> context) const {
  auto it = counts_.find(ContextKey(context));
  return it == counts_.end() ? nullptr : &it->second;
}

std::optional<size_t> NgramModel::IndexOf(std::string_view token) const {
  auto it = index_.find(internal::Sv(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> NgramModel::Distribution(std::span<const std::string> context) const {
  const size_t v = vocabulary_.size();
  const ContextCounts* cc = Find(context);
  if (cc == nullptr) return std::vector<double>(v, 1.0 / static_cast<double>(v));
  const double denom = cc->total + alpha_ * static_cast<double>(v);
  std::vector<double> dist(v, alpha_ / denom);
  for (const auto& [index, count] : cc->next) dist[index] = (count + alpha_) / denom;
  return dist;
}

double NgramModel::Probability(std::span<const std::string> context,
                               std::string_view token) const {
  const size_t v = vocabulary_.size();
  const ContextCounts* cc = Find(context);
  if (cc == nullptr) return 1.0 / static_cast<double>(v);
  const double denom = cc->total + alpha_ * static_cast<double>(v);
  double count = 0.0;
  if (auto index = IndexOf(token); index.has_value()) {
    if (auto it = cc->next.find(*index); it != cc->next.end()) count = it->second;
  }
  return (count + alpha_) / denom;
}

nlohmann::json NgramModel::ToJson() const {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [key, cc] : counts_) {
    nlohmann::json next = nlohmann::json::object();
    for (const auto& [index, count] : cc.next) next[vocabulary_[index]] = count;
    // Context tokens joined by single spaces; tokens never contain spaces.
    std::string readable = key;
    std::replace(readable.begin(), readable.end(), kKeySeparator, ' ');
    counts[readable] = next;
  }
  return {{"order", order_}, {"alpha", alpha_}, {"vocabulary", vocabulary_},
          {"counts", counts}};
}

absl::StatusOr<NgramModel> NgramModel::FromJson(const nlohmann::json& j) {
  try {
    NgramModel model;
    model.order_ = j.at("order").get<int>();
    model.alpha_ = j.at("alpha").get<double>();
    model.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    if (model.order_ < 1 || !(model.alpha_ > 0.0)) {
      return absl::InvalidArgumentError("invalid order or alpha");
    }
    for (size_t i = 0; i < model.vocabulary_.size(); ++i) {
      if (!model.index_.emplace(model.vocabulary_[i], i).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate vocabulary entry '", model.vocabulary_[i], "'"));
      }
    }
    auto end = model.IndexOf(kEndToken);
    if (!end.has_value()) {
      return absl::InvalidArgumentError("vocabulary lacks the end marker");
    }
    model.end_index_ = *end;
    for (const auto& [readable, next] : j.at("counts").items()) {
      std::string key = readable;
      std::replace(key.begin(), key.end(), ' ', kKeySeparator);
      ContextCounts& cc = model.counts_[key];
      for (const auto& [token, count] : next.items()) {
        auto index = model.IndexOf(token);
        if (!index.has_value()) {
          return absl::InvalidArgumentError(
              absl::StrCat("count for unknown token '", token, "'"));
        }
        cc.next[*index] = count.get<double>();
        cc.total += count.get<double>();
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed n-gram model: ", e.what()));
  }
}

ContentBias::ContentBias(const NgramModel& model, std::span<const std::string> tokens) {
  for (const std::string& token : tokens) {
    auto index = model.IndexOf(token);
    if (!index.has_value() || *index == model.end_index()) continue;
    pending_.push_back(*index);
  }
  had_content_ = !pending_.empty();
}

std::vector<double> ContentBias::Weights(size_t vocab_size, size_t end_index) const {
  std::vector<double> weights(vocab_size, 0.0);
  if (pending_.empty()) {
    if (had_content_) weights[end_index] = 1.0;
    return weights;
  }
  // Geometric in queue position, normalized over what is left.
  const double total = (1.0 - std::pow(kContentDecay, static_cast<double>(pending_.size()))) /
                       (1.0 - kContentDecay);
  double w = 1.0 / total;
  for (size_t index : pending_) {
    weights[index] += w;
    w *= kContentDecay;
  }
  return weights;
}

void ContentBias::Consume(size_t index) {
  auto it = std::find(pending_.begin(), pending_.end(), index);
  if (it != pending_.end()) pending_.erase(it);
}

LogitVector DecoderLogits(const NgramModel& model, std::span<const std::string> context,
                          const ContentBias& bias, double lambda) {
  std::vector<double> mix = model.Distribution(context);
  const std::vector<double> weights =
      bias.Weights(model.vocabulary().size(), model.end_index());
  const bool has_bias = std::any_of(weights.begin(), weights.end(),
                                    [](double w) { return w > 0.0; });
  if (has_bias) {
    for (size_t v = 0; v < mix.size(); ++v) {
      mix[v] = lambda * mix[v] + (1.0 - lambda) * weights[v];
    }
  }
  return MinMaxRescale(mix);
}

absl::StatusOr<GenerationResult> Generate(const NgramModel& model,
                                          std::string_view input_text,
                                          const GenerationOptions& options,
                                          RngStream& rng) {
  if (!(options.temperature > 0.0)) {
    return absl::InvalidArgumentError("temperature must be positive");
  }
  if (options.max_len == 0) return absl::InvalidArgumentError("max_len must be positive");
  if (!(options.delta_q > 0.0)) return absl::InvalidArgumentError("delta_q must be positive");
  if (options.lambda < 0.0 || options.lambda > 1.0) {
    return absl::InvalidArgumentError("lambda must lie in [0, 1]");
  }
  const std::vector<std::string> input = Tokenize(input_text);
  ContentBias bias(model, input);

  GenerationResult result;
  result.temperature = options.temperature;
  result.per_step_epsilon = EpsilonFromTemperature(options.temperature, options.delta_q);
  while (result.length < options.max_len) {
    LogitVector logits = DecoderLogits(model, result.tokens, bias, options.lambda);
    DPTG_ASSIGN_OR_RETURN(std::vector<double> probs,
                          SoftmaxWithTemperature(logits.values, options.temperature));
    const size_t next = SampleIndex(probs, rng);
    ++result.length;
    if (options.keep_step_logits) result.step_logits.push_back(std::move(logits));
    if (next == model.end_index()) break;
    result.tokens.push_back(model.vocabulary()[next]);
    bias.Consume(next);
  }
  result.total_epsilon = result.per_step_epsilon * static_cast<double>(result.length);
  return result;
}

absl::StatusOr<double> Perplexity(const NgramModel& model, std::string_view text) {
  std::vector<std::string> tokens = Tokenize(text);
  if (tokens.empty()) return absl::InvalidArgumentError("empty text");
  tokens.emplace_back(kEndToken);
  double nll = 0.0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::span<const std::string> context(tokens.data(), i);
    nll -= std::log(model.Probability(context, tokens[i]));
  }
  return std::exp(nll / static_cast<double>(tokens.size()));
}

}  // namespace dptg
