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

#include "dptg/naive_bayes.h"

#include <algorithm>
#include <cmath>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptg {

uint32_t Fnv1a(std::string_view bytes) {
  uint32_t h = 2166136261u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

FeatureVector Featurize(std::string_view text, int n) {
  FeatureVector out;
  if (n < 1 || text.size() < static_cast<size_t>(n)) return out;
  std::string lower(text);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  std::vector<uint32_t> buckets;
  buckets.reserve(lower.size() - n + 1);
  for (size_t i = 0; i + n <= lower.size(); ++i) {
    buckets.push_back(Fnv1a(std::string_view(lower).substr(i, n)) % kFeatureBuckets);
  }
  std::sort(buckets.begin(), buckets.end());
  for (uint32_t b : buckets) {
    if (!out.empty() && out.back().first == b) {
      ++out.back().second;
    } else {
      out.emplace_back(b, 1);
    }
  }
  return out;
}

absl::StatusOr<NaiveBayesModel> NaiveBayesModel::Train(
    std::span<const std::string> texts, std::span<const std::string> labels, int n,
    double alpha) {
  if (texts.size() != labels.size()) {
    return absl::InvalidArgumentError("texts and labels differ in length");
  }
  if (n < 1) return absl::InvalidArgumentError("gram size must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError("alpha must be positive and finite");
  }
  NaiveBayesModel model;
  model.n_ = n;
  model.alpha_ = alpha;
  model.classes_.assign(labels.begin(), labels.end());
  std::sort(model.classes_.begin(), model.classes_.end());
  model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()),
                       model.classes_.end());
  if (model.classes_.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need at least two classes to train, got ", model.classes_.size()));
  }
  const size_t k = model.classes_.size();
  absl::flat_hash_map<std::string_view, size_t> class_index;
  for (size_t c = 0; c < k; ++c) class_index[model.classes_[c]] = c;

  std::vector<double> counts(k * kFeatureBuckets, 0.0);
  std::vector<double> totals(k, 0.0);
  std::vector<double> docs(k, 0.0);
  for (size_t i = 0; i < texts.size(); ++i) {
    const size_t c = class_index.at(labels[i]);
    docs[c] += 1.0;
    for (const auto& [bucket, count] : Featurize(texts[i], n)) {
      counts[c * kFeatureBuckets + bucket] += count;
      totals[c] += count;
    }
  }
  model.log_prior_.resize(k);
  model.log_likelihood_.resize(k * kFeatureBuckets);
  const double buckets = static_cast<double>(kFeatureBuckets);
  for (size_t c = 0; c < k; ++c) {
    model.log_prior_[c] = std::log(docs[c] / static_cast<double>(texts.size()));
    const double log_denom = std::log(totals[c] + alpha * buckets);
    for (size_t b = 0; b < kFeatureBuckets; ++b) {
      model.log_likelihood_[c * kFeatureBuckets + b] = static_cast<float>(
          std::log(counts[c * kFeatureBuckets + b] + alpha) - log_denom);
    }
  }
  return model;
}

std::vector<double> NaiveBayesModel::Scores(std::string_view text) const {
  const FeatureVector features = Featurize(text, n_);
  std::vector<double> scores(log_prior_);
  for (size_t c = 0; c < classes_.size(); ++c) {
    const float* row = &log_likelihood_[c * kFeatureBuckets];
    double sum = 0.0;
    for (const auto& [bucket, count] : features) sum += count * static_cast<double>(row[bucket]);
    scores[c] += sum;
  }
  return scores;
}

size_t NaiveBayesModel::Predict(std::string_view text) const {
  const std::vector<double> scores = Scores(text);
  return static_cast<size_t>(std::max_element(scores.begin(), scores.end()) -
                             scores.begin());
}

}  // namespace dptg
