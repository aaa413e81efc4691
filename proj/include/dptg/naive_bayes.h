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

#ifndef DPTG_NAIVE_BAYES_H_
#define DPTG_NAIVE_BAYES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace dptg {

inline constexpr uint32_t kFeatureBuckets = 1u << 18;
inline constexpr int kDefaultGramSize = 4;
inline constexpr double kDefaultNbAlpha = 0.1;

// FNV-1a, 32 bit.
uint32_t Fnv1a(std::string_view bytes);

// Sparse (bucket, count) pairs sorted by bucket.
using FeatureVector = std::vector<std::pair<uint32_t, uint32_t>>;

// Overlapping byte n-grams of the ASCII-lowercased text, hashed into
// kFeatureBuckets buckets. Texts shorter than n give an empty vector.
FeatureVector Featurize(std::string_view text, int n);

// Multinomial naive Bayes with add-alpha smoothing over hashed n-grams.
class NaiveBayesModel {
 public:
  // labels[i] is the class of texts[i]. Classes are kept in sorted order.
  static absl::StatusOr<NaiveBayesModel> Train(std::span<const std::string> texts,
                                               std::span<const std::string> labels,
                                               int n = kDefaultGramSize,
                                               double alpha = kDefaultNbAlpha);

  const std::vector<std::string>& classes() const { return classes_; }
  int gram_size() const { return n_; }
  double alpha() const { return alpha_; }
  double log_prior(size_t c) const { return log_prior_[c]; }
  // log p(bucket | class).
  double log_likelihood(size_t c, uint32_t bucket) const {
    return log_likelihood_[c * kFeatureBuckets + bucket];
  }

  // Per-class joint log scores.
  std::vector<double> Scores(std::string_view text) const;
  // Index into classes(); ties go to the lower index.
  size_t Predict(std::string_view text) const;
  const std::string& PredictLabel(std::string_view text) const {
    return classes_[Predict(text)];
  }

 private:
  std::vector<std::string> classes_;
  int n_ = kDefaultGramSize;
  double alpha_ = kDefaultNbAlpha;
  std::vector<double> log_prior_;
  std::vector<float> log_likelihood_;
};

}  // namespace dptg

#endif  // DPTG_NAIVE_BAYES_H_
