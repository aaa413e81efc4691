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

#ifndef DPTG_SYNTHETIC_H_
#define DPTG_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dptg/corpus.h"
#include "dptg/embedding_store.h"
#include "dptg/metrics.h"

namespace dptg {

// A small, fully synthetic stand-in for GloVe + WordNet + a review corpus.
// Words are pronounceable pseudo-words; topic clusters carry a dominant word
// type and authors prefer a few topics, their own word ranks and their own
// punctuation habits.
struct SyntheticOptions {
  uint64_t seed = 20240917;
  size_t dim = 50;
  size_t num_topics = 16;
  size_t words_per_topic = 100;
  size_t sentiment_words = 40;  // per polarity
  size_t function_words = 60;
  // Cluster centers sit at this norm; words scatter around them with a
  // per-coordinate standard deviation of `spread`.
  double center_radius = 8.0;
  double spread = 0.22;
  // Fraction of a topic's words that carry only its dominant type.
  double type_purity = 0.6;
  size_t num_authors = 4;
  size_t records_per_author = 500;
  size_t preferred_topics = 3;
  // Share of an author's topic words drawn from their preferred topics.
  double topic_focus = 0.3;
  // Token mix; the remainder are topic words.
  double function_rate = 0.30;
  double sentiment_rate = 0.12;
  double punctuation_rate = 0.12;
  size_t min_tokens = 15;
  size_t max_tokens = 25;
  // The Poincare copy maps v to tanh(|v| / poincare_scale) v / |v|.
  double poincare_scale = 10.0;
};

struct SyntheticWorld {
  EmbeddingStore euclidean;
  // Function words are deliberately absent here, as in hyperbolic
  // vocabularies built from noun hierarchies.
  EmbeddingStore poincare;
  TypeLexicon lexicon;
  std::vector<Record> corpus;
};

absl::StatusOr<SyntheticWorld> GenerateSyntheticWorld(const SyntheticOptions& options);

}  // namespace dptg

#endif  // DPTG_SYNTHETIC_H_
