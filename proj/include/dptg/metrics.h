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

#ifndef DPTG_METRICS_H_
#define DPTG_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "dptg/embedding_store.h"

namespace dptg {

// k x k counts; rows are true classes, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(size_t num_classes)
      : k_(num_classes), counts_(num_classes * num_classes, 0) {}
  static absl::StatusOr<ConfusionMatrix> FromRows(
      const std::vector<std::vector<int64_t>>& rows);

  size_t num_classes() const { return k_; }
  void Add(size_t truth, size_t predicted, int64_t count = 1) {
    counts_[truth * k_ + predicted] += count;
  }
  int64_t at(size_t truth, size_t predicted) const {
    return counts_[truth * k_ + predicted];
  }
  int64_t total() const;
  ConfusionMatrix Transposed() const;
  std::vector<std::vector<int64_t>> Rows() const;

 private:
  size_t k_;
  std::vector<int64_t> counts_;
};

// Multiclass Matthews correlation (Gorodkin's R_K). Zero when the
// denominator vanishes, i.e. constant predictions or a single true class.
double Mcc(const ConfusionMatrix& confusion);

// How perturbed MCCs are mapped onto [0, 1] before entering the gain.
enum class ScoreNormalization {
  kClampNegative,  // max(m, 0)
  kAffine,         // (m + 1) / 2
};

// gamma = norm(S_p) / S_o - norm(A_p) / A_o.
absl::StatusOr<double> RelativeGain(
    double author_original, double sentiment_original, double author_perturbed,
    double sentiment_perturbed,
    ScoreNormalization normalization = ScoreNormalization::kClampNegative);

// Word classes, as a bit set.
enum WordType : uint8_t {
  kAdjective = 1 << 0,
  kAdverb = 1 << 1,
  kNoun = 1 << 2,
  kVerb = 1 << 3,
};

absl::StatusOr<uint8_t> ParseWordTypes(std::string_view comma_separated);
std::string WordTypesToString(uint8_t types);

// word -> non-empty set of word types. TSV: word<TAB>noun,verb
class TypeLexicon {
 public:
  static absl::StatusOr<TypeLexicon> Load(std::istream& in);
  static absl::StatusOr<TypeLexicon> LoadFile(const std::string& path);
  absl::Status Add(std::string word, uint8_t types);
  void Save(std::ostream& out) const;

  std::optional<uint8_t> TypesOf(std::string_view word) const;
  size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  // Insertion order.
  const std::vector<std::string>& words() const { return words_; }

 private:
  absl::flat_hash_map<std::string, uint8_t> types_;
  std::vector<std::string> words_;
};

struct TypeChangeReport {
  size_t changed = 0;
  // Pairs with both words in the lexicon.
  size_t evaluated = 0;
  // Pairs with either word missing from the lexicon.
  size_t excluded = 0;
  // nullopt when nothing could be evaluated.
  std::optional<double> rate;
};

// A substitution counts as a type change only when the type sets of the two
// words are disjoint.
TypeChangeReport WordTypeChangeRate(
    std::span<const std::pair<std::string, std::string>> pairs,
    const TypeLexicon& lexicon);

// Cosine of the mean in-vocabulary embeddings of two token sequences. A cheap
// stand-in for sentence-encoder similarity.
absl::StatusOr<double> SemanticSimilarity(std::span<const std::string> original,
                                          std::span<const std::string> perturbed,
                                          const EmbeddingStore& store);

}  // namespace dptg

#endif  // DPTG_METRICS_H_
