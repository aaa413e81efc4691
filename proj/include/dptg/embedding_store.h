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

#ifndef DPTG_EMBEDDING_STORE_H_
#define DPTG_EMBEDDING_STORE_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "dptg/geometry.h"

namespace dptg {

struct LoadOptions {
  Geometry geometry = Geometry::kEuclidean;
  // Lowercases words on load. GloVe vocabularies are lowercase already.
  bool lowercase = true;
};

// Counts emitted by the text loader.
struct LoadReport {
  size_t loaded = 0;
  // Poincare rows at or beyond the unit sphere, pulled back to
  // kPoincareMaxNorm.
  size_t rescaled = 0;
  // Lines dropped because lowercasing collided with an earlier word.
  size_t rejected = 0;
  std::vector<std::string> rescaled_words;
};

struct Neighbor {
  size_t index = 0;
  double distance = 0.0;
};

// Euclidean distance ||u - v||.
double EuclideanDistance(std::span<const double> u, std::span<const double> v);

// Poincare ball distance arcosh(1 + 2||u-v||^2 / ((1-||u||^2)(1-||v||^2))),
// evaluated as log1p(x + sqrt(x (x + 2))) to stay accurate near zero.
absl::StatusOr<double> PoincareDistance(std::span<const double> u,
                                        std::span<const double> v);

// Vocabulary plus a dense |V| x dim matrix in one geometry. Immutable after
// construction; all queries are const and safe to share across threads.
class EmbeddingStore {
 public:
  // Validates unique words, consistent dimension, finite values and, for the
  // Poincare ball, norms strictly below one.
  static absl::StatusOr<EmbeddingStore> Create(std::vector<std::string> words,
                                               std::vector<double> vectors,
                                               size_t dim, Geometry geometry,
                                               bool lowercase = true);

  // Parses `word v1 ... vd` lines (LF or CRLF). Blank lines are skipped.
  static absl::StatusOr<EmbeddingStore> Load(std::istream& in,
                                             const LoadOptions& options,
                                             LoadReport* report = nullptr);
  static absl::StatusOr<EmbeddingStore> LoadFile(const std::string& path,
                                                 const LoadOptions& options,
                                                 LoadReport* report = nullptr);

  // Writes the store back out in the text format Load reads.
  void Save(std::ostream& out) const;

  size_t size() const { return words_.size(); }
  size_t dim() const { return dim_; }
  Geometry geometry() const { return geometry_; }
  bool lowercase() const { return lowercase_; }

  const std::string& word(size_t index) const { return words_[index]; }
  const std::vector<std::string>& words() const { return words_; }
  std::span<const double> row(size_t index) const {
    return {vectors_.data() + index * dim_, dim_};
  }

  std::optional<size_t> IndexOf(std::string_view word) const;

  // Exact, case-sensitive match. std::nullopt marks an out-of-vocabulary word.
  std::optional<std::span<const double>> Lookup(std::string_view word) const;

  // Distance under the store's geometry.
  absl::StatusOr<double> Distance(std::span<const double> u,
                                  std::span<const double> v) const;

  // Exact brute-force nearest row; ties go to the lowest row index.
  absl::StatusOr<Neighbor> NearestNeighbor(std::span<const double> query) const;

  // Sum of per-position distances between two equal-length, fully
  // in-vocabulary token sequences.
  absl::StatusOr<double> SentenceDistance(
      std::span<const std::string> left,
      std::span<const std::string> right) const;

 private:
  EmbeddingStore() = default;

  std::vector<std::string> words_;
  absl::flat_hash_map<std::string, size_t> index_;
  std::vector<double> vectors_;
  // 1 / (1 - ||row||^2); the hyperbolic nearest neighbor of q minimizes
  // ||q - row||^2 * weight, which is monotone in the Poincare distance.
  std::vector<double> poincare_weights_;
  size_t dim_ = 0;
  Geometry geometry_ = Geometry::kEuclidean;
  bool lowercase_ = true;
};

}  // namespace dptg

#endif  // DPTG_EMBEDDING_STORE_H_
