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

#include "dptg/embedding_store.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dptg/internal/absl_compat.h"
#include "dptg/kernels/distance_kernels.h"

namespace dptg {
namespace {

absl::StatusOr<double> ParseDouble(std::string_view field, size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line_no, ": non-numeric field '", std::string(field), "'"));
  }
  return value;
}

}  // namespace

double EuclideanDistance(std::span<const double> u, std::span<const double> v) {
  return std::sqrt(kernels::SquaredL2(u, v));
}

absl::StatusOr<double> PoincareDistance(std::span<const double> u,
                                        std::span<const double> v) {
  if (u.size() != v.size()) {
    return absl::InvalidArgumentError("dimension mismatch");
  }
  const double nu = kernels::Dot(u, u);
  const double nv = kernels::Dot(v, v);
  if (!(nu < 1.0) || !(nv < 1.0)) {
    return absl::InvalidArgumentError(
        "Poincare distance requires points strictly inside the unit ball");
  }
  const double x = 2.0 * kernels::SquaredL2(u, v) / ((1.0 - nu) * (1.0 - nv));
  return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::Create(std::vector<std::string> words,
                                                      std::vector<double> vectors,
                                                      size_t dim, Geometry geometry,
                                                      bool lowercase) {
  if (dim == 0) return absl::InvalidArgumentError("dim must be at least 1");
  if (words.empty()) return absl::InvalidArgumentError("empty vocabulary");
  if (vectors.size() != words.size() * dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "matrix has ", vectors.size(), " values, expected ", words.size() * dim));
  }
  EmbeddingStore store;
  store.dim_ = dim;
  store.geometry_ = geometry;
  store.lowercase_ = lowercase;
  store.index_.reserve(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    if (!store.index_.emplace(words[i], i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate word '", words[i], "'"));
    }
  }
  for (double x : vectors) {
    if (!std::isfinite(x)) return absl::InvalidArgumentError("non-finite value");
  }
  store.words_ = std::move(words);
  store.vectors_ = std::move(vectors);
  if (geometry == Geometry::kPoincareBall) {
    store.poincare_weights_.resize(store.words_.size());
    for (size_t i = 0; i < store.words_.size(); ++i) {
      const double n2 = kernels::Dot(store.row(i), store.row(i));
      if (!(n2 < 1.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "word '", store.words_[i], "' lies outside the open unit ball"));
      }
      store.poincare_weights_[i] = 1.0 / (1.0 - n2);
    }
  }
  return store;
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::Load(std::istream& in,
                                                    const LoadOptions& options,
                                                    LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report != nullptr ? *report : local;
  rep = LoadReport{};

  std::vector<std::string> words;
  std::vector<double> vectors;
  absl::flat_hash_map<std::string, size_t> seen;
  absl::flat_hash_set<std::string> raw_seen;
  size_t dim = 0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<absl::string_view> fields =
        absl::StrSplit(line, absl::ByAnyChar(" \t"), absl::SkipEmpty());
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected a word followed by values"));
    }
    const size_t line_dim = fields.size() - 1;
    if (dim == 0) {
      dim = line_dim;
    } else if (line_dim != dim) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": dimension mismatch (", line_dim, " vs ", dim, ")"));
    }
    std::string raw_word(fields[0]);
    std::string word = options.lowercase ? absl::AsciiStrToLower(raw_word) : raw_word;
    std::vector<double> row(dim);
    for (size_t i = 0; i < dim; ++i) {
      auto value = ParseDouble(internal::Sv(fields[i + 1]), line_no);
      if (!value.ok()) return value.status();
      row[i] = *value;
    }
    if (!raw_seen.insert(raw_word).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": duplicate word '", raw_word, "'"));
    }
    if (seen.contains(word)) {
      // Casing variant ("The" next to "the") folded away by lowercasing.
      ++rep.rejected;
      continue;
    }
    if (options.geometry == Geometry::kPoincareBall) {
      const double norm = std::sqrt(kernels::Dot(row, row));
      if (norm >= 1.0) {
        const double scale = kPoincareMaxNorm / norm;
        for (double& x : row) x *= scale;
        ++rep.rescaled;
        rep.rescaled_words.push_back(word);
      }
    }
    seen.emplace(word, words.size());
    words.push_back(std::move(word));
    vectors.insert(vectors.end(), row.begin(), row.end());
  }
  if (words.empty()) return absl::InvalidArgumentError("empty embedding input");
  rep.loaded = words.size();
  return Create(std::move(words), std::move(vectors), dim, options.geometry,
                options.lowercase);
}

absl::StatusOr<EmbeddingStore> EmbeddingStore::LoadFile(const std::string& path,
                                                        const LoadOptions& options,
                                                        LoadReport* report) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto store = Load(in, options, report);
  if (!store.ok()) {
    return absl::Status(store.status().code(),
                        absl::StrCat(path, ": ", store.status().message()));
  }
  return store;
}

void EmbeddingStore::Save(std::ostream& out) const {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (double x : row(i)) out << ' ' << x;
    out << '\n';
  }
  out.precision(precision);
}

std::optional<size_t> EmbeddingStore::IndexOf(std::string_view word) const {
  auto it = index_.find(internal::Sv(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const double>> EmbeddingStore::Lookup(
    std::string_view word) const {
  auto index = IndexOf(word);
  if (!index.has_value()) return std::nullopt;
  return row(*index);
}

absl::StatusOr<double> EmbeddingStore::Distance(std::span<const double> u,
                                                std::span<const double> v) const {
  if (u.size() != dim_ || v.size() != dim_) {
    return absl::InvalidArgumentError("vector dimension does not match store");
  }
  if (geometry_ == Geometry::kEuclidean) return EuclideanDistance(u, v);
  return PoincareDistance(u, v);
}

absl::StatusOr<Neighbor> EmbeddingStore::NearestNeighbor(
    std::span<const double> query) const {
  if (words_.empty()) return absl::FailedPreconditionError("empty store");
  if (query.size() != dim_) {
    return absl::InvalidArgumentError("query dimension does not match store");
  }
  for (double x : query) {
    if (!std::isfinite(x)) return absl::InvalidArgumentError("non-finite query");
  }
  if (geometry_ == Geometry::kPoincareBall && !(kernels::Dot(query, query) < 1.0)) {
    return absl::InvalidArgumentError("query must lie inside the unit ball");
  }
  std::vector<double> scores(words_.size());
  kernels::SquaredL2Rows(vectors_, query, scores);
  if (geometry_ == Geometry::kPoincareBall) {
    for (size_t i = 0; i < scores.size(); ++i) scores[i] *= poincare_weights_[i];
  }
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  auto distance = Distance(query, row(best));
  if (!distance.ok()) return distance.status();
  return Neighbor{best, *distance};
}

absl::StatusOr<double> EmbeddingStore::SentenceDistance(
    std::span<const std::string> left, std::span<const std::string> right) const {
  if (left.size() != right.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sentence lengths differ (", left.size(), " vs ", right.size(),
        "); the metric is only defined for equal lengths"));
  }
  double total = 0.0;
  for (size_t i = 0; i < left.size(); ++i) {
    auto a = Lookup(left[i]);
    auto b = Lookup(right[i]);
    if (!a.has_value() || !b.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "out-of-vocabulary token at position ", i, ": '",
          a.has_value() ? right[i] : left[i], "'"));
    }
    auto d = Distance(*a, *b);
    if (!d.ok()) return d.status();
    total += *d;
  }
  return total;
}

}  // namespace dptg
