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

#include "dptg/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dptg/internal/absl_compat.h"
#include "dptg/kernels/distance_kernels.h"

namespace dptg {

absl::StatusOr<ConfusionMatrix> ConfusionMatrix::FromRows(
    const std::vector<std::vector<int64_t>>& rows) {
  if (rows.empty()) return absl::InvalidArgumentError("empty confusion matrix");
  ConfusionMatrix m(rows.size());
  for (size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows.size()) {
      return absl::InvalidArgumentError("confusion matrix must be square");
    }
    for (size_t p = 0; p < rows.size(); ++p) {
      if (rows[t][p] < 0) return absl::InvalidArgumentError("negative count");
      m.Add(t, p, rows[t][p]);
    }
  }
  return m;
}

int64_t ConfusionMatrix::total() const {
  int64_t sum = 0;
  for (int64_t c : counts_) sum += c;
  return sum;
}

ConfusionMatrix ConfusionMatrix::Transposed() const {
  ConfusionMatrix t(k_);
  for (size_t a = 0; a < k_; ++a) {
    for (size_t b = 0; b < k_; ++b) t.Add(b, a, at(a, b));
  }
  return t;
}

std::vector<std::vector<int64_t>> ConfusionMatrix::Rows() const {
  std::vector<std::vector<int64_t>> rows(k_, std::vector<int64_t>(k_));
  for (size_t a = 0; a < k_; ++a) {
    for (size_t b = 0; b < k_; ++b) rows[a][b] = at(a, b);
  }
  return rows;
}

double Mcc(const ConfusionMatrix& confusion) {
  const size_t k = confusion.num_classes();
  // Long double keeps c*s - sum(p_k t_k) exact for realistic counts.
  long double s = 0, c = 0, pt = 0, pp = 0, tt = 0;
  std::vector<long double> predicted(k, 0), truth(k, 0);
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b < k; ++b) {
      const long double n = static_cast<long double>(confusion.at(a, b));
      truth[a] += n;
      predicted[b] += n;
      s += n;
      if (a == b) c += n;
    }
  }
  for (size_t i = 0; i < k; ++i) {
    pt += predicted[i] * truth[i];
    pp += predicted[i] * predicted[i];
    tt += truth[i] * truth[i];
  }
  const long double denom = (s * s - pp) * (s * s - tt);
  if (denom <= 0) return 0.0;
  const double mcc = static_cast<double>((c * s - pt) / std::sqrt(denom));
  return std::clamp(mcc, -1.0, 1.0);
}

absl::StatusOr<double> RelativeGain(double author_original, double sentiment_original,
                                    double author_perturbed, double sentiment_perturbed,
                                    ScoreNormalization normalization) {
  if (!(author_original > 0.0) || !(sentiment_original > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "baseline scores must be positive (A_o=", author_original,
        ", S_o=", sentiment_original, ")"));
  }
  auto norm = [normalization](double m) {
    return normalization == ScoreNormalization::kClampNegative ? std::max(m, 0.0)
                                                              : (m + 1.0) / 2.0;
  };
  return norm(sentiment_perturbed) / sentiment_original -
         norm(author_perturbed) / author_original;
}

absl::StatusOr<uint8_t> ParseWordTypes(std::string_view comma_separated) {
  uint8_t types = 0;
  for (absl::string_view raw :
       absl::StrSplit(internal::Sv(comma_separated), ',', absl::SkipEmpty())) {
    const std::string name = absl::AsciiStrToLower(absl::StripAsciiWhitespace(raw));
    // WordNet POS letters are accepted; "s" is a satellite adjective.
    if (name == "adjective" || name == "adj" || name == "a" || name == "s") {
      types |= kAdjective;
    } else if (name == "adverb" || name == "adv" || name == "r") {
      types |= kAdverb;
    } else if (name == "noun" || name == "n") {
      types |= kNoun;
    } else if (name == "verb" || name == "v") {
      types |= kVerb;
    } else if (!name.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown word type '", name, "'"));
    }
  }
  if (types == 0) return absl::InvalidArgumentError("empty word type set");
  return types;
}

std::string WordTypesToString(uint8_t types) {
  std::vector<absl::string_view> names;
  if (types & kAdjective) names.push_back("adjective");
  if (types & kAdverb) names.push_back("adverb");
  if (types & kNoun) names.push_back("noun");
  if (types & kVerb) names.push_back("verb");
  return absl::StrJoin(names, ",");
}

absl::Status TypeLexicon::Add(std::string word, uint8_t types) {
  if (types == 0) {
    return absl::InvalidArgumentError(absl::StrCat("word '", word, "' has no types"));
  }
  auto [it, inserted] = types_.emplace(word, types);
  if (inserted) {
    words_.push_back(std::move(word));
  } else {
    it->second |= types;
  }
  return absl::OkStatus();
}

absl::StatusOr<TypeLexicon> TypeLexicon::Load(std::istream& in) {
  TypeLexicon lexicon;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty() || line[0] == '#') continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected word<TAB>types"));
    }
    auto types = ParseWordTypes(internal::Sv(fields[1]));
    if (!types.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", types.status().message()));
    }
    if (auto st = lexicon.Add(std::string(fields[0]), *types); !st.ok()) return st;
  }
  return lexicon;
}

absl::StatusOr<TypeLexicon> TypeLexicon::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return Load(in);
}

void TypeLexicon::Save(std::ostream& out) const {
  for (const std::string& word : words_) {
    out << word << '\t' << WordTypesToString(types_.at(word)) << '\n';
  }
}

std::optional<uint8_t> TypeLexicon::TypesOf(std::string_view word) const {
  auto it = types_.find(internal::Sv(word));
  if (it == types_.end()) return std::nullopt;
  return it->second;
}

TypeChangeReport WordTypeChangeRate(
    std::span<const std::pair<std::string, std::string>> pairs,
    const TypeLexicon& lexicon) {
  TypeChangeReport report;
  for (const auto& [original, replacement] : pairs) {
    const auto a = lexicon.TypesOf(original);
    const auto b = lexicon.TypesOf(replacement);
    if (!a.has_value() || !b.has_value()) {
      ++report.excluded;
      continue;
    }
    ++report.evaluated;
    if ((*a & *b) == 0) ++report.changed;
  }
  if (report.evaluated > 0) {
    report.rate = static_cast<double>(report.changed) / report.evaluated;
  }
  return report;
}

absl::StatusOr<double> SemanticSimilarity(std::span<const std::string> original,
                                          std::span<const std::string> perturbed,
                                          const EmbeddingStore& store) {
  auto mean = [&store](std::span<const std::string> tokens)
      -> absl::StatusOr<std::vector<double>> {
    std::vector<double> sum(store.dim(), 0.0);
    size_t found = 0;
    for (const std::string& token : tokens) {
      auto row = store.Lookup(token);
      if (!row.has_value()) continue;
      for (size_t i = 0; i < sum.size(); ++i) sum[i] += (*row)[i];
      ++found;
    }
    if (found == 0) {
      return absl::InvalidArgumentError("sequence has no in-vocabulary token");
    }
    for (double& x : sum) x /= static_cast<double>(found);
    return sum;
  };
  auto a = mean(original);
  if (!a.ok()) return a.status();
  auto b = mean(perturbed);
  if (!b.ok()) return b.status();
  const double na = std::sqrt(kernels::Dot(*a, *a));
  const double nb = std::sqrt(kernels::Dot(*b, *b));
  if (na == 0.0 || nb == 0.0) {
    return absl::InvalidArgumentError("mean embedding has zero norm");
  }
  return std::clamp(kernels::Dot(*a, *b) / (na * nb), -1.0, 1.0);
}

}  // namespace dptg
