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

#include "dptg/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "dptg/rng.h"
#include "json.hpp"

namespace dptg {
namespace {

using json = nlohmann::json;

absl::Status LineError(size_t line_no, std::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": ", std::string(message)));
}

}  // namespace

absl::StatusOr<std::vector<Record>> ReadJsonl(std::istream& in,
                                              std::string_view text_field) {
  std::vector<Record> records;
  absl::flat_hash_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) return LineError(line_no, "malformed JSON");
    if (!obj.is_object()) return LineError(line_no, "expected a JSON object");
    Record r;
    const std::string text_key(text_field);
    for (const std::string& key : {std::string("id"), std::string("author"), text_key}) {
      auto it = obj.find(key);
      if (it == obj.end()) return LineError(line_no, absl::StrCat("missing '", key, "'"));
      if (!it->is_string()) {
        return LineError(line_no, absl::StrCat("'", key, "' must be a string"));
      }
    }
    r.id = obj["id"].get<std::string>();
    r.author = obj["author"].get<std::string>();
    r.text = obj[text_key].get<std::string>();
    auto s = obj.find("sentiment");
    if (s == obj.end()) return LineError(line_no, "missing 'sentiment'");
    if (s->is_number_integer()) {
      r.sentiment = std::to_string(s->get<int64_t>());
      r.sentiment_is_integer = true;
    } else if (s->is_string()) {
      r.sentiment = s->get<std::string>();
    } else {
      return LineError(line_no, "'sentiment' must be an integer or a string");
    }
    if (r.id.empty()) return LineError(line_no, "empty 'id'");
    if (!ids.insert(r.id).second) {
      return LineError(line_no, absl::StrCat("duplicate id '", r.id, "'"));
    }
    records.push_back(std::move(r));
  }
  return records;
}

absl::StatusOr<std::vector<Record>> ReadJsonlFile(const std::string& path,
                                                  std::string_view text_field) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto records = ReadJsonl(in, text_field);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  return records;
}

std::string RecordToJsonLine(const Record& record) {
  json obj = json::object();
  obj["id"] = record.id;
  obj["author"] = record.author;
  if (record.sentiment_is_integer) {
    obj["sentiment"] = std::stoll(record.sentiment);
  } else {
    obj["sentiment"] = record.sentiment;
  }
  obj["text"] = record.text;
  return obj.dump();
}

void WriteJsonl(const std::vector<Record>& records, std::ostream& out) {
  for (const Record& r : records) out << RecordToJsonLine(r) << '\n';
}

absl::StatusOr<Split> StratifiedSplit(const std::vector<Record>& records,
                                      uint64_t seed, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("test fraction must lie in (0, 1)");
  }
  if (records.size() < 2) {
    return absl::InvalidArgumentError("need at least two records to split");
  }
  // Ordered map keeps the visiting order independent of hashing.
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> strata;
  for (size_t i = 0; i < records.size(); ++i) {
    strata[{records[i].author, records[i].sentiment}].push_back(i);
  }
  RngStream rng(seed, /*stream_id=*/0x5317);
  std::vector<bool> is_test(records.size(), false);
  for (auto& [key, members] : strata) {
    for (size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.NextBelow(i)]);
    }
    size_t n_test = static_cast<size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_test = std::clamp<size_t>(n_test, 1, members.size() - 1);
    for (size_t j = 0; j < n_test; ++j) is_test[members[j]] = true;
  }

  // Small strata can leave a label on one side only; move one record over.
  auto repair = [&](auto label_of) {
    std::map<std::string, std::vector<size_t>> by_label;
    for (size_t i = 0; i < records.size(); ++i) by_label[label_of(records[i])].push_back(i);
    for (const auto& [label, members] : by_label) {
      if (members.size() < 2) continue;
      size_t in_test = 0;
      for (size_t i : members) in_test += is_test[i];
      if (in_test == 0) is_test[members.front()] = true;
      if (in_test == members.size()) is_test[members.front()] = false;
    }
  };
  repair([](const Record& r) -> const std::string& { return r.author; });
  repair([](const Record& r) -> const std::string& { return r.sentiment; });

  Split split;
  for (size_t i = 0; i < records.size(); ++i) {
    (is_test[i] ? split.test : split.train).push_back(i);
  }
  return split;
}

absl::StatusOr<std::vector<Split>> StratifiedFolds(const std::vector<Record>& records,
                                                   uint64_t seed, size_t k) {
  if (k < 2) return absl::InvalidArgumentError("need at least two folds");
  if (records.size() < k) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot make ", k, " folds from ", records.size(), " records"));
  }
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> strata;
  for (size_t i = 0; i < records.size(); ++i) {
    strata[{records[i].author, records[i].sentiment}].push_back(i);
  }
  RngStream rng(seed, /*stream_id=*/0x5318);
  std::vector<size_t> fold_of(records.size());
  // Dealing continues across strata so fold sizes differ by at most one.
  size_t next = 0;
  for (auto& [key, members] : strata) {
    for (size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.NextBelow(i)]);
    }
    for (size_t i : members) fold_of[i] = next++ % k;
  }
  std::vector<Split> folds(k);
  for (size_t i = 0; i < records.size(); ++i) {
    for (size_t f = 0; f < k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

absl::StatusOr<int> BinarizeSentiment(double score, int scale) {
  if (!std::isfinite(score) || score < 0) {
    return absl::InvalidArgumentError(absl::StrCat("invalid score ", score));
  }
  switch (scale) {
    case 10:
      if (score > 10) return absl::InvalidArgumentError("score above 10");
      return score >= 5 ? 1 : 0;
    case 5:
      if (score > 5) return absl::InvalidArgumentError("score above 5");
      return score >= 3 ? 1 : 0;
    default:
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported rating scale ", scale, " (expected 5 or 10)"));
  }
}

}  // namespace dptg
