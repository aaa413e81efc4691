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

#ifndef DPTG_CORPUS_H_
#define DPTG_CORPUS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dptg {

struct Record {
  std::string id;
  std::string author;
  // Integer sentiments are kept as their decimal string and written back as
  // integers.
  std::string sentiment;
  bool sentiment_is_integer = false;
  std::string text;

  bool operator==(const Record&) const = default;
};

// One JSON object per line: {id, author, sentiment: int|string, text}.
// Blank lines are skipped; schema errors carry the line number. `text_field`
// names the member read into Record::text, so mechanism outputs such as
// "anonymized_text" can be loaded as corpora.
absl::StatusOr<std::vector<Record>> ReadJsonl(std::istream& in,
                                              std::string_view text_field = "text");
absl::StatusOr<std::vector<Record>> ReadJsonlFile(const std::string& path,
                                                  std::string_view text_field = "text");
void WriteJsonl(const std::vector<Record>& records, std::ostream& out);
std::string RecordToJsonLine(const Record& record);

struct Split {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// Seeded split stratified by the joint (author, sentiment) label. Every
// author and every sentiment with at least two records ends up in both
// halves. Indices are sorted.
absl::StatusOr<Split> StratifiedSplit(const std::vector<Record>& records,
                                      uint64_t seed, double test_fraction = 0.2);

// Stratified k-fold partition: each record is in exactly one test fold and
// each fold is trained on the rest. k must be at least 2.
absl::StatusOr<std::vector<Split>> StratifiedFolds(const std::vector<Record>& records,
                                                   uint64_t seed, size_t k);

// Raw review scores to binary sentiment. A 10-point scale is positive at 5
// and up; a 5-point scale at 3 and up.
absl::StatusOr<int> BinarizeSentiment(double score, int scale);

}  // namespace dptg

#endif  // DPTG_CORPUS_H_
