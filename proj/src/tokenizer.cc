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

#include "dptg/tokenizer.h"

#include "absl/strings/ascii.h"
#include "absl/strings/str_join.h"

namespace dptg {

std::vector<std::string> Tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (c < 0x80 && absl::ascii_isspace(c)) {
      flush();
    } else if (c < 0x80 && absl::ascii_ispunct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else {
      current.push_back(lowercase ? absl::ascii_tolower(c) : ch);
    }
  }
  flush();
  return tokens;
}

std::string Detokenize(std::span<const std::string> tokens) {
  return absl::StrJoin(tokens, " ");
}

}  // namespace dptg
