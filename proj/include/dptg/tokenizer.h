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

#ifndef DPTG_TOKENIZER_H_
#define DPTG_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dptg {

// Splits on whitespace; every ASCII punctuation character becomes its own
// token ("great." -> "great", "."). Non-ASCII bytes are word characters.
std::vector<std::string> Tokenize(std::string_view text, bool lowercase = true);

// Joins tokens with single spaces.
std::string Detokenize(std::span<const std::string> tokens);

}  // namespace dptg

#endif  // DPTG_TOKENIZER_H_
