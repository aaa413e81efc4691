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

#ifndef DPTG_STATUS_MACROS_H_
#define DPTG_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPTG_STATUS_CONCAT_INNER(a, b) a##b
#define DPTG_STATUS_CONCAT(a, b) DPTG_STATUS_CONCAT_INNER(a, b)

#define DPTG_RETURN_IF_ERROR(expr)        \
  do {                                    \
    ::absl::Status _dptg_status = (expr); \
    if (!_dptg_status.ok()) {             \
      return _dptg_status;                \
    }                                     \
  } while (0)

#define DPTG_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                               \
  if (!tmp.ok()) {                                 \
    return tmp.status();                           \
  }                                                \
  lhs = std::move(tmp).value()

#define DPTG_ASSIGN_OR_RETURN(lhs, expr) \
  DPTG_ASSIGN_OR_RETURN_IMPL(            \
      DPTG_STATUS_CONCAT(_dptg_statusor_, __LINE__), lhs, expr)

#endif  // DPTG_STATUS_MACROS_H_
