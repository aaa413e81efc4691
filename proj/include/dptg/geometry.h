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

#ifndef DPTG_GEOMETRY_H_
#define DPTG_GEOMETRY_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace dptg {

// Geometry of an embedding space. Poincare ball points live strictly inside
// the open unit ball.
enum class Geometry { kEuclidean, kPoincareBall };

// Points pushed onto or past the unit sphere are pulled back to this norm.
inline constexpr double kPoincareMaxNorm = 1.0 - 1e-5;

std::string GeometryName(Geometry geometry);
absl::StatusOr<Geometry> ParseGeometry(std::string_view name);

}  // namespace dptg

#endif  // DPTG_GEOMETRY_H_
