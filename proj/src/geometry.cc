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

#include "dptg/geometry.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptg {

std::string GeometryName(Geometry geometry) {
  return geometry == Geometry::kEuclidean ? "euclidean" : "poincare";
}

absl::StatusOr<Geometry> ParseGeometry(std::string_view name) {
  if (name == "euclidean") return Geometry::kEuclidean;
  if (name == "poincare" || name == "poincare-ball") return Geometry::kPoincareBall;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown geometry '", std::string(name), "' (expected euclidean, poincare)"));
}

}  // namespace dptg
