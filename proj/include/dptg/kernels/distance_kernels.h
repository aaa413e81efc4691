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

#ifndef DPTG_KERNELS_DISTANCE_KERNELS_H_
#define DPTG_KERNELS_DISTANCE_KERNELS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

// Dense double-precision kernels behind nearest-neighbor search and the
// similarity proxy. Every variant accumulates in four interleaved lanes and
// reduces them as (lane0 + lane1) + (lane2 + lane3) before adding the scalar
// tail, so the scalar and AVX2 paths return bitwise-identical results.

namespace dptg::kernels {

enum class Isa { kScalar, kAvx2 };

std::string IsaName(Isa isa);
absl::StatusOr<Isa> ParseIsa(std::string_view name);

// Best instruction set supported by the running CPU.
Isa DetectIsa();

// Instruction set used by the dispatching entry points below. Defaults to
// DetectIsa(); SetActiveIsa fails if the CPU lacks the requested extension.
Isa ActiveIsa();
absl::Status SetActiveIsa(Isa isa);

double SquaredL2(std::span<const double> a, std::span<const double> b);
double Dot(std::span<const double> a, std::span<const double> b);

// out[r] = ||matrix[r] - query||^2 for a row-major rows x query.size() matrix.
void SquaredL2Rows(std::span<const double> matrix, std::span<const double> query,
                   std::span<double> out);

namespace scalar {
double SquaredL2(const double* a, const double* b, size_t n);
double Dot(const double* a, const double* b, size_t n);
void SquaredL2Rows(const double* matrix, size_t rows, size_t dim,
                   const double* query, double* out);
}  // namespace scalar

namespace avx2 {
// Only callable when DetectIsa() == Isa::kAvx2.
double SquaredL2(const double* a, const double* b, size_t n);
double Dot(const double* a, const double* b, size_t n);
void SquaredL2Rows(const double* matrix, size_t rows, size_t dim,
                   const double* query, double* out);
}  // namespace avx2

}  // namespace dptg::kernels

#endif  // DPTG_KERNELS_DISTANCE_KERNELS_H_
