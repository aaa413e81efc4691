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

#include <atomic>
#include <cassert>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dptg/kernels/distance_kernels.h"

namespace dptg::kernels {
namespace {

bool CpuHasAvx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Isa>& ActiveIsaSlot() {
  static std::atomic<Isa> slot{DetectIsa()};
  return slot;
}

}  // namespace

std::string IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

absl::StatusOr<Isa> ParseIsa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "auto") return DetectIsa();
  return absl::InvalidArgumentError(
      absl::StrCat("unknown kernel '", std::string(name), "' (expected auto, scalar, avx2)"));
}

Isa DetectIsa() {
  static const Isa detected = CpuHasAvx2() ? Isa::kAvx2 : Isa::kScalar;
  return detected;
}

Isa ActiveIsa() { return ActiveIsaSlot().load(std::memory_order_relaxed); }

absl::Status SetActiveIsa(Isa isa) {
  if (isa == Isa::kAvx2 && DetectIsa() != Isa::kAvx2) {
    return absl::FailedPreconditionError("CPU does not support AVX2");
  }
  ActiveIsaSlot().store(isa, std::memory_order_relaxed);
  return absl::OkStatus();
}

double SquaredL2(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  if (ActiveIsa() == Isa::kAvx2) return avx2::SquaredL2(a.data(), b.data(), a.size());
  return scalar::SquaredL2(a.data(), b.data(), a.size());
}

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  if (ActiveIsa() == Isa::kAvx2) return avx2::Dot(a.data(), b.data(), a.size());
  return scalar::Dot(a.data(), b.data(), a.size());
}

void SquaredL2Rows(std::span<const double> matrix, std::span<const double> query,
                   std::span<double> out) {
  const size_t dim = query.size();
  assert(dim > 0 && matrix.size() == out.size() * dim);
  if (ActiveIsa() == Isa::kAvx2) {
    avx2::SquaredL2Rows(matrix.data(), out.size(), dim, query.data(), out.data());
  } else {
    scalar::SquaredL2Rows(matrix.data(), out.size(), dim, query.data(), out.data());
  }
}

}  // namespace dptg::kernels
