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

#ifndef DPTG_RNG_H_
#define DPTG_RNG_H_

#include <array>
#include <cstdint>
#include <optional>

namespace dptg {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of counter and key.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Counter-based random stream addressed by (seed, stream_id). The seed is the
// Philox key; the stream id occupies the upper half of the counter, so
// distinct streams never overlap and can be consumed independently. A single
// stream is not thread-safe.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform on (0, 1].
  double NextUniformPositive();
  // Standard normal via the Marsaglia polar method.
  double NextGaussian();
  // Uniform integer in [0, bound); bound must be positive.
  uint64_t NextBelow(uint64_t bound);

 private:
  void Refill();

  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_gaussian_;
};

// Derives a child seed from a parent seed and a label, for sub-runs that need
// their own seed rather than their own stream.
uint64_t DeriveSeed(uint64_t seed, uint64_t label);

}  // namespace dptg

#endif  // DPTG_RNG_H_
