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

#ifndef DPTG_DP_SOFTMAX_H_
#define DPTG_DP_SOFTMAX_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dptg/rng.h"

namespace dptg {

// Decoder logits. When `clamped` is set every entry lies in [0, 1], which
// bounds the sensitivity of the induced quality function by one.
struct LogitVector {
  std::vector<double> values;
  bool clamped = false;
};

// Temperature sampling parameters. Sampling from softmax(u / T) with
// 0 <= u <= 1 is the Exponential mechanism at epsilon = 2 * sensitivity / T.
struct DpSamplerConfig {
  double temperature = 1.0;
  double sensitivity = 1.0;
  size_t vocab_size = 0;

  static absl::StatusOr<DpSamplerConfig> Create(double temperature,
                                                double sensitivity,
                                                size_t vocab_size);
  double epsilon() const;
};

// exp(u_j / T) / sum_k exp(u_k / T), stabilized by subtracting max(u).
absl::StatusOr<std::vector<double>> SoftmaxWithTemperature(
    std::span<const double> logits, double temperature);

double EpsilonFromTemperature(double temperature, double delta_q);
double TemperatureFromEpsilon(double epsilon, double delta_q);

// Affine min-max map onto [0, 1]; constant vectors map to all 0.5.
LogitVector MinMaxRescale(std::span<const double> raw);

// Vectors already inside [0, 1] pass through unchanged; anything else is
// min-max rescaled. Ranking is preserved either way.
LogitVector ClampLogits(std::span<const double> raw);

// Inverse-CDF draw of an index with probability probs[i].
size_t SampleIndex(std::span<const double> probs, RngStream& rng);

}  // namespace dptg

#endif  // DPTG_DP_SOFTMAX_H_
