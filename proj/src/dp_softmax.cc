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

#include "dptg/dp_softmax.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptg {

absl::StatusOr<DpSamplerConfig> DpSamplerConfig::Create(double temperature,
                                                        double sensitivity,
                                                        size_t vocab_size) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    return absl::InvalidArgumentError(
        absl::StrCat("temperature must be positive and finite, got ", temperature));
  }
  if (!(sensitivity > 0.0) || sensitivity > 1.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity must lie in (0, 1] for clamped logits, got ", sensitivity));
  }
  if (vocab_size == 0) return absl::InvalidArgumentError("empty vocabulary");
  return DpSamplerConfig{temperature, sensitivity, vocab_size};
}

double DpSamplerConfig::epsilon() const {
  return EpsilonFromTemperature(temperature, sensitivity);
}

absl::StatusOr<std::vector<double>> SoftmaxWithTemperature(
    std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) {
    return absl::InvalidArgumentError("temperature must be positive");
  }
  if (logits.empty()) return absl::InvalidArgumentError("empty logit vector");
  double max_logit = -INFINITY;
  for (double u : logits) {
    if (!std::isfinite(u)) return absl::InvalidArgumentError("non-finite logit");
    max_logit = std::max(max_logit, u);
  }
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (size_t j = 0; j < logits.size(); ++j) {
    probs[j] = std::exp((logits[j] - max_logit) / temperature);
    total += probs[j];
  }
  for (double& p : probs) p /= total;
  return probs;
}

double EpsilonFromTemperature(double temperature, double delta_q) {
  return 2.0 * delta_q / temperature;
}

double TemperatureFromEpsilon(double epsilon, double delta_q) {
  return 2.0 * delta_q / epsilon;
}

LogitVector MinMaxRescale(std::span<const double> raw) {
  LogitVector out{std::vector<double>(raw.size(), 0.5), true};
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (size_t j = 0; j < raw.size(); ++j) {
    out.values[j] = std::clamp((raw[j] - *lo) / range, 0.0, 1.0);
  }
  return out;
}

LogitVector ClampLogits(std::span<const double> raw) {
  const bool in_range = std::all_of(raw.begin(), raw.end(),
                                    [](double u) { return u >= 0.0 && u <= 1.0; });
  if (in_range) return LogitVector{std::vector<double>(raw.begin(), raw.end()), true};
  return MinMaxRescale(raw);
}

size_t SampleIndex(std::span<const double> probs, RngStream& rng) {
  const double u = rng.NextUniform();
  double cumulative = 0.0;
  size_t last_positive = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the total a hair below one.
  return last_positive;
}

}  // namespace dptg
