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

#include "dptg/noise.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dptg/kernels/distance_kernels.h"

namespace dptg {

absl::StatusOr<NoiseSpec> NoiseSpec::Create(double epsilon, size_t dim,
                                            Geometry geometry) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (dim == 0) return absl::InvalidArgumentError("dim must be at least 1");
  return NoiseSpec{epsilon, dim, geometry};
}

std::vector<double> SampleUnitDirection(size_t dim, RngStream& rng) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.NextGaussian();
      norm2 += x * x;
    }
  } while (norm2 < 1e-300);
  // Division rather than a reciprocal keeps dim=1 draws exactly +-1.
  const double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

double SampleGamma(double shape, double rate, RngStream& rng) {
  if (shape < 1.0) {
    const double u = rng.NextUniformPositive();
    return SampleGamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.NextGaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.NextUniformPositive();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double SampleLaplaceRadius(size_t dim, double epsilon, RngStream& rng) {
  return SampleGamma(static_cast<double>(dim), epsilon, rng);
}

absl::StatusOr<std::vector<double>> SampleNoise(const NoiseSpec& spec,
                                                std::span<const double> base_point,
                                                RngStream& rng) {
  if (base_point.size() != spec.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "base point has dimension ", base_point.size(), ", expected ", spec.dim));
  }
  const double base_norm2 = kernels::Dot(base_point, base_point);
  if (spec.geometry == Geometry::kPoincareBall && !(base_norm2 < 1.0)) {
    return absl::InvalidArgumentError(
        "base point must lie strictly inside the unit ball");
  }
  const double radius = SampleLaplaceRadius(spec.dim, spec.epsilon, rng);
  std::vector<double> eta = SampleUnitDirection(spec.dim, rng);
  for (double& x : eta) x *= radius;
  if (spec.geometry == Geometry::kEuclidean) return eta;

  std::vector<double> moved(spec.dim);
  for (size_t i = 0; i < spec.dim; ++i) moved[i] = base_point[i] + eta[i];
  const double norm = std::sqrt(kernels::Dot(moved, moved));
  if (norm >= kPoincareMaxNorm) {
    const double scale = kPoincareMaxNorm / norm;
    for (size_t i = 0; i < spec.dim; ++i) {
      eta[i] = moved[i] * scale - base_point[i];
    }
  }
  return eta;
}

absl::StatusOr<std::vector<double>> PerturbEmbedding(
    const NoiseSpec& spec, std::span<const double> base_point, RngStream& rng) {
  auto eta = SampleNoise(spec, base_point, rng);
  if (!eta.ok()) return eta.status();
  std::vector<double> out(base_point.begin(), base_point.end());
  for (size_t i = 0; i < out.size(); ++i) out[i] += (*eta)[i];
  if (spec.geometry == Geometry::kPoincareBall) {
    // Rounding in base + (projected - base) can land a hair outside.
    const double norm = std::sqrt(kernels::Dot(out, out));
    if (norm >= kPoincareMaxNorm) {
      const double scale = kPoincareMaxNorm / norm;
      for (double& x : out) x *= scale;
    }
  }
  return out;
}

}  // namespace dptg
