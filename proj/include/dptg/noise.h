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

#ifndef DPTG_NOISE_H_
#define DPTG_NOISE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dptg/geometry.h"
#include "dptg/rng.h"

namespace dptg {

// Parameters of the additive noise distribution p_eps(eta) used by the
// word-level mechanism.
struct NoiseSpec {
  double epsilon = 1.0;
  size_t dim = 1;
  Geometry geometry = Geometry::kEuclidean;

  static absl::StatusOr<NoiseSpec> Create(double epsilon, size_t dim,
                                          Geometry geometry);
};

// Uniform direction on the unit sphere S^{dim-1}: a normalized standard
// Gaussian vector.
std::vector<double> SampleUnitDirection(size_t dim, RngStream& rng);

// Gamma(shape, rate) by Marsaglia and Tsang's squeeze-and-reject method
// ("A simple method for generating gamma variables", 2000). Shapes below one
// use the boost Gamma(shape + 1) * U^(1/shape).
double SampleGamma(double shape, double rate, RngStream& rng);

// Radius of the multivariate Laplace density proportional to
// exp(-epsilon * ||z||) in `dim` dimensions, which is Gamma(dim, epsilon).
double SampleLaplaceRadius(size_t dim, double epsilon, RngStream& rng);

// Samples eta for a point `base_point`.
//
// Euclidean: eta = radius * direction, independent of the base point.
// Poincare ball: a Euclidean Laplace vector in ambient coordinates is added at
// the base point; if the sum leaves the ball it is radially projected back to
// norm kPoincareMaxNorm. The returned eta is (projected point - base_point),
// so base_point + eta always lies inside the open ball. This is a
// reconstruction; no analytic metric-DP guarantee is claimed for it.
absl::StatusOr<std::vector<double>> SampleNoise(const NoiseSpec& spec,
                                                std::span<const double> base_point,
                                                RngStream& rng);

// base_point + SampleNoise(...), the perturbed embedding.
absl::StatusOr<std::vector<double>> PerturbEmbedding(
    const NoiseSpec& spec, std::span<const double> base_point, RngStream& rng);

}  // namespace dptg

#endif  // DPTG_NOISE_H_
