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

// Compiled with -mavx2 and without -mfma; fused multiply-add would change the
// rounding relative to the scalar reference.

#include <immintrin.h>

#include "dptg/kernels/distance_kernels.h"

namespace dptg::kernels::avx2 {
namespace {

// (lane0 + lane1) + (lane2 + lane3), matching the scalar reduction order.
inline double ReduceLanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double SquaredL2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double sum = ReduceLanes(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum = sum + d * d;
  }
  return sum;
}

double Dot(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                           _mm256_loadu_pd(b + i)));
  }
  double sum = ReduceLanes(acc);
  for (; i < n; ++i) {
    sum = sum + a[i] * b[i];
  }
  return sum;
}

void SquaredL2Rows(const double* matrix, size_t rows, size_t dim,
                   const double* query, double* out) {
  // Two rows per iteration share the query loads.
  size_t r = 0;
  for (; r + 2 <= rows; r += 2) {
    const double* row0 = matrix + r * dim;
    const double* row1 = row0 + dim;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= dim; i += 4) {
      const __m256d q = _mm256_loadu_pd(query + i);
      const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(row0 + i), q);
      const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(row1 + i), q);
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    double sum0 = ReduceLanes(acc0);
    double sum1 = ReduceLanes(acc1);
    for (; i < dim; ++i) {
      const double d0 = row0[i] - query[i];
      const double d1 = row1[i] - query[i];
      sum0 = sum0 + d0 * d0;
      sum1 = sum1 + d1 * d1;
    }
    out[r] = sum0;
    out[r + 1] = sum1;
  }
  for (; r < rows; ++r) {
    out[r] = SquaredL2(matrix + r * dim, query, dim);
  }
}

}  // namespace dptg::kernels::avx2
