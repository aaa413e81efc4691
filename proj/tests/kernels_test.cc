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


#include "dptg/kernels/distance_kernels.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "dptg/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dptg::kernels {
namespace {

std::vector<double> RandomVector(size_t n, RngStream& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = (rng.NextUniform() - 0.5) * std::ldexp(1.0, int(rng.NextBelow(20)) - 10);
  return v;
}

bool SameBits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

TEST(KernelNamesTest, ParseRoundTrip) {
  for (Isa isa : {Isa::kScalar, Isa::kAvx2}) {
    ASSERT_OK_AND_ASSIGN(Isa parsed, ParseIsa(IsaName(isa)));
    EXPECT_EQ(parsed, isa);
  }
  ASSERT_OK_AND_ASSIGN(Isa detected, ParseIsa("auto"));
  EXPECT_EQ(detected, DetectIsa());
  EXPECT_FALSE(ParseIsa("sse9").ok());
}

TEST(ScalarKernelTest, MatchesLongDoubleReference) {
  RngStream rng(1, 0);
  for (size_t n = 0; n < 70; ++n) {
    const auto a = RandomVector(n, rng), b = RandomVector(n, rng);
    long double d2 = 0, dot = 0;
    for (size_t i = 0; i < n; ++i) {
      d2 += (long double)(a[i] - b[i]) * (a[i] - b[i]);
      dot += (long double)a[i] * b[i];
    }
    EXPECT_NEAR(scalar::SquaredL2(a.data(), b.data(), n), double(d2), 1e-12 * (1 + double(d2)));
    EXPECT_NEAR(scalar::Dot(a.data(), b.data(), n), double(dot), 1e-12 * (1 + std::fabs(double(dot))));
  }
}

TEST(ScalarKernelTest, RowsAgreeWithPairwise) {
  RngStream rng(2, 0);
  const size_t rows = 13, dim = 11;
  const auto m = RandomVector(rows * dim, rng), q = RandomVector(dim, rng);
  std::vector<double> out(rows);
  scalar::SquaredL2Rows(m.data(), rows, dim, q.data(), out.data());
  for (size_t r = 0; r < rows; ++r) {
    EXPECT_TRUE(SameBits(out[r], scalar::SquaredL2(m.data() + r * dim, q.data(), dim)));
  }
}

class Avx2EquivalenceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (DetectIsa() != Isa::kAvx2) GTEST_SKIP() << "CPU lacks AVX2";
  }
};

TEST_F(Avx2EquivalenceTest, BitwiseIdenticalPairs) {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    for (size_t n = 0; n < 80; ++n) {
      const auto a = RandomVector(n, rng), b = RandomVector(n, rng);
      ASSERT_TRUE(SameBits(scalar::SquaredL2(a.data(), b.data(), n),
                           avx2::SquaredL2(a.data(), b.data(), n)))
          << "n=" << n;
      ASSERT_TRUE(SameBits(scalar::Dot(a.data(), b.data(), n), avx2::Dot(a.data(), b.data(), n)))
          << "n=" << n;
    }
  }
}

TEST_F(Avx2EquivalenceTest, BitwiseIdenticalRows) {
  RngStream rng(4, 0);
  for (size_t dim : {1u, 3u, 4u, 7u, 8u, 50u, 301u}) {
    const size_t rows = 37;
    const auto m = RandomVector(rows * dim, rng), q = RandomVector(dim, rng);
    std::vector<double> s(rows), v(rows);
    scalar::SquaredL2Rows(m.data(), rows, dim, q.data(), s.data());
    avx2::SquaredL2Rows(m.data(), rows, dim, q.data(), v.data());
    for (size_t r = 0; r < rows; ++r) ASSERT_TRUE(SameBits(s[r], v[r])) << dim << " " << r;
  }
}

TEST(DispatchTest, ActiveIsaSwitches) {
  const Isa original = ActiveIsa();
  ASSERT_OK(SetActiveIsa(Isa::kScalar));
  EXPECT_EQ(ActiveIsa(), Isa::kScalar);
  RngStream rng(5, 0);
  const auto a = RandomVector(33, rng), b = RandomVector(33, rng);
  const double scalar_value = SquaredL2(a, b);
  if (DetectIsa() == Isa::kAvx2) {
    ASSERT_OK(SetActiveIsa(Isa::kAvx2));
    EXPECT_TRUE(SameBits(SquaredL2(a, b), scalar_value));
  } else {
    EXPECT_FALSE(SetActiveIsa(Isa::kAvx2).ok());
  }
  ASSERT_OK(SetActiveIsa(original));
}

}  // namespace
}  // namespace dptg::kernels
