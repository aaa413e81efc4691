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


#include "dptg/exponential_mechanism.h"

#include <cmath>
#include <string>
#include <vector>

#include "dptg/dp_softmax.h"
#include "dptg/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dptg {
namespace {

using Vec = std::vector<double>;

QualityTable Binary() {
  return *QualityTable::Create({"x1", "x2"}, {"y1", "y2"}, {1, 0, 0, 1}, {{0, 1}});
}

// Direct evaluation of exp(scale * eps * q / dq) / Z without log-space tricks.
Vec DirectPmf(const QualityTable& t, size_t x, double eps, double scale) {
  const double dq = t.EffectiveSensitivity();
  Vec w(t.num_outputs());
  double z = 0;
  for (size_t y = 0; y < w.size(); ++y) z += w[y] = std::exp(scale * eps * t.at(x, y) / dq);
  for (double& v : w) v /= z;
  return w;
}

TEST(QualityTableTest, CreateValidates) {
  EXPECT_FALSE(QualityTable::Create({}, {"y"}, {}, {}).ok());
  EXPECT_FALSE(QualityTable::Create({"x"}, {"y"}, {1, 2}, {}).ok());
  EXPECT_FALSE(QualityTable::Create({"x"}, {"y"}, {NAN}, {}).ok());
  EXPECT_FALSE(QualityTable::Create({"x"}, {"y"}, {1}, {{0, 1}}).ok());
  EXPECT_FALSE(QualityTable::Create({"x"}, {"y"}, {1}, {}, 0.0).ok());
}

TEST(QualityTableTest, SensitivityFromAdjacency) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"a", "b", "c"}, {"y1", "y2"},
                                            {0.0, 0.2, 0.5, 0.1, 0.9, 1.0}, {{0, 1}}));
  EXPECT_DOUBLE_EQ(t.Sensitivity(), 0.5);
  t.adjacency = QualityTable::AllPairs(3);
  EXPECT_EQ(t.adjacency.size(), 3u);
  EXPECT_DOUBLE_EQ(t.Sensitivity(), 0.9);
  t.adjacency.clear();
  EXPECT_EQ(t.Sensitivity(), 0.0);
  t.declared_sensitivity = 1.0;
  EXPECT_EQ(t.EffectiveSensitivity(), 1.0);
}

TEST(PmfTest, ConstantRowIsUniform) {
  ASSERT_OK_AND_ASSIGN(QualityTable t, QualityTable::Create({"x", "z"}, {"a", "b", "c"},
                                                            {0.3, 0.3, 0.3, 0, 1, 0}, {{0, 1}}));
  ASSERT_OK_AND_ASSIGN(ExponentialPmf pmf, ExponentialMechanismPmf(t, 0, 2.0));
  for (double p : pmf.probs) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  EXPECT_FALSE(pmf.degenerate);
}

TEST(PmfTest, BinaryClosedForm) {
  ASSERT_OK_AND_ASSIGN(ExponentialPmf pmf, ExponentialMechanismPmf(Binary(), 0, 2.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(pmf.probs[0], e / (e + 1), 1e-15);
  EXPECT_NEAR(pmf.probs[1], 1 / (e + 1), 1e-15);
}

TEST(PmfTest, ZeroSensitivityIsUniform) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"x", "z"}, {"a", "b"}, {1, 0, 1, 0}, {{0, 1}}));
  ASSERT_OK_AND_ASSIGN(ExponentialPmf pmf, ExponentialMechanismPmf(t, 0, 1.0));
  EXPECT_TRUE(pmf.degenerate);
  EXPECT_EQ(pmf.probs, (Vec{0.5, 0.5}));
}

TEST(PmfTest, Errors) {
  EXPECT_FALSE(ExponentialMechanismPmf(Binary(), 2, 1.0).ok());
  EXPECT_FALSE(ExponentialMechanismPmf(Binary(), 0, 0.0).ok());
  EXPECT_FALSE(ExponentialMechanismPmf(Binary(), 0, INFINITY).ok());
}

TEST(PmfTest, AgreesWithDirectFormulaAndSoftmax) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t m = 1 + rng.NextBelow(32);
    Vec q(m);
    for (double& v : q) v = rng.NextUniform();
    ASSERT_OK_AND_ASSIGN(QualityTable t,
                         QualityTable::Create({"x"}, std::vector<std::string>(m, "y"), q, {}, 1.0));
    const double temperature = 0.05 + 5 * rng.NextUniform();
    const double eps = EpsilonFromTemperature(temperature, 1.0);
    ASSERT_OK_AND_ASSIGN(ExponentialPmf pmf, ExponentialMechanismPmf(t, 0, eps));
    ASSERT_OK_AND_ASSIGN(Vec soft, SoftmaxWithTemperature(q, temperature));
    const Vec direct = DirectPmf(t, 0, eps, 0.5);
    for (size_t y = 0; y < m; ++y) {
      ASSERT_NEAR(pmf.probs[y], soft[y], 1e-12);
      ASSERT_NEAR(pmf.probs[y], direct[y], 1e-12);
    }
  }
}

TEST(AuditTest, BinaryTableRatioIsHalfEpsilon) {
  for (double eps : {0.1, 1.0, 2.0, 5.0}) {
    ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(Binary(), eps));
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.max_ratio, std::exp(eps / 2), 1e-12 * std::exp(eps / 2));
    EXPECT_DOUBLE_EQ(r.bound, std::exp(eps));
  }
}

TEST(AuditTest, IdenticalRowsGiveUnitRatio) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"x", "z"}, {"a", "b"}, {0.1, 0.7, 0.1, 0.7}, {{0, 1}},
                                            1.0));
  ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(t, 0.01));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.max_ratio, 1.0, 1e-15);
}

TEST(AuditTest, MisScaledMechanisms) {
  // Exponent eps on the binary table lands exactly on the bound.
  ASSERT_OK_AND_ASSIGN(AuditReport boundary, VerifyDpBound(Binary(), 1.0, {1.0, 1.0}));
  EXPECT_NEAR(boundary.max_ratio, std::exp(1.0), 1e-12);
  EXPECT_TRUE(boundary.pass);
  ASSERT_OK_AND_ASSIGN(AuditReport doubled, VerifyDpBound(Binary(), 1.0, {1.0, 2.0}));
  EXPECT_FALSE(doubled.pass);
  EXPECT_NEAR(doubled.max_ratio, std::exp(2.0), 1e-11);
  // Rows (1,0,0) and (0,1,1) push the exponent-eps variant past the bound.
  ASSERT_OK_AND_ASSIGN(QualityTable witness,
                       QualityTable::Create({"x1", "x2"}, {"a", "b", "c"}, {1, 0, 0, 0, 1, 1},
                                            {{0, 1}}));
  ASSERT_OK_AND_ASSIGN(AuditReport bad, VerifyDpBound(witness, 1.0, {1.0, 1.0}));
  const double e = std::exp(1.0);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.max_ratio, e * (1 + 2 * e) / (e + 2), 1e-12);
  ASSERT_OK_AND_ASSIGN(AuditReport good, VerifyDpBound(witness, 1.0));
  EXPECT_TRUE(good.pass);
}

TEST(AuditTest, MechanismBuiltForLargerEpsilonFails) {
  ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(Binary(), 0.5, {2.0, 0.5}));
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_ratio, std::exp(1.0), 1e-12);
  EXPECT_NE(r.worst_pair.first, r.worst_pair.second);
}

// Oracle: direct pmfs, every adjacent pair in both orientations.
TEST(AuditTest, RandomTablesAgreeWithDirectRatios) {
  RngStream rng(2, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 2 + rng.NextBelow(7), m = 1 + rng.NextBelow(32);
    Vec q(n * m);
    for (double& v : q) v = rng.NextUniform();
    ASSERT_OK_AND_ASSIGN(QualityTable t,
                         QualityTable::Create(std::vector<std::string>(n, "x"),
                                              std::vector<std::string>(m, "y"), q,
                                              QualityTable::AllPairs(n)));
    const double eps = 0.1 + 4 * rng.NextUniform();
    ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(t, eps));
    double worst = 1.0;
    for (const auto& [a, b] : t.adjacency) {
      const Vec pa = DirectPmf(t, a, eps, 0.5), pb = DirectPmf(t, b, eps, 0.5);
      for (size_t y = 0; y < m; ++y) worst = std::max({worst, pa[y] / pb[y], pb[y] / pa[y]});
    }
    EXPECT_NEAR(r.max_ratio, worst, 1e-9 * worst);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(worst, std::exp(eps) + 1e-9);
  }
}

TEST(AuditTest, DeclaredSensitivityBelowTableIsNoted) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"x1", "x2"}, {"a", "b"}, {3, 0, 0, 3}, {{0, 1}}, 1.0));
  ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(t, 1.0));
  EXPECT_FALSE(r.note.empty());
  EXPECT_FALSE(r.pass);
}

TEST(AuditTest, OversizedTableRejected) {
  QualityTable t;
  t.inputs.assign(2, "x");
  t.outputs.assign(kMaxAuditCells, "y");
  t.q.assign(2 * kMaxAuditCells, 0.0);
  t.adjacency = {{0, 1}};
  auto r = VerifyDpBound(t, 1.0);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(JsonTest, TableRoundTrip) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"a", "b"}, {"y", "z", "w"}, {0, 0.5, 1, 1, 0.25, 0},
                                            {{0, 1}}, 1.0));
  ASSERT_OK_AND_ASSIGN(QualityTable back, QualityTableFromJson(QualityTableToJson(t)));
  EXPECT_EQ(back.inputs, t.inputs);
  EXPECT_EQ(back.outputs, t.outputs);
  EXPECT_EQ(back.q, t.q);
  EXPECT_EQ(back.adjacency, t.adjacency);
  EXPECT_EQ(back.declared_sensitivity, t.declared_sensitivity);
  EXPECT_FALSE(QualityTableFromJson(nlohmann::json{{"inputs", {"a"}}}).ok());
  EXPECT_FALSE(QualityTableFromJson(nlohmann::json::parse(
                   R"({"inputs":["a","b"],"outputs":["y"],"q":[0,1],"adjacency":[[0]]})"))
                   .ok());
}

TEST(JsonTest, AuditReportRoundTrip) {
  ASSERT_OK_AND_ASSIGN(AuditReport r, VerifyDpBound(Binary(), 0.5, {2.0, 0.5}));
  ASSERT_OK_AND_ASSIGN(AuditReport back, AuditReportFromJson(AuditReportToJson(r, Binary()), Binary()));
  EXPECT_EQ(back.epsilon, r.epsilon);
  EXPECT_EQ(back.max_ratio, r.max_ratio);
  EXPECT_EQ(back.bound, r.bound);
  EXPECT_EQ(back.pass, r.pass);
  EXPECT_EQ(back.worst_pair, r.worst_pair);
  EXPECT_EQ(back.worst_output, r.worst_output);
}

TEST(JsonTest, LoadQualityTableFile) {
  testing::TempDir dir;
  testing::WriteFile(dir.File("t.json"), QualityTableToJson(Binary()).dump());
  ASSERT_OK_AND_ASSIGN(QualityTable t, LoadQualityTable(dir.File("t.json")));
  EXPECT_EQ(t.q, Binary().q);
  testing::WriteFile(dir.File("bad.json"), "{not json");
  EXPECT_FALSE(LoadQualityTable(dir.File("bad.json")).ok());
  EXPECT_EQ(LoadQualityTable(dir.File("missing.json")).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(SequenceAuditTest, ComposedBoundHolds) {
  ASSERT_OK_AND_ASSIGN(QualityTable t,
                       QualityTable::Create({"a", "b", "c"}, {"p", "q", "r", "s"},
                                            {1, 0, 0.5, 0.2, 0, 1, 0.3, 0.9, 0.6, 0.6, 0, 1},
                                            QualityTable::AllPairs(3)));
  for (size_t n : {1u, 2u, 3u}) {
    ASSERT_OK_AND_ASSIGN(SequenceAuditReport r, VerifySequenceDpBound(t, 1.0, n, {1.0, 0.5}));
    EXPECT_TRUE(r.pass) << n;
    EXPECT_DOUBLE_EQ(r.bound, std::exp(1.0 * n));
    EXPECT_LE(r.max_ratio, r.bound + 1e-9);
  }
}

TEST(SequenceAuditTest, RatioMultipliesAcrossSteps) {
  for (size_t n : {1u, 2u, 3u}) {
    ASSERT_OK_AND_ASSIGN(SequenceAuditReport r, VerifySequenceDpBound(Binary(), 2.0, n, {2.0, 0.5}));
    EXPECT_NEAR(r.max_ratio, std::exp(1.0 * n), 1e-9);
    ASSERT_EQ(r.worst_output.size(), n);
  }
  ASSERT_OK_AND_ASSIGN(SequenceAuditReport bad, VerifySequenceDpBound(Binary(), 1.0, 2, {1.0, 2.0}));
  EXPECT_FALSE(bad.pass);
  EXPECT_FALSE(VerifySequenceDpBound(Binary(), 1.0, 0, {1.0, 0.5}).ok());
}

}  // namespace
}  // namespace dptg
