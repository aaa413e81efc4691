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

#ifndef DPTG_EXPONENTIAL_MECHANISM_H_
#define DPTG_EXPONENTIAL_MECHANISM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dptg {

// Finite quality function q: inputs x outputs -> R with an explicit adjacency
// relation on inputs. Adjacency pairs are unordered.
struct QualityTable {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<double> q;  // row-major, inputs.size() x outputs.size()
  std::vector<std::pair<size_t, size_t>> adjacency;
  // A sensitivity bound fixed by construction (e.g. 1 for logits clamped to
  // [0, 1]). When absent the table-derived value is used.
  std::optional<double> declared_sensitivity;

  static absl::StatusOr<QualityTable> Create(
      std::vector<std::string> inputs, std::vector<std::string> outputs,
      std::vector<double> q, std::vector<std::pair<size_t, size_t>> adjacency,
      std::optional<double> declared_sensitivity = std::nullopt);

  // Every pair of distinct inputs, i.e. the local model.
  static std::vector<std::pair<size_t, size_t>> AllPairs(size_t num_inputs);

  size_t num_inputs() const { return inputs.size(); }
  size_t num_outputs() const { return outputs.size(); }
  double at(size_t x, size_t y) const { return q[x * outputs.size() + y]; }
  std::span<const double> row(size_t x) const {
    return {q.data() + x * outputs.size(), outputs.size()};
  }

  // max_y max_{x1 ~ x2} q(x1, y) - q(x2, y), over both orientations of every
  // adjacent pair. Zero when there are no adjacent pairs.
  double Sensitivity() const;
  double EffectiveSensitivity() const;
};

absl::StatusOr<QualityTable> QualityTableFromJson(const nlohmann::json& j);
nlohmann::json QualityTableToJson(const QualityTable& table);
absl::StatusOr<QualityTable> LoadQualityTable(const std::string& path);

// Pr[E(x) = y] proportional to exp(exponent_scale * epsilon * q(x, y) / dq).
// exponent_scale = 0.5 is the Exponential mechanism; other values model
// mis-scaled implementations for auditing.
struct MechanismParams {
  double epsilon = 1.0;
  double exponent_scale = 0.5;
};

struct ExponentialPmf {
  std::vector<double> probs;
  // Sensitivity was zero, so the pmf is uniform.
  bool degenerate = false;
};

absl::StatusOr<ExponentialPmf> ExponentialMechanismPmf(const QualityTable& table,
                                                       size_t input,
                                                       const MechanismParams& params);
absl::StatusOr<ExponentialPmf> ExponentialMechanismPmf(const QualityTable& table,
                                                       size_t input, double epsilon);

// Exhaustive check of Pr[M(x1) = y] <= e^epsilon Pr[M(x2) = y] over every
// adjacent pair and output. For a discrete mechanism the singleton outputs
// are the worst case among all output sets.
struct AuditReport {
  double epsilon = 0.0;
  double max_ratio = 1.0;
  double bound = 1.0;
  bool pass = true;
  std::pair<size_t, size_t> worst_pair{0, 0};
  size_t worst_output = 0;
  double sensitivity = 0.0;
  std::string note;
};

inline constexpr double kAuditSlack = 1e-9;
inline constexpr size_t kMaxAuditCells = 1'000'000;

// Audits the correctly scaled mechanism at `epsilon`.
absl::StatusOr<AuditReport> VerifyDpBound(const QualityTable& table, double epsilon);
// Audits `mechanism` against the claimed `epsilon`.
absl::StatusOr<AuditReport> VerifyDpBound(const QualityTable& table, double epsilon,
                                          const MechanismParams& mechanism);

nlohmann::json AuditReportToJson(const AuditReport& report, const QualityTable& table);
absl::StatusOr<AuditReport> AuditReportFromJson(const nlohmann::json& j,
                                                const QualityTable& table);

// n independent applications of the mechanism to a length-n input sequence.
// Enumerates every pair of position-wise adjacent (or equal) sequences and
// every output sequence, comparing against e^(n * epsilon).
struct SequenceAuditReport {
  size_t length = 0;
  double per_step_epsilon = 0.0;
  double max_ratio = 1.0;
  double bound = 1.0;
  bool pass = true;
  std::vector<size_t> worst_left;
  std::vector<size_t> worst_right;
  std::vector<size_t> worst_output;
};

inline constexpr size_t kMaxSequenceAuditCells = 20'000'000;

absl::StatusOr<SequenceAuditReport> VerifySequenceDpBound(
    const QualityTable& table, double per_step_epsilon, size_t length,
    const MechanismParams& mechanism);

}  // namespace dptg

#endif  // DPTG_EXPONENTIAL_MECHANISM_H_
