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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dptg/status_macros.h"

namespace dptg {
namespace {

// log Pr[E(x) = y] for every y.
std::vector<double> LogPmf(const QualityTable& table, size_t x,
                           const MechanismParams& params, bool* degenerate) {
  const size_t m = table.num_outputs();
  const double dq = table.EffectiveSensitivity();
  std::vector<double> logp(m);
  if (!(dq > 0.0)) {
    if (degenerate != nullptr) *degenerate = true;
    std::fill(logp.begin(), logp.end(), -std::log(static_cast<double>(m)));
    return logp;
  }
  if (degenerate != nullptr) *degenerate = false;
  const double coeff = params.exponent_scale * params.epsilon / dq;
  double max_score = -INFINITY;
  for (size_t y = 0; y < m; ++y) {
    logp[y] = coeff * table.at(x, y);
    max_score = std::max(max_score, logp[y]);
  }
  double total = 0.0;
  for (double s : logp) total += std::exp(s - max_score);
  const double log_z = max_score + std::log(total);
  for (double& s : logp) s -= log_z;
  return logp;
}

std::vector<std::vector<double>> AllLogPmfs(const QualityTable& table,
                                            const MechanismParams& params,
                                            bool* degenerate) {
  std::vector<std::vector<double>> out(table.num_inputs());
  for (size_t x = 0; x < table.num_inputs(); ++x) {
    out[x] = LogPmf(table, x, params, degenerate);
  }
  return out;
}

absl::Status ValidateEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<QualityTable> QualityTable::Create(
    std::vector<std::string> inputs, std::vector<std::string> outputs,
    std::vector<double> q, std::vector<std::pair<size_t, size_t>> adjacency,
    std::optional<double> declared_sensitivity) {
  if (inputs.empty() || outputs.empty()) {
    return absl::InvalidArgumentError("quality table needs inputs and outputs");
  }
  if (q.size() != inputs.size() * outputs.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "q has ", q.size(), " entries, expected ", inputs.size() * outputs.size()));
  }
  for (double v : q) {
    if (!std::isfinite(v)) return absl::InvalidArgumentError("non-finite quality");
  }
  for (const auto& [a, b] : adjacency) {
    if (a >= inputs.size() || b >= inputs.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("adjacency pair (", a, ", ", b, ") out of range"));
    }
  }
  if (declared_sensitivity.has_value() && !(*declared_sensitivity > 0.0)) {
    return absl::InvalidArgumentError("declared sensitivity must be positive");
  }
  return QualityTable{std::move(inputs), std::move(outputs), std::move(q),
                      std::move(adjacency), declared_sensitivity};
}

std::vector<std::pair<size_t, size_t>> QualityTable::AllPairs(size_t num_inputs) {
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t a = 0; a < num_inputs; ++a) {
    for (size_t b = a + 1; b < num_inputs; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

double QualityTable::Sensitivity() const {
  double dq = 0.0;
  for (const auto& [a, b] : adjacency) {
    for (size_t y = 0; y < num_outputs(); ++y) {
      dq = std::max(dq, std::abs(at(a, y) - at(b, y)));
    }
  }
  return dq;
}

double QualityTable::EffectiveSensitivity() const {
  return declared_sensitivity.value_or(Sensitivity());
}

absl::StatusOr<QualityTable> QualityTableFromJson(const nlohmann::json& j) {
  try {
    std::vector<std::string> inputs = j.at("inputs").get<std::vector<std::string>>();
    std::vector<std::string> outputs = j.at("outputs").get<std::vector<std::string>>();
    std::vector<double> q = j.at("q").get<std::vector<double>>();
    std::vector<std::pair<size_t, size_t>> adjacency;
    for (const auto& pair : j.at("adjacency")) {
      if (!pair.is_array() || pair.size() != 2) {
        return absl::InvalidArgumentError("adjacency entries must be index pairs");
      }
      adjacency.emplace_back(pair[0].get<size_t>(), pair[1].get<size_t>());
    }
    std::optional<double> declared;
    if (j.contains("sensitivity") && !j["sensitivity"].is_null()) {
      declared = j["sensitivity"].get<double>();
    }
    return QualityTable::Create(std::move(inputs), std::move(outputs), std::move(q),
                                std::move(adjacency), declared);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed quality table: ", e.what()));
  }
}

nlohmann::json QualityTableToJson(const QualityTable& table) {
  nlohmann::json adjacency = nlohmann::json::array();
  for (const auto& [a, b] : table.adjacency) adjacency.push_back({a, b});
  nlohmann::json j = {{"inputs", table.inputs},
                      {"outputs", table.outputs},
                      {"q", table.q},
                      {"adjacency", adjacency}};
  if (table.declared_sensitivity.has_value()) {
    j["sensitivity"] = *table.declared_sensitivity;
  }
  return j;
}

absl::StatusOr<QualityTable> LoadQualityTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON"));
  }
  return QualityTableFromJson(j);
}

absl::StatusOr<ExponentialPmf> ExponentialMechanismPmf(const QualityTable& table,
                                                       size_t input,
                                                       const MechanismParams& params) {
  DPTG_RETURN_IF_ERROR(ValidateEpsilon(params.epsilon));
  if (input >= table.num_inputs()) {
    return absl::InvalidArgumentError(absl::StrCat("input ", input, " out of range"));
  }
  ExponentialPmf pmf;
  std::vector<double> logp = LogPmf(table, input, params, &pmf.degenerate);
  pmf.probs.resize(logp.size());
  std::transform(logp.begin(), logp.end(), pmf.probs.begin(),
                 [](double l) { return std::exp(l); });
  return pmf;
}

absl::StatusOr<ExponentialPmf> ExponentialMechanismPmf(const QualityTable& table,
                                                       size_t input, double epsilon) {
  return ExponentialMechanismPmf(table, input, MechanismParams{epsilon, 0.5});
}

absl::StatusOr<AuditReport> VerifyDpBound(const QualityTable& table, double epsilon) {
  return VerifyDpBound(table, epsilon, MechanismParams{epsilon, 0.5});
}

absl::StatusOr<AuditReport> VerifyDpBound(const QualityTable& table, double epsilon,
                                          const MechanismParams& mechanism) {
  DPTG_RETURN_IF_ERROR(ValidateEpsilon(epsilon));
  DPTG_RETURN_IF_ERROR(ValidateEpsilon(mechanism.epsilon));
  if (table.num_inputs() * table.num_outputs() > kMaxAuditCells) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "table has ", table.num_inputs() * table.num_outputs(),
        " cells; exhaustive audit is limited to ", kMaxAuditCells));
  }
  AuditReport report;
  report.epsilon = epsilon;
  report.bound = std::exp(epsilon);
  report.sensitivity = table.EffectiveSensitivity();
  bool degenerate = false;
  const auto logp = AllLogPmfs(table, mechanism, &degenerate);
  if (degenerate) report.note = "sensitivity is zero; mechanism is uniform";
  if (table.declared_sensitivity.has_value() &&
      table.Sensitivity() > *table.declared_sensitivity + kAuditSlack) {
    report.note = absl::StrCat("declared sensitivity ", *table.declared_sensitivity,
                               " is below the table-derived value ",
                               table.Sensitivity());
  }
  double worst_log_ratio = 0.0;
  for (const auto& [a, b] : table.adjacency) {
    for (const auto& [x1, x2] : {std::pair{a, b}, std::pair{b, a}}) {
      for (size_t y = 0; y < table.num_outputs(); ++y) {
        const double log_ratio = logp[x1][y] - logp[x2][y];
        if (log_ratio > worst_log_ratio) {
          worst_log_ratio = log_ratio;
          report.worst_pair = {x1, x2};
          report.worst_output = y;
        }
      }
    }
  }
  report.max_ratio = std::exp(worst_log_ratio);
  report.pass = report.max_ratio <= report.bound + kAuditSlack;
  return report;
}

nlohmann::json AuditReportToJson(const AuditReport& report, const QualityTable& table) {
  nlohmann::json j = {
      {"epsilon", report.epsilon},
      {"max_ratio", report.max_ratio},
      {"bound", report.bound},
      {"pass", report.pass},
      {"worst_pair", {table.inputs.at(report.worst_pair.first),
                      table.inputs.at(report.worst_pair.second)}},
      {"worst_output", table.outputs.at(report.worst_output)},
      {"sensitivity", report.sensitivity},
  };
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

absl::StatusOr<AuditReport> AuditReportFromJson(const nlohmann::json& j,
                                                const QualityTable& table) {
  auto find = [](const std::vector<std::string>& labels,
                 const std::string& label) -> absl::StatusOr<size_t> {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown label '", label, "'"));
    }
    return static_cast<size_t>(it - labels.begin());
  };
  try {
    AuditReport report;
    report.epsilon = j.at("epsilon").get<double>();
    report.max_ratio = j.at("max_ratio").get<double>();
    report.bound = j.at("bound").get<double>();
    report.pass = j.at("pass").get<bool>();
    report.sensitivity = j.value("sensitivity", 0.0);
    report.note = j.value("note", std::string());
    const auto& pair = j.at("worst_pair");
    DPTG_ASSIGN_OR_RETURN(report.worst_pair.first,
                          find(table.inputs, pair.at(0).get<std::string>()));
    DPTG_ASSIGN_OR_RETURN(report.worst_pair.second,
                          find(table.inputs, pair.at(1).get<std::string>()));
    DPTG_ASSIGN_OR_RETURN(report.worst_output,
                          find(table.outputs, j.at("worst_output").get<std::string>()));
    return report;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed audit report: ", e.what()));
  }
}

absl::StatusOr<SequenceAuditReport> VerifySequenceDpBound(
    const QualityTable& table, double per_step_epsilon, size_t length,
    const MechanismParams& mechanism) {
  DPTG_RETURN_IF_ERROR(ValidateEpsilon(per_step_epsilon));
  DPTG_RETURN_IF_ERROR(ValidateEpsilon(mechanism.epsilon));
  if (length == 0) return absl::InvalidArgumentError("sequence length must be positive");

  // Position-wise input pairs: both orientations of each adjacent pair plus
  // the identical pairs.
  std::vector<std::pair<size_t, size_t>> step_pairs;
  for (size_t x = 0; x < table.num_inputs(); ++x) step_pairs.emplace_back(x, x);
  for (const auto& [a, b] : table.adjacency) {
    step_pairs.emplace_back(a, b);
    step_pairs.emplace_back(b, a);
  }
  const double pair_count = std::pow(static_cast<double>(step_pairs.size()), length);
  const double output_count =
      std::pow(static_cast<double>(table.num_outputs()), length);
  if (pair_count * output_count > static_cast<double>(kMaxSequenceAuditCells)) {
    return absl::ResourceExhaustedError("sequence audit too large to enumerate");
  }
  const auto logp = AllLogPmfs(table, mechanism, nullptr);

  SequenceAuditReport report;
  report.length = length;
  report.per_step_epsilon = per_step_epsilon;
  report.bound = std::exp(per_step_epsilon * static_cast<double>(length));
  double worst_log_ratio = 0.0;

  // Odometers over pair choices and output sequences.
  std::vector<size_t> pair_idx(length, 0);
  std::vector<size_t> out_idx(length, 0);
  auto advance = [](std::vector<size_t>& digits, size_t base) {
    for (size_t& d : digits) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };
  do {
    std::fill(out_idx.begin(), out_idx.end(), 0);
    do {
      double log_left = 0.0, log_right = 0.0;
      for (size_t i = 0; i < length; ++i) {
        const auto& [xa, xb] = step_pairs[pair_idx[i]];
        log_left += logp[xa][out_idx[i]];
        log_right += logp[xb][out_idx[i]];
      }
      const double log_ratio = log_left - log_right;
      if (log_ratio > worst_log_ratio) {
        worst_log_ratio = log_ratio;
        report.worst_left.assign(length, 0);
        report.worst_right.assign(length, 0);
        for (size_t i = 0; i < length; ++i) {
          report.worst_left[i] = step_pairs[pair_idx[i]].first;
          report.worst_right[i] = step_pairs[pair_idx[i]].second;
        }
        report.worst_output = out_idx;
      }
    } while (advance(out_idx, table.num_outputs()));
  } while (advance(pair_idx, step_pairs.size()));

  report.max_ratio = std::exp(worst_log_ratio);
  report.pass = report.max_ratio <= report.bound + kAuditSlack;
  return report;
}

}  // namespace dptg
