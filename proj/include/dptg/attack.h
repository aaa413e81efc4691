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

#ifndef DPTG_ATTACK_H_
#define DPTG_ATTACK_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptg/corpus.h"
#include "dptg/metrics.h"
#include "dptg/naive_bayes.h"

namespace dptg {

enum class Task { kAuthor, kSentiment };
// Static attackers train on original text, adaptive ones on perturbed text.
enum class AttackMode { kStatic, kAdaptive };

std::string TaskName(Task task);
std::string AttackModeName(AttackMode mode);
absl::StatusOr<Task> ParseTask(std::string_view name);
absl::StatusOr<AttackMode> ParseAttackMode(std::string_view name);

const std::string& LabelOf(const Record& record, Task task);

struct AttackOptions {
  int gram_size = kDefaultGramSize;
  double alpha = kDefaultNbAlpha;
};

struct AttackResult {
  AttackMode mode = AttackMode::kStatic;
  Task task = Task::kAuthor;
  double mcc = 0.0;
  // Row/column order follows `classes`.
  std::vector<std::string> classes;
  ConfusionMatrix confusion{0};
};

// Records must carry the same ids in the same order.
absl::Status CheckAligned(const std::vector<Record>& original,
                          const std::vector<Record>& perturbed);

absl::StatusOr<NaiveBayesModel> TrainAttacker(const std::vector<Record>& records,
                                              const std::vector<size_t>& indices,
                                              Task task, const AttackOptions& options);

// Labels come from `labels_from`, texts from `texts_from`.
absl::StatusOr<AttackResult> EvaluateAttacker(const NaiveBayesModel& model,
                                              const std::vector<Record>& labels_from,
                                              const std::vector<Record>& texts_from,
                                              const std::vector<size_t>& indices,
                                              Task task, AttackMode mode);

// Sums confusion matrices of the same task and mode, aligning classes by
// label, and recomputes the MCC.
absl::StatusOr<AttackResult> PoolResults(const std::vector<AttackResult>& parts);

// Trains on the train split (original or perturbed per mode) and scores the
// perturbed test split.
absl::StatusOr<AttackResult> RunAttack(const std::vector<Record>& original,
                                       const std::vector<Record>& perturbed,
                                       const Split& split, Task task, AttackMode mode,
                                       const AttackOptions& options = {});

}  // namespace dptg

#endif  // DPTG_ATTACK_H_
