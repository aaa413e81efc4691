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

#include "dptg/attack.h"

#include <algorithm>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"
#include "dptg/status_macros.h"

namespace dptg {

std::string TaskName(Task task) {
  return task == Task::kAuthor ? "author" : "sentiment";
}

std::string AttackModeName(AttackMode mode) {
  return mode == AttackMode::kStatic ? "static" : "adaptive";
}

absl::StatusOr<Task> ParseTask(std::string_view name) {
  if (name == "author") return Task::kAuthor;
  if (name == "sentiment") return Task::kSentiment;
  return absl::InvalidArgumentError(absl::StrCat("unknown task '", std::string(name), "'"));
}

absl::StatusOr<AttackMode> ParseAttackMode(std::string_view name) {
  if (name == "static") return AttackMode::kStatic;
  if (name == "adaptive") return AttackMode::kAdaptive;
  return absl::InvalidArgumentError(absl::StrCat("unknown attack mode '", std::string(name), "'"));
}

const std::string& LabelOf(const Record& record, Task task) {
  return task == Task::kAuthor ? record.author : record.sentiment;
}

absl::Status CheckAligned(const std::vector<Record>& original,
                          const std::vector<Record>& perturbed) {
  if (original.size() != perturbed.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "corpus sizes differ: ", original.size(), " vs ", perturbed.size()));
  }
  for (size_t i = 0; i < original.size(); ++i) {
    if (original[i].id != perturbed[i].id) {
      return absl::InvalidArgumentError(absl::StrCat(
          "id mismatch at record ", i, ": '", original[i].id, "' vs '",
          perturbed[i].id, "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<NaiveBayesModel> TrainAttacker(const std::vector<Record>& records,
                                              const std::vector<size_t>& indices,
                                              Task task, const AttackOptions& options) {
  std::vector<std::string> texts, labels;
  texts.reserve(indices.size());
  labels.reserve(indices.size());
  for (size_t i : indices) {
    texts.push_back(records.at(i).text);
    labels.push_back(LabelOf(records.at(i), task));
  }
  return NaiveBayesModel::Train(texts, labels, options.gram_size, options.alpha);
}

absl::StatusOr<AttackResult> EvaluateAttacker(const NaiveBayesModel& model,
                                              const std::vector<Record>& labels_from,
                                              const std::vector<Record>& texts_from,
                                              const std::vector<size_t>& indices,
                                              Task task, AttackMode mode) {
  DPTG_RETURN_IF_ERROR(CheckAligned(labels_from, texts_from));
  if (indices.empty()) return absl::InvalidArgumentError("empty evaluation split");
  AttackResult result;
  result.mode = mode;
  result.task = task;
  result.classes = model.classes();
  for (size_t i : indices) {
    const std::string& label = LabelOf(labels_from.at(i), task);
    if (!std::binary_search(result.classes.begin(), result.classes.end(), label)) {
      result.classes.insert(
          std::lower_bound(result.classes.begin(), result.classes.end(), label), label);
    }
  }
  absl::flat_hash_map<std::string, size_t> index;
  for (size_t c = 0; c < result.classes.size(); ++c) index[result.classes[c]] = c;
  result.confusion = ConfusionMatrix(result.classes.size());
  for (size_t i : indices) {
    const size_t truth = index.at(LabelOf(labels_from[i], task));
    const size_t predicted = index.at(model.PredictLabel(texts_from[i].text));
    result.confusion.Add(truth, predicted);
  }
  result.mcc = Mcc(result.confusion);
  return result;
}

absl::StatusOr<AttackResult> PoolResults(const std::vector<AttackResult>& parts) {
  if (parts.empty()) return absl::InvalidArgumentError("nothing to pool");
  AttackResult pooled;
  pooled.task = parts.front().task;
  pooled.mode = parts.front().mode;
  for (const AttackResult& p : parts) {
    if (p.task != pooled.task || p.mode != pooled.mode) {
      return absl::InvalidArgumentError("cannot pool different tasks or modes");
    }
    pooled.classes.insert(pooled.classes.end(), p.classes.begin(), p.classes.end());
  }
  std::sort(pooled.classes.begin(), pooled.classes.end());
  pooled.classes.erase(std::unique(pooled.classes.begin(), pooled.classes.end()),
                       pooled.classes.end());
  absl::flat_hash_map<std::string, size_t> index;
  for (size_t c = 0; c < pooled.classes.size(); ++c) index[pooled.classes[c]] = c;
  pooled.confusion = ConfusionMatrix(pooled.classes.size());
  for (const AttackResult& p : parts) {
    for (size_t t = 0; t < p.classes.size(); ++t) {
      for (size_t q = 0; q < p.classes.size(); ++q) {
        pooled.confusion.Add(index.at(p.classes[t]), index.at(p.classes[q]),
                             p.confusion.at(t, q));
      }
    }
  }
  pooled.mcc = Mcc(pooled.confusion);
  return pooled;
}

absl::StatusOr<AttackResult> RunAttack(const std::vector<Record>& original,
                                       const std::vector<Record>& perturbed,
                                       const Split& split, Task task, AttackMode mode,
                                       const AttackOptions& options) {
  DPTG_RETURN_IF_ERROR(CheckAligned(original, perturbed));
  const std::vector<Record>& train_on =
      mode == AttackMode::kStatic ? original : perturbed;
  DPTG_ASSIGN_OR_RETURN(NaiveBayesModel model,
                        TrainAttacker(train_on, split.train, task, options));
  return EvaluateAttacker(model, original, perturbed, split.test, task, mode);
}

}  // namespace dptg
