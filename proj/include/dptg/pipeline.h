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

#ifndef DPTG_PIPELINE_H_
#define DPTG_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptg/attack.h"
#include "dptg/corpus.h"
#include "dptg/embedding_store.h"
#include "dptg/geometry.h"
#include "dptg/metrics.h"
#include "dptg/ngram_decoder.h"
#include "dptg/word_mechanism.h"
#include "json.hpp"

namespace dptg::pipeline {

enum class Command {
  kAnonymize,
  kParaphrase,
  kAttack,
  kSweep,
  kAudit,
  kTypechange,
  kSynth,
  kConvert,
  kTrainLm,
};

std::string CommandName(Command command);
absl::StatusOr<Command> ParseCommand(std::string_view name);

// Everything a run depends on. Serialized verbatim into the manifest.
struct RunConfig {
  Command command = Command::kAnonymize;
  std::string dataset;
  std::string perturbed;       // attack: mechanism output JSONL
  std::string text_field;      // attack: member holding perturbed text; "" = auto
  std::string embeddings;      // store in `geometry` (Euclidean for sweeps)
  std::string poincare_embeddings;
  std::string lexicon;
  std::string model;           // n-gram model JSON
  std::string table;           // quality table JSON
  std::string output;

  double epsilon = 1.0;
  std::vector<double> epsilons;
  Geometry geometry = Geometry::kEuclidean;
  OovPolicy oov_policy = OovPolicy::kIgnore;
  std::optional<double> temperature;
  double dq = 1.0;
  size_t max_len = 32;
  double lm_weight = kDefaultLmWeight;
  uint64_t seed = 0;

  // audit
  std::optional<double> mechanism_epsilon;
  double exponent_scale = 0.5;
  size_t sequence_length = 1;

  // attack and sweep
  std::string task = "all";
  std::string mode = "all";
  std::vector<std::string> mechanisms;
  size_t repeats = 1;
  double test_fraction = 0.2;
  // 1: a single split at test_fraction. k > 1: stratified k-fold with pooled
  // confusion matrices, so every record is scored once.
  size_t folds = 1;
  int gram_size = kDefaultGramSize;
  double nb_alpha = kDefaultNbAlpha;
  ScoreNormalization normalization = ScoreNormalization::kClampNegative;
  int lm_order = 2;
  double lm_alpha = 0.1;

  // typechange
  size_t sample_size = 1000;

  // convert
  int rating_scale = 10;
  size_t top_authors = 10;

  // execution; neither affects outputs
  std::string kernel = "auto";
  size_t threads = 1;
};

nlohmann::json RunConfigToJson(const RunConfig& config);
absl::StatusOr<RunConfig> RunConfigFromJson(const nlohmann::json& j);

// Rejects configurations that cannot run (missing inputs, bad ranges).
absl::Status ValidateConfig(const RunConfig& config);

std::string ManifestPath(const std::string& output);
// {tool, version, command, config, summary}. No timestamps, so reruns
// produce identical manifests.
nlohmann::json MakeManifest(const RunConfig& config, const nlohmann::json& summary);
absl::StatusOr<RunConfig> LoadManifest(const std::string& path);

struct RunOutcome {
  nlohmann::json summary = nlohmann::json::object();
  // False only for a failed audit.
  bool audit_pass = true;
};

// Executes the command, writes `output` plus its manifest.
absl::StatusOr<RunOutcome> Run(const RunConfig& config, std::ostream& log);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Returns the error of
// the lowest failing index.
absl::Status ParallelFor(size_t n, size_t threads,
                         const std::function<absl::Status(size_t)>& fn);

// ---- sweep ---------------------------------------------------------------

struct SweepRow {
  std::string mechanism;
  double epsilon = 0.0;       // inf for the identity row
  double total_budget = 0.0;  // mean per-record total epsilon
  double author_static = 0.0;
  double author_adaptive = 0.0;
  double sentiment_static = 0.0;
  double sentiment_adaptive = 0.0;
  double gamma_static = 0.0;
  double gamma_adaptive = 0.0;
  std::optional<double> similarity;
  std::optional<double> ppl;
  std::optional<double> type_change;
  std::vector<uint64_t> cell_seeds;
  bool best = false;

  bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
  double author_baseline = 0.0;
  double sentiment_baseline = 0.0;
  std::vector<SweepRow> rows;
};

struct SweepInputs {
  const std::vector<Record>* corpus = nullptr;
  const EmbeddingStore* euclidean = nullptr;  // optional
  const EmbeddingStore* poincare = nullptr;   // optional
  const TypeLexicon* lexicon = nullptr;       // optional
  const NgramModel* language_model = nullptr; // optional; trained if absent
};

absl::StatusOr<SweepReport> RunSweep(const SweepInputs& inputs, const RunConfig& config,
                                     std::ostream& log);

void WriteSweepCsv(const SweepReport& report, std::ostream& out);
absl::StatusOr<std::vector<SweepRow>> ReadSweepCsv(std::istream& in);

// ---- typechange ------------------------------------------------------------

struct TypeChangeRow {
  double epsilon = 0.0;
  double median_rate = 0.0;
  std::vector<double> rates;  // one per repeat
  size_t evaluated = 0;       // summed over repeats
  size_t changed = 0;
};

struct TypeChangeSweep {
  size_t candidates = 0;  // lexicon words present in the store
  bool sampled_with_replacement = false;
  std::vector<TypeChangeRow> rows;
};

absl::StatusOr<TypeChangeSweep> RunTypeChange(const EmbeddingStore& store,
                                              const TypeLexicon& lexicon,
                                              const RunConfig& config);
nlohmann::json TypeChangeToJson(const TypeChangeSweep& sweep);

}  // namespace dptg::pipeline

#endif  // DPTG_PIPELINE_H_
