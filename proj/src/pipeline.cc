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

#include "dptg/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dptg/exponential_mechanism.h"
#include "dptg/internal/absl_compat.h"
#include "dptg/kernels/distance_kernels.h"
#include "dptg/rng.h"
#include "dptg/status_macros.h"
#include "dptg/synthetic.h"
#include "dptg/tokenizer.h"

namespace dptg::pipeline {
namespace {

using json = nlohmann::json;

constexpr std::pair<Command, const char*> kCommandNames[] = {
    {Command::kAnonymize, "anonymize"}, {Command::kParaphrase, "paraphrase"},
    {Command::kAttack, "attack"},       {Command::kSweep, "sweep"},
    {Command::kAudit, "audit"},         {Command::kTypechange, "typechange"},
    {Command::kSynth, "synth"},         {Command::kConvert, "convert"},
    {Command::kTrainLm, "train-lm"},
};

constexpr const char* kDefaultMechanisms[] = {"identity", "euclidean", "poincare",
                                              "paraphrase"};

absl::Status Usage(std::string_view message) {
  return absl::InvalidArgumentError(std::string(message));
}

json OptionalToJson(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> MedianOptional(const std::vector<std::optional<double>>& v) {
  std::vector<double> present;
  for (const auto& x : v) {
    if (x.has_value()) present.push_back(*x);
  }
  if (present.empty()) return std::nullopt;
  return Median(std::move(present));
}

absl::StatusOr<EmbeddingStore> LoadStore(const std::string& path, Geometry geometry,
                                         std::ostream& log) {
  LoadReport report;
  DPTG_ASSIGN_OR_RETURN(EmbeddingStore store,
                        EmbeddingStore::LoadFile(path, {.geometry = geometry}, &report));
  if (report.rescaled > 0) {
    log << "warning: " << report.rescaled << " rows of " << path
        << " lay outside the unit ball and were rescaled\n";
  }
  if (report.rejected > 0) {
    log << "warning: " << report.rejected << " casing duplicates skipped in " << path
        << "\n";
  }
  return store;
}

absl::StatusOr<std::ofstream> OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  return out;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  DPTG_ASSIGN_OR_RETURN(std::ofstream out, OpenOutput(path));
  out << text;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

std::string CanonicalText(std::string_view text) {
  const std::vector<std::string> tokens = Tokenize(text);
  return Detokenize(tokens);
}

std::vector<Record> Canonicalize(const std::vector<Record>& records) {
  std::vector<Record> out = records;
  for (Record& r : out) r.text = CanonicalText(r.text);
  return out;
}

double TemperatureFor(const RunConfig& config, double epsilon) {
  return 2.0 * config.dq / epsilon;
}

std::vector<Task> TasksFor(const std::string& name) {
  if (name == "author") return {Task::kAuthor};
  if (name == "sentiment") return {Task::kSentiment};
  return {Task::kAuthor, Task::kSentiment};
}

std::vector<AttackMode> ModesFor(const std::string& name) {
  if (name == "static") return {AttackMode::kStatic};
  if (name == "adaptive") return {AttackMode::kAdaptive};
  return {AttackMode::kStatic, AttackMode::kAdaptive};
}

json BudgetToJson(const BudgetReport& b) {
  return {{"per_word_epsilon", b.per_word_epsilon},
          {"perturbed_token_count", b.perturbed_token_count},
          {"total_epsilon", b.total_epsilon},
          {"oov_passthrough_count", b.oov_passthrough_count},
          {"oov_removed_count", b.oov_removed_count},
          {"dp_violation", b.dp_violation}};
}

json RecordBase(const Record& r) {
  return json::parse(RecordToJsonLine(r));
}

// ---- commands ---------------------------------------------------------------

absl::StatusOr<RunOutcome> RunAnonymize(const RunConfig& config, std::ostream& log) {
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> records, ReadJsonlFile(config.dataset));
  DPTG_ASSIGN_OR_RETURN(EmbeddingStore store,
                        LoadStore(config.embeddings, config.geometry, log));
  const MechanismConfig mech{config.epsilon, config.geometry, config.oov_policy,
                             config.seed};
  DPTG_RETURN_IF_ERROR(mech.Validate());

  std::vector<std::string> lines(records.size());
  std::vector<BudgetReport> budgets(records.size());
  DPTG_RETURN_IF_ERROR(ParallelFor(records.size(), config.threads, [&](size_t i) {
    const std::vector<std::string> tokens = Tokenize(records[i].text, store.lowercase());
    json obj = RecordBase(records[i]);
    json subs = json::array();
    if (tokens.empty()) {
      budgets[i] = MakeBudgetReport(0, config.epsilon);
      obj["anonymized_text"] = "";
    } else {
      RngStream rng(config.seed, i);
      DPTG_ASSIGN_OR_RETURN(AnonymizedSentence out,
                            AnonymizeSentence(tokens, store, mech, rng));
      for (const Substitution& s : out.substitutions) {
        subs.push_back({{"original", s.original},
                        {"replacement", s.replacement},
                        {"distance_moved", s.distance_moved},
                        {"oov", s.oov}});
      }
      budgets[i] = out.budget;
      obj["anonymized_text"] = Detokenize(out.output_tokens);
    }
    obj["substitutions"] = std::move(subs);
    obj["budget"] = BudgetToJson(budgets[i]);
    lines[i] = obj.dump();
    return absl::OkStatus();
  }));

  std::string text;
  size_t tokens = 0, perturbed = 0, passthrough = 0, removed = 0, violations = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    absl::StrAppend(&text, lines[i], "\n");
    const BudgetReport& b = budgets[i];
    perturbed += b.perturbed_token_count;
    passthrough += b.oov_passthrough_count;
    removed += b.oov_removed_count;
    tokens += b.perturbed_token_count + b.oov_passthrough_count + b.oov_removed_count;
    violations += b.dp_violation;
  }
  DPTG_RETURN_IF_ERROR(WriteText(config.output, text));
  if (violations > 0) {
    log << "warning: " << violations << " records released " << passthrough
        << " out-of-vocabulary tokens unperturbed (dp_violation)\n";
  }
  RunOutcome outcome;
  outcome.summary = {{"records", records.size()},
                     {"tokens", tokens},
                     {"perturbed_tokens", perturbed},
                     {"oov_passthrough", passthrough},
                     {"oov_removed", removed},
                     {"dp_violation_records", violations}};
  return outcome;
}

absl::StatusOr<NgramModel> LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  return NgramModel::FromJson(j);
}

absl::StatusOr<RunOutcome> RunParaphrase(const RunConfig& config, std::ostream&) {
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> records, ReadJsonlFile(config.dataset));
  DPTG_ASSIGN_OR_RETURN(NgramModel model, LoadModel(config.model));
  GenerationOptions options;
  options.temperature = config.temperature.value_or(TemperatureFor(config, config.epsilon));
  options.delta_q = config.dq;
  options.max_len = config.max_len;
  options.lambda = config.lm_weight;

  std::vector<std::string> lines(records.size());
  std::vector<double> totals(records.size());
  DPTG_RETURN_IF_ERROR(ParallelFor(records.size(), config.threads, [&](size_t i) {
    RngStream rng(config.seed, i);
    DPTG_ASSIGN_OR_RETURN(GenerationResult g,
                          Generate(model, records[i].text, options, rng));
    json obj = RecordBase(records[i]);
    obj["paraphrased_text"] = Detokenize(g.tokens);
    obj["budget"] = {{"per_step_epsilon", g.per_step_epsilon},
                     {"steps", g.length},
                     {"total_epsilon", g.total_epsilon},
                     {"temperature", g.temperature}};
    totals[i] = g.total_epsilon;
    lines[i] = obj.dump();
    return absl::OkStatus();
  }));
  std::string text;
  for (const std::string& line : lines) absl::StrAppend(&text, line, "\n");
  DPTG_RETURN_IF_ERROR(WriteText(config.output, text));
  RunOutcome outcome;
  outcome.summary = {
      {"records", records.size()},
      {"temperature", options.temperature},
      {"per_step_epsilon", EpsilonFromTemperature(options.temperature, config.dq)},
      {"total_epsilon", std::accumulate(totals.begin(), totals.end(), 0.0)}};
  return outcome;
}

absl::StatusOr<std::vector<Record>> ReadPerturbed(const RunConfig& config) {
  if (!config.text_field.empty()) return ReadJsonlFile(config.perturbed, config.text_field);
  for (const char* field : {"anonymized_text", "paraphrased_text", "text"}) {
    std::ifstream in(config.perturbed);
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", config.perturbed));
    std::string first;
    while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    json j = json::parse(first, nullptr, false);
    if (j.is_object() && j.contains(field)) {
      return ReadJsonlFile(config.perturbed, field);
    }
  }
  return ReadJsonlFile(config.perturbed);
}

json AttackResultToJson(const AttackResult& r) {
  return {{"task", TaskName(r.task)},
          {"mode", AttackModeName(r.mode)},
          {"mcc", r.mcc},
          {"classes", r.classes},
          {"confusion", r.confusion.Rows()}};
}

absl::StatusOr<RunOutcome> RunAttackCommand(const RunConfig& config, std::ostream&) {
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> original, ReadJsonlFile(config.dataset));
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> perturbed, ReadPerturbed(config));
  original = Canonicalize(original);
  perturbed = Canonicalize(perturbed);
  DPTG_RETURN_IF_ERROR(CheckAligned(original, perturbed));
  DPTG_ASSIGN_OR_RETURN(Split split,
                        StratifiedSplit(original, config.seed, config.test_fraction));
  const AttackOptions options{config.gram_size, config.nb_alpha};
  json results = json::array();
  for (Task task : TasksFor(config.task)) {
    for (AttackMode mode : ModesFor(config.mode)) {
      DPTG_ASSIGN_OR_RETURN(AttackResult r,
                            RunAttack(original, perturbed, split, task, mode, options));
      results.push_back(AttackResultToJson(r));
    }
  }
  json report = {{"train_size", split.train.size()},
                 {"test_size", split.test.size()},
                 {"results", results}};
  DPTG_RETURN_IF_ERROR(WriteText(config.output, report.dump(2) + "\n"));
  RunOutcome outcome;
  outcome.summary = {{"attacks", results.size()}};
  return outcome;
}

json SequenceReportToJson(const SequenceAuditReport& r, const QualityTable& table) {
  auto labels = [](const std::vector<size_t>& idx, const std::vector<std::string>& names) {
    json out = json::array();
    for (size_t i : idx) out.push_back(names[i]);
    return out;
  };
  return {{"length", r.length},
          {"per_step_epsilon", r.per_step_epsilon},
          {"max_ratio", r.max_ratio},
          {"bound", r.bound},
          {"pass", r.pass},
          {"worst_left", labels(r.worst_left, table.inputs)},
          {"worst_right", labels(r.worst_right, table.inputs)},
          {"worst_output", labels(r.worst_output, table.outputs)}};
}

absl::StatusOr<RunOutcome> RunAudit(const RunConfig& config, std::ostream& log) {
  DPTG_ASSIGN_OR_RETURN(QualityTable table, LoadQualityTable(config.table));
  const MechanismParams mechanism{config.mechanism_epsilon.value_or(config.epsilon),
                                  config.exponent_scale};
  RunOutcome outcome;
  json report;
  if (config.sequence_length <= 1) {
    DPTG_ASSIGN_OR_RETURN(AuditReport r, VerifyDpBound(table, config.epsilon, mechanism));
    report = AuditReportToJson(r, table);
    outcome.audit_pass = r.pass;
    if (!r.note.empty()) log << "note: " << r.note << "\n";
  } else {
    DPTG_ASSIGN_OR_RETURN(SequenceAuditReport r,
                          VerifySequenceDpBound(table, config.epsilon,
                                                config.sequence_length, mechanism));
    report = SequenceReportToJson(r, table);
    outcome.audit_pass = r.pass;
  }
  DPTG_RETURN_IF_ERROR(WriteText(config.output, report.dump(2) + "\n"));
  outcome.summary = {{"pass", outcome.audit_pass}};
  log << (outcome.audit_pass ? "audit passed" : "audit FAILED") << "\n";
  return outcome;
}

absl::StatusOr<RunOutcome> RunTypechangeCommand(const RunConfig& config,
                                                std::ostream& log) {
  DPTG_ASSIGN_OR_RETURN(TypeLexicon lexicon, TypeLexicon::LoadFile(config.lexicon));
  DPTG_ASSIGN_OR_RETURN(EmbeddingStore store,
                        LoadStore(config.embeddings, config.geometry, log));
  DPTG_ASSIGN_OR_RETURN(TypeChangeSweep sweep, RunTypeChange(store, lexicon, config));
  if (sweep.sampled_with_replacement) {
    log << "warning: only " << sweep.candidates
        << " lexicon words are in the vocabulary; sampled with replacement\n";
  }
  DPTG_RETURN_IF_ERROR(WriteText(config.output, TypeChangeToJson(sweep).dump(2) + "\n"));
  RunOutcome outcome;
  outcome.summary = {{"candidates", sweep.candidates},
                     {"sampled_with_replacement", sweep.sampled_with_replacement}};
  return outcome;
}

absl::StatusOr<RunOutcome> RunSweepCommand(const RunConfig& config, std::ostream& log) {
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> corpus, ReadJsonlFile(config.dataset));
  std::optional<EmbeddingStore> euclidean, poincare;
  std::optional<TypeLexicon> lexicon;
  std::optional<NgramModel> model;
  if (!config.embeddings.empty()) {
    DPTG_ASSIGN_OR_RETURN(euclidean, LoadStore(config.embeddings, Geometry::kEuclidean, log));
  }
  if (!config.poincare_embeddings.empty()) {
    DPTG_ASSIGN_OR_RETURN(poincare, LoadStore(config.poincare_embeddings,
                                              Geometry::kPoincareBall, log));
  }
  if (!config.lexicon.empty()) {
    DPTG_ASSIGN_OR_RETURN(lexicon, TypeLexicon::LoadFile(config.lexicon));
  }
  if (!config.model.empty()) {
    DPTG_ASSIGN_OR_RETURN(model, LoadModel(config.model));
  }
  SweepInputs inputs;
  inputs.corpus = &corpus;
  inputs.euclidean = euclidean ? &*euclidean : nullptr;
  inputs.poincare = poincare ? &*poincare : nullptr;
  inputs.lexicon = lexicon ? &*lexicon : nullptr;
  inputs.language_model = model ? &*model : nullptr;
  DPTG_ASSIGN_OR_RETURN(SweepReport report, RunSweep(inputs, config, log));
  std::ostringstream csv;
  WriteSweepCsv(report, csv);
  DPTG_RETURN_IF_ERROR(WriteText(config.output, csv.str()));
  RunOutcome outcome;
  outcome.summary = {{"rows", report.rows.size()},
                     {"author_baseline", report.author_baseline},
                     {"sentiment_baseline", report.sentiment_baseline}};
  return outcome;
}

absl::StatusOr<RunOutcome> RunSynth(const RunConfig& config, std::ostream&) {
  SyntheticOptions options;
  options.seed = config.seed;
  DPTG_ASSIGN_OR_RETURN(SyntheticWorld world, GenerateSyntheticWorld(options));
  std::error_code ec;
  std::filesystem::create_directories(config.output, ec);
  if (ec) return absl::NotFoundError(absl::StrCat("cannot create ", config.output));
  const std::filesystem::path dir(config.output);
  std::ostringstream e, p, l, c;
  world.euclidean.Save(e);
  world.poincare.Save(p);
  world.lexicon.Save(l);
  WriteJsonl(world.corpus, c);
  DPTG_RETURN_IF_ERROR(WriteText((dir / "euclidean.txt").string(), e.str()));
  DPTG_RETURN_IF_ERROR(WriteText((dir / "poincare.txt").string(), p.str()));
  DPTG_RETURN_IF_ERROR(WriteText((dir / "lexicon.tsv").string(), l.str()));
  DPTG_RETURN_IF_ERROR(WriteText((dir / "corpus.jsonl").string(), c.str()));
  RunOutcome outcome;
  outcome.summary = {{"vocabulary", world.euclidean.size()},
                     {"poincare_vocabulary", world.poincare.size()},
                     {"lexicon", world.lexicon.size()},
                     {"records", world.corpus.size()}};
  return outcome;
}

// Raw reviews: {id?, author|user, score|rating, text}.
absl::StatusOr<RunOutcome> RunConvert(const RunConfig& config, std::ostream& log) {
  std::ifstream in(config.dataset);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", config.dataset));
  struct Raw {
    std::string id, author, text;
    int label;
  };
  std::vector<Raw> raw;
  std::map<std::string, size_t> per_author;
  std::string line;
  size_t line_no = 0;
  auto err = [&](std::string_view m) {
    return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": ", std::string(m)));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return err("malformed JSON object");
    Raw r;
    const char* author_key = j.contains("author") ? "author" : "user";
    const char* score_key = j.contains("score") ? "score" : "rating";
    if (!j.contains(author_key) || !j[author_key].is_string()) return err("missing author");
    if (!j.contains(score_key) || !j[score_key].is_number()) return err("missing score");
    if (!j.contains("text") || !j["text"].is_string()) return err("missing text");
    r.author = j[author_key].get<std::string>();
    r.text = j["text"].get<std::string>();
    if (j.contains("id") && j["id"].is_string()) {
      r.id = j["id"].get<std::string>();
    } else {
      r.id = absl::StrCat("c", line_no);
    }
    auto label = BinarizeSentiment(j[score_key].get<double>(), config.rating_scale);
    if (!label.ok()) return err(internal::Sv(label.status().message()));
    r.label = *label;
    ++per_author[r.author];
    raw.push_back(std::move(r));
  }
  std::vector<std::pair<std::string, size_t>> ranked(per_author.begin(), per_author.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > config.top_authors) ranked.resize(config.top_authors);
  std::map<std::string, bool> keep;
  for (const auto& [a, n] : ranked) keep[a] = true;
  std::vector<Record> records;
  for (const Raw& r : raw) {
    if (!keep.contains(r.author)) continue;
    records.push_back({r.id, r.author, std::to_string(r.label), true, r.text});
  }
  std::ostringstream out;
  WriteJsonl(records, out);
  DPTG_RETURN_IF_ERROR(WriteText(config.output, out.str()));
  log << "kept " << records.size() << " of " << raw.size() << " reviews from "
      << ranked.size() << " authors\n";
  RunOutcome outcome;
  outcome.summary = {{"records", records.size()}, {"authors", ranked.size()}};
  return outcome;
}

absl::StatusOr<RunOutcome> RunTrainLm(const RunConfig& config, std::ostream&) {
  DPTG_ASSIGN_OR_RETURN(std::vector<Record> records, ReadJsonlFile(config.dataset));
  std::vector<std::vector<std::string>> sentences;
  for (const Record& r : records) sentences.push_back(Tokenize(r.text));
  DPTG_ASSIGN_OR_RETURN(NgramModel model,
                        NgramModel::Train(sentences, config.lm_order, config.lm_alpha));
  DPTG_RETURN_IF_ERROR(WriteText(config.output, model.ToJson().dump() + "\n"));
  RunOutcome outcome;
  outcome.summary = {{"vocabulary", model.vocabulary().size()}};
  return outcome;
}

// ---- sweep internals --------------------------------------------------------

struct CellOutput {
  std::vector<Record> perturbed;
  double mean_budget = 0.0;
  std::optional<double> similarity;
  std::optional<double> ppl;
  std::optional<double> type_change;
};

struct CellScores {
  double author_static = 0, author_adaptive = 0;
  double sentiment_static = 0, sentiment_adaptive = 0;
  double total_budget = 0;
  std::optional<double> similarity, ppl, type_change;
};

absl::StatusOr<CellOutput> PerturbCorpus(const std::string& mechanism, double epsilon,
                                         uint64_t cell_seed,
                                         const std::vector<Record>& canonical,
                                         const std::vector<size_t>& eval,
                                         const SweepInputs& in,
                                         const NgramModel& lm, const RunConfig& config) {
  CellOutput out;
  out.perturbed = canonical;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<bool> in_test(canonical.size(), false);
  for (size_t i : eval) in_test[i] = true;
  double budget = 0.0;

  if (mechanism == "euclidean" || mechanism == "poincare") {
    const bool hyper = mechanism == "poincare";
    const EmbeddingStore* store = hyper ? in.poincare : in.euclidean;
    const MechanismConfig mech{epsilon,
                               hyper ? Geometry::kPoincareBall : Geometry::kEuclidean,
                               config.oov_policy, cell_seed};
    for (size_t i = 0; i < canonical.size(); ++i) {
      const std::vector<std::string> tokens = Tokenize(canonical[i].text);
      if (tokens.empty()) continue;
      RngStream rng(cell_seed, i);
      DPTG_ASSIGN_OR_RETURN(AnonymizedSentence a,
                            AnonymizeSentence(tokens, *store, mech, rng));
      out.perturbed[i].text = Detokenize(a.output_tokens);
      budget += a.budget.total_epsilon;
      if (in_test[i]) {
        for (const Substitution& s : a.substitutions) {
          if (!s.oov) pairs.emplace_back(s.original, s.replacement);
        }
      }
    }
    if (in.lexicon != nullptr) {
      out.type_change = WordTypeChangeRate(pairs, *in.lexicon).rate;
    }
  } else if (mechanism == "paraphrase") {
    GenerationOptions options;
    options.temperature = TemperatureFor(config, epsilon);
    options.delta_q = config.dq;
    options.max_len = config.max_len;
    options.lambda = config.lm_weight;
    for (size_t i = 0; i < canonical.size(); ++i) {
      RngStream rng(cell_seed, i);
      DPTG_ASSIGN_OR_RETURN(GenerationResult g,
                            Generate(lm, canonical[i].text, options, rng));
      out.perturbed[i].text = Detokenize(g.tokens);
      budget += g.total_epsilon;
    }
  } else if (mechanism != "identity") {
    return absl::InvalidArgumentError(absl::StrCat("unknown mechanism '", mechanism, "'"));
  }
  out.mean_budget = mechanism == "identity"
                        ? std::numeric_limits<double>::infinity()
                        : budget / static_cast<double>(canonical.size());

  double sim_sum = 0.0, ppl_sum = 0.0;
  size_t sim_n = 0, ppl_n = 0;
  for (size_t i : eval) {
    const std::string& text = out.perturbed[i].text;
    if (in.euclidean != nullptr) {
      const std::vector<std::string> a = Tokenize(canonical[i].text);
      const std::vector<std::string> b = Tokenize(text);
      auto sim = SemanticSimilarity(a, b, *in.euclidean);
      if (sim.ok()) {
        sim_sum += *sim;
        ++sim_n;
      }
    }
    if (!text.empty()) {
      auto ppl = Perplexity(lm, text);
      if (ppl.ok()) {
        ppl_sum += *ppl;
        ++ppl_n;
      }
    }
  }
  if (sim_n > 0) out.similarity = sim_sum / static_cast<double>(sim_n);
  if (ppl_n > 0) out.ppl = ppl_sum / static_cast<double>(ppl_n);
  return out;
}

}  // namespace

std::string CommandName(Command command) {
  for (const auto& [c, name] : kCommandNames) {
    if (c == command) return name;
  }
  return "unknown";
}

absl::StatusOr<Command> ParseCommand(std::string_view name) {
  for (const auto& [c, n] : kCommandNames) {
    if (name == n) return c;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown command '", std::string(name), "'"));
}

json RunConfigToJson(const RunConfig& c) {
  return {
      {"command", CommandName(c.command)},
      {"dataset", c.dataset},
      {"perturbed", c.perturbed},
      {"text_field", c.text_field},
      {"embeddings", c.embeddings},
      {"poincare_embeddings", c.poincare_embeddings},
      {"lexicon", c.lexicon},
      {"model", c.model},
      {"table", c.table},
      {"output", c.output},
      {"epsilon", c.epsilon},
      {"epsilons", c.epsilons},
      {"geometry", GeometryName(c.geometry)},
      {"oov_policy", OovPolicyName(c.oov_policy)},
      {"temperature", OptionalToJson(c.temperature)},
      {"dq", c.dq},
      {"max_len", c.max_len},
      {"lm_weight", c.lm_weight},
      {"seed", c.seed},
      {"mechanism_epsilon", OptionalToJson(c.mechanism_epsilon)},
      {"exponent_scale", c.exponent_scale},
      {"sequence_length", c.sequence_length},
      {"task", c.task},
      {"mode", c.mode},
      {"mechanisms", c.mechanisms},
      {"repeats", c.repeats},
      {"test_fraction", c.test_fraction},
      {"folds", c.folds},
      {"gram_size", c.gram_size},
      {"nb_alpha", c.nb_alpha},
      {"normalization",
       c.normalization == ScoreNormalization::kClampNegative ? "clamp" : "affine"},
      {"lm_order", c.lm_order},
      {"lm_alpha", c.lm_alpha},
      {"sample_size", c.sample_size},
      {"rating_scale", c.rating_scale},
      {"top_authors", c.top_authors},
      {"kernel", c.kernel},
      {"threads", c.threads},
  };
}

absl::StatusOr<RunConfig> RunConfigFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("config must be an object");
  RunConfig c;
  try {
    DPTG_ASSIGN_OR_RETURN(c.command, ParseCommand(j.at("command").get<std::string>()));
    c.dataset = j.at("dataset").get<std::string>();
    c.perturbed = j.at("perturbed").get<std::string>();
    c.text_field = j.at("text_field").get<std::string>();
    c.embeddings = j.at("embeddings").get<std::string>();
    c.poincare_embeddings = j.at("poincare_embeddings").get<std::string>();
    c.lexicon = j.at("lexicon").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.table = j.at("table").get<std::string>();
    c.output = j.at("output").get<std::string>();
    c.epsilon = j.at("epsilon").get<double>();
    c.epsilons = j.at("epsilons").get<std::vector<double>>();
    DPTG_ASSIGN_OR_RETURN(c.geometry, ParseGeometry(j.at("geometry").get<std::string>()));
    DPTG_ASSIGN_OR_RETURN(c.oov_policy,
                          ParseOovPolicy(j.at("oov_policy").get<std::string>()));
    if (!j.at("temperature").is_null()) c.temperature = j.at("temperature").get<double>();
    c.dq = j.at("dq").get<double>();
    c.max_len = j.at("max_len").get<size_t>();
    c.lm_weight = j.at("lm_weight").get<double>();
    c.seed = j.at("seed").get<uint64_t>();
    if (!j.at("mechanism_epsilon").is_null()) {
      c.mechanism_epsilon = j.at("mechanism_epsilon").get<double>();
    }
    c.exponent_scale = j.at("exponent_scale").get<double>();
    c.sequence_length = j.at("sequence_length").get<size_t>();
    c.task = j.at("task").get<std::string>();
    c.mode = j.at("mode").get<std::string>();
    c.mechanisms = j.at("mechanisms").get<std::vector<std::string>>();
    c.repeats = j.at("repeats").get<size_t>();
    c.test_fraction = j.at("test_fraction").get<double>();
    c.folds = j.at("folds").get<size_t>();
    c.gram_size = j.at("gram_size").get<int>();
    c.nb_alpha = j.at("nb_alpha").get<double>();
    const std::string norm = j.at("normalization").get<std::string>();
    if (norm != "clamp" && norm != "affine") {
      return absl::InvalidArgumentError(absl::StrCat("unknown normalization '", norm, "'"));
    }
    c.normalization =
        norm == "clamp" ? ScoreNormalization::kClampNegative : ScoreNormalization::kAffine;
    c.lm_order = j.at("lm_order").get<int>();
    c.lm_alpha = j.at("lm_alpha").get<double>();
    c.sample_size = j.at("sample_size").get<size_t>();
    c.rating_scale = j.at("rating_scale").get<int>();
    c.top_authors = j.at("top_authors").get<size_t>();
    c.kernel = j.at("kernel").get<std::string>();
    c.threads = j.at("threads").get<size_t>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad config: ", e.what()));
  }
  return c;
}

absl::Status ValidateConfig(const RunConfig& c) {
  auto need = [](const std::string& value, std::string_view flag) -> absl::Status {
    if (value.empty()) return Usage(absl::StrCat("--", std::string(flag), " is required"));
    return absl::OkStatus();
  };
  DPTG_RETURN_IF_ERROR(need(c.output, "output"));
  if (!(c.dq > 0.0 && c.dq <= 1.0)) return Usage("--dq must lie in (0, 1]");
  if (c.threads == 0) return Usage("--threads must be at least 1");
  if (c.folds == 0) return Usage("--folds must be at least 1");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    return Usage("--test-fraction must lie in (0, 1)");
  }
  if (c.kernel != "auto" && c.kernel != "scalar" && c.kernel != "avx2") {
    return Usage("--kernel must be auto, scalar or avx2");
  }
  auto positive_eps = [](double e) { return e > 0.0 && !std::isnan(e); };
  auto check_grid = [&]() -> absl::Status {
    if (c.epsilons.empty()) return Usage("--epsilons must not be empty");
    for (double e : c.epsilons) {
      if (!positive_eps(e)) return Usage("--epsilons entries must be positive");
    }
    if (c.repeats == 0) return Usage("--repeats must be at least 1");
    return absl::OkStatus();
  };
  switch (c.command) {
    case Command::kAnonymize:
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      DPTG_RETURN_IF_ERROR(need(c.embeddings, "embeddings"));
      if (!positive_eps(c.epsilon)) return Usage("--epsilon must be positive");
      break;
    case Command::kParaphrase:
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      DPTG_RETURN_IF_ERROR(need(c.model, "model"));
      if (c.temperature.has_value() && !(*c.temperature > 0.0)) {
        return Usage("--temperature must be positive");
      }
      if (!c.temperature.has_value() && !positive_eps(c.epsilon)) {
        return Usage("--epsilon must be positive");
      }
      if (c.max_len == 0) return Usage("--max-len must be at least 1");
      break;
    case Command::kAttack:
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      DPTG_RETURN_IF_ERROR(need(c.perturbed, "perturbed"));
      if (c.task != "author" && c.task != "sentiment" && c.task != "all") {
        return Usage("--task must be author, sentiment or all");
      }
      if (c.mode != "static" && c.mode != "adaptive" && c.mode != "all") {
        return Usage("--mode must be static, adaptive or all");
      }
      break;
    case Command::kSweep: {
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      DPTG_RETURN_IF_ERROR(check_grid());
      const std::vector<std::string> mechs =
          c.mechanisms.empty()
              ? std::vector<std::string>(std::begin(kDefaultMechanisms),
                                         std::end(kDefaultMechanisms))
              : c.mechanisms;
      for (const std::string& m : mechs) {
        if (m == "euclidean") DPTG_RETURN_IF_ERROR(need(c.embeddings, "embeddings"));
        if (m == "poincare") {
          DPTG_RETURN_IF_ERROR(need(c.poincare_embeddings, "poincare-embeddings"));
        }
        if (m != "identity" && m != "euclidean" && m != "poincare" && m != "paraphrase") {
          return Usage(absl::StrCat("unknown mechanism '", m, "'"));
        }
      }
      break;
    }
    case Command::kAudit:
      DPTG_RETURN_IF_ERROR(need(c.table, "table"));
      if (!positive_eps(c.epsilon)) return Usage("--epsilon must be positive");
      if (c.mechanism_epsilon.has_value() && !positive_eps(*c.mechanism_epsilon)) {
        return Usage("--mechanism-epsilon must be positive");
      }
      if (!(c.exponent_scale > 0.0)) return Usage("--exponent-scale must be positive");
      if (c.sequence_length == 0) return Usage("--sequence-length must be at least 1");
      break;
    case Command::kTypechange:
      DPTG_RETURN_IF_ERROR(need(c.lexicon, "lexicon"));
      DPTG_RETURN_IF_ERROR(need(c.embeddings, "embeddings"));
      DPTG_RETURN_IF_ERROR(check_grid());
      if (c.sample_size == 0) return Usage("--sample-size must be at least 1");
      break;
    case Command::kSynth:
      break;
    case Command::kConvert:
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      if (c.rating_scale != 5 && c.rating_scale != 10) {
        return Usage("--rating-scale must be 5 or 10");
      }
      if (c.top_authors == 0) return Usage("--top-authors must be at least 1");
      break;
    case Command::kTrainLm:
      DPTG_RETURN_IF_ERROR(need(c.dataset, "dataset"));
      if (c.lm_order < 1) return Usage("--lm-order must be at least 1");
      if (!(c.lm_alpha > 0.0)) return Usage("--lm-alpha must be positive");
      break;
  }
  return absl::OkStatus();
}

std::string ManifestPath(const std::string& output) {
  std::string path = output;
  while (path.size() > 1 && path.back() == '/') path.pop_back();
  return path + ".manifest.json";
}

json MakeManifest(const RunConfig& config, const json& summary) {
  return {{"tool", "dptg"},
          {"version", DPTG_VERSION},
          {"command", CommandName(config.command)},
          {"config", RunConfigToJson(config)},
          {"summary", summary}};
}

absl::StatusOr<RunConfig> LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("config")) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not a manifest"));
  }
  if (j.value("tool", "") != "dptg") {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not a dptg manifest"));
  }
  return RunConfigFromJson(j["config"]);
}

absl::Status ParallelFor(size_t n, size_t threads,
                         const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> status(n);
  const size_t workers = std::max<size_t>(1, std::min(threads, n));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) {
      status[i] = fn(i);
      if (!status[i].ok()) return status[i];
    }
    return absl::OkStatus();
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) status[i] = fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<RunOutcome> Run(const RunConfig& config, std::ostream& log) {
  DPTG_RETURN_IF_ERROR(ValidateConfig(config));
  DPTG_ASSIGN_OR_RETURN(kernels::Isa isa, kernels::ParseIsa(config.kernel));
  DPTG_RETURN_IF_ERROR(kernels::SetActiveIsa(isa));
  absl::StatusOr<RunOutcome> outcome;
  switch (config.command) {
    case Command::kAnonymize: outcome = RunAnonymize(config, log); break;
    case Command::kParaphrase: outcome = RunParaphrase(config, log); break;
    case Command::kAttack: outcome = RunAttackCommand(config, log); break;
    case Command::kSweep: outcome = RunSweepCommand(config, log); break;
    case Command::kAudit: outcome = RunAudit(config, log); break;
    case Command::kTypechange: outcome = RunTypechangeCommand(config, log); break;
    case Command::kSynth: outcome = RunSynth(config, log); break;
    case Command::kConvert: outcome = RunConvert(config, log); break;
    case Command::kTrainLm: outcome = RunTrainLm(config, log); break;
  }
  if (!outcome.ok()) return outcome.status();
  DPTG_RETURN_IF_ERROR(WriteText(ManifestPath(config.output),
                                 MakeManifest(config, outcome->summary).dump(2) + "\n"));
  return outcome;
}

// ---- sweep ------------------------------------------------------------------

absl::StatusOr<SweepReport> RunSweep(const SweepInputs& in, const RunConfig& config,
                                     std::ostream& log) {
  if (in.corpus == nullptr || in.corpus->empty()) {
    return absl::InvalidArgumentError("sweep needs a non-empty corpus");
  }
  if (config.epsilons.empty()) return absl::InvalidArgumentError("empty epsilon grid");
  if (config.repeats == 0) return absl::InvalidArgumentError("repeats must be positive");
  const std::vector<std::string> mechanisms =
      config.mechanisms.empty() ? std::vector<std::string>(std::begin(kDefaultMechanisms),
                                                           std::end(kDefaultMechanisms))
                                : config.mechanisms;
  for (const std::string& m : mechanisms) {
    if (m == "euclidean" && in.euclidean == nullptr) {
      return absl::InvalidArgumentError("euclidean mechanism needs an embedding store");
    }
    if (m == "poincare" && in.poincare == nullptr) {
      return absl::InvalidArgumentError("poincare mechanism needs a Poincare store");
    }
  }

  const std::vector<Record> canonical = Canonicalize(*in.corpus);
  std::vector<Split> splits;
  if (config.folds <= 1) {
    DPTG_ASSIGN_OR_RETURN(Split split,
                          StratifiedSplit(canonical, config.seed, config.test_fraction));
    splits.push_back(std::move(split));
  } else {
    DPTG_ASSIGN_OR_RETURN(splits, StratifiedFolds(canonical, config.seed, config.folds));
  }
  std::vector<size_t> eval;
  for (const Split& s : splits) eval.insert(eval.end(), s.test.begin(), s.test.end());
  std::sort(eval.begin(), eval.end());

  // The paraphraser's model stands in for a pretrained generator; it is fit
  // on the whole corpus, independently of the attackers' splits.
  std::optional<NgramModel> trained;
  const NgramModel* lm = in.language_model;
  if (lm == nullptr) {
    std::vector<std::vector<std::string>> sentences;
    for (const Record& r : canonical) sentences.push_back(Tokenize(r.text));
    DPTG_ASSIGN_OR_RETURN(trained, NgramModel::Train(sentences, config.lm_order,
                                                     config.lm_alpha));
    lm = &*trained;
  }

  const AttackOptions attack{config.gram_size, config.nb_alpha};
  std::vector<NaiveBayesModel> author_static, sentiment_static;
  for (const Split& s : splits) {
    DPTG_ASSIGN_OR_RETURN(NaiveBayesModel a,
                          TrainAttacker(canonical, s.train, Task::kAuthor, attack));
    DPTG_ASSIGN_OR_RETURN(NaiveBayesModel b,
                          TrainAttacker(canonical, s.train, Task::kSentiment, attack));
    author_static.push_back(std::move(a));
    sentiment_static.push_back(std::move(b));
  }
  // Static attackers score `texts`; adaptive ones are trained on them too.
  auto attack_all = [&](const std::vector<Record>& texts, Task task,
                        AttackMode mode) -> absl::StatusOr<double> {
    std::vector<AttackResult> parts;
    for (size_t f = 0; f < splits.size(); ++f) {
      if (mode == AttackMode::kStatic) {
        const NaiveBayesModel& m =
            task == Task::kAuthor ? author_static[f] : sentiment_static[f];
        DPTG_ASSIGN_OR_RETURN(AttackResult r, EvaluateAttacker(m, canonical, texts,
                                                               splits[f].test, task, mode));
        parts.push_back(std::move(r));
      } else {
        DPTG_ASSIGN_OR_RETURN(AttackResult r,
                              RunAttack(canonical, texts, splits[f], task, mode, attack));
        parts.push_back(std::move(r));
      }
    }
    DPTG_ASSIGN_OR_RETURN(AttackResult pooled, PoolResults(parts));
    return pooled.mcc;
  };

  struct Cell {
    std::string mechanism;
    double epsilon;
    size_t repeat;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const std::string& m : mechanisms) {
    if (m == "identity") {
      cells.push_back({m, std::numeric_limits<double>::infinity(), 0, 0});
      continue;
    }
    for (double e : config.epsilons) {
      for (size_t r = 0; r < config.repeats; ++r) {
        // One seed per repeat, shared across mechanisms and budgets, so the
        // noise along the grid is coupled (common random numbers).
        cells.push_back({m, e, r, DeriveSeed(config.seed, r)});
      }
    }
  }

  std::vector<CellScores> scores(cells.size());
  std::mutex log_mutex;
  DPTG_RETURN_IF_ERROR(ParallelFor(cells.size(), config.threads, [&](size_t c) {
    const Cell& cell = cells[c];
    DPTG_ASSIGN_OR_RETURN(CellOutput out,
                          PerturbCorpus(cell.mechanism, cell.epsilon, cell.seed, canonical,
                                        eval, in, *lm, config));
    CellScores& s = scores[c];
    s.total_budget = out.mean_budget;
    s.similarity = out.similarity;
    s.ppl = out.ppl;
    s.type_change = out.type_change;
    DPTG_ASSIGN_OR_RETURN(s.author_static,
                          attack_all(out.perturbed, Task::kAuthor, AttackMode::kStatic));
    DPTG_ASSIGN_OR_RETURN(s.sentiment_static,
                          attack_all(out.perturbed, Task::kSentiment, AttackMode::kStatic));
    if (cell.mechanism == "identity") {
      s.author_adaptive = s.author_static;
      s.sentiment_adaptive = s.sentiment_static;
    } else {
      DPTG_ASSIGN_OR_RETURN(s.author_adaptive,
                            attack_all(out.perturbed, Task::kAuthor, AttackMode::kAdaptive));
      DPTG_ASSIGN_OR_RETURN(
          s.sentiment_adaptive,
          attack_all(out.perturbed, Task::kSentiment, AttackMode::kAdaptive));
    }
    std::lock_guard<std::mutex> lock(log_mutex);
    log << "sweep: " << cell.mechanism << " eps=" << FormatDouble(cell.epsilon)
        << " repeat=" << cell.repeat << " author=" << FormatDouble(s.author_static)
        << "/" << FormatDouble(s.author_adaptive) << "\n";
    return absl::OkStatus();
  }));

  SweepReport report;
  // Static attackers on the original text are the baseline.
  DPTG_ASSIGN_OR_RETURN(report.author_baseline,
                        attack_all(canonical, Task::kAuthor, AttackMode::kStatic));
  DPTG_ASSIGN_OR_RETURN(report.sentiment_baseline,
                        attack_all(canonical, Task::kSentiment, AttackMode::kStatic));

  for (size_t begin = 0; begin < cells.size();) {
    size_t end = begin;
    while (end < cells.size() && cells[end].mechanism == cells[begin].mechanism &&
           cells[end].epsilon == cells[begin].epsilon) {
      ++end;
    }
    SweepRow row;
    row.mechanism = cells[begin].mechanism;
    row.epsilon = cells[begin].epsilon;
    std::vector<double> as, aa, ss, sa, budget;
    std::vector<std::optional<double>> sim, ppl, tc;
    for (size_t c = begin; c < end; ++c) {
      as.push_back(scores[c].author_static);
      aa.push_back(scores[c].author_adaptive);
      ss.push_back(scores[c].sentiment_static);
      sa.push_back(scores[c].sentiment_adaptive);
      budget.push_back(scores[c].total_budget);
      sim.push_back(scores[c].similarity);
      ppl.push_back(scores[c].ppl);
      tc.push_back(scores[c].type_change);
      if (row.mechanism != "identity") row.cell_seeds.push_back(cells[c].seed);
    }
    row.author_static = Median(as);
    row.author_adaptive = Median(aa);
    row.sentiment_static = Median(ss);
    row.sentiment_adaptive = Median(sa);
    row.total_budget = Median(budget);
    row.similarity = MedianOptional(sim);
    row.ppl = MedianOptional(ppl);
    row.type_change = MedianOptional(tc);
    DPTG_ASSIGN_OR_RETURN(row.gamma_static,
                          RelativeGain(report.author_baseline, report.sentiment_baseline,
                                       row.author_static, row.sentiment_static,
                                       config.normalization));
    DPTG_ASSIGN_OR_RETURN(row.gamma_adaptive,
                          RelativeGain(report.author_baseline, report.sentiment_baseline,
                                       row.author_adaptive, row.sentiment_adaptive,
                                       config.normalization));
    report.rows.push_back(std::move(row));
    begin = end;
  }

  // The strongest attacker decides the trade-off, so the best row per
  // mechanism maximizes the adaptive gain.
  std::map<std::string, size_t> best;
  for (size_t i = 0; i < report.rows.size(); ++i) {
    auto it = best.find(report.rows[i].mechanism);
    if (it == best.end() ||
        report.rows[i].gamma_adaptive > report.rows[it->second].gamma_adaptive) {
      best[report.rows[i].mechanism] = i;
    }
  }
  for (const auto& [m, i] : best) report.rows[i].best = true;
  return report;
}

namespace {

constexpr const char* kSweepColumns[] = {
    "mechanism",        "epsilon",          "total_budget",       "author_static",
    "author_adaptive",  "sentiment_static", "sentiment_adaptive", "gamma_static",
    "gamma_adaptive",   "similarity",       "ppl",                "type_change",
    "cell_seeds",       "best"};

std::string FormatOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "NA";
}

absl::StatusOr<double> ParseCsvDouble(absl::string_view field, size_t line_no) {
  const std::string s(field);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_no, ": bad number '", s, "'"));
  }
  return v;
}

}  // namespace

void WriteSweepCsv(const SweepReport& report, std::ostream& out) {
  out << absl::StrJoin(kSweepColumns, ",") << "\n";
  for (const SweepRow& r : report.rows) {
    std::vector<std::string> seeds;
    for (uint64_t s : r.cell_seeds) seeds.push_back(std::to_string(s));
    out << r.mechanism << "," << FormatDouble(r.epsilon) << ","
        << FormatDouble(r.total_budget) << "," << FormatDouble(r.author_static) << ","
        << FormatDouble(r.author_adaptive) << "," << FormatDouble(r.sentiment_static)
        << "," << FormatDouble(r.sentiment_adaptive) << ","
        << FormatDouble(r.gamma_static) << "," << FormatDouble(r.gamma_adaptive) << ","
        << FormatOptional(r.similarity) << "," << FormatOptional(r.ppl) << ","
        << FormatOptional(r.type_change) << "," << absl::StrJoin(seeds, ";") << ","
        << (r.best ? 1 : 0) << "\n";
  }
}

absl::StatusOr<std::vector<SweepRow>> ReadSweepCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != absl::StrJoin(kSweepColumns, ",")) {
    return absl::InvalidArgumentError("line 1: unexpected sweep CSV header");
  }
  std::vector<SweepRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    if (f.size() != std::size(kSweepColumns)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected ", std::size(kSweepColumns), " fields"));
    }
    SweepRow r;
    r.mechanism = std::string(f[0]);
    double* plain[] = {&r.epsilon,          &r.total_budget,       &r.author_static,
                       &r.author_adaptive,  &r.sentiment_static,   &r.sentiment_adaptive,
                       &r.gamma_static,     &r.gamma_adaptive};
    for (size_t k = 0; k < std::size(plain); ++k) {
      DPTG_ASSIGN_OR_RETURN(*plain[k], ParseCsvDouble(f[k + 1], line_no));
    }
    std::optional<double>* optional[] = {&r.similarity, &r.ppl, &r.type_change};
    for (size_t k = 0; k < std::size(optional); ++k) {
      if (f[9 + k] == "NA") continue;
      DPTG_ASSIGN_OR_RETURN(*optional[k], ParseCsvDouble(f[9 + k], line_no));
    }
    for (absl::string_view s : absl::StrSplit(f[12], ';', absl::SkipEmpty())) {
      char* end = nullptr;
      const std::string str(s);
      r.cell_seeds.push_back(std::strtoull(str.c_str(), &end, 10));
      if (end != str.c_str() + str.size()) {
        return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": bad seed"));
      }
    }
    if (f[13] != "0" && f[13] != "1") {
      return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": bad best flag"));
    }
    r.best = f[13] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---- typechange -------------------------------------------------------------

absl::StatusOr<TypeChangeSweep> RunTypeChange(const EmbeddingStore& store,
                                              const TypeLexicon& lexicon,
                                              const RunConfig& config) {
  if (lexicon.empty()) return absl::InvalidArgumentError("lexicon is empty");
  if (config.epsilons.empty()) return absl::InvalidArgumentError("empty epsilon grid");
  if (config.repeats == 0 || config.sample_size == 0) {
    return absl::InvalidArgumentError("repeats and sample size must be positive");
  }
  std::vector<size_t> candidates;
  for (const std::string& w : lexicon.words()) {
    if (auto idx = store.IndexOf(w)) candidates.push_back(*idx);
  }
  if (candidates.empty()) {
    return absl::InvalidArgumentError("no lexicon word is in the embedding vocabulary");
  }
  TypeChangeSweep sweep;
  sweep.candidates = candidates.size();
  sweep.sampled_with_replacement = candidates.size() < config.sample_size;
  for (double e : config.epsilons) {
    TypeChangeRow row;
    row.epsilon = e;
    sweep.rows.push_back(row);
  }

  for (size_t r = 0; r < config.repeats; ++r) {
    const uint64_t seed = DeriveSeed(config.seed, r);
    RngStream pick(seed, 0);
    std::vector<size_t> sample;
    if (sweep.sampled_with_replacement) {
      for (size_t i = 0; i < config.sample_size; ++i) {
        sample.push_back(candidates[pick.NextBelow(candidates.size())]);
      }
    } else {
      std::vector<size_t> pool = candidates;
      for (size_t i = 0; i < config.sample_size; ++i) {
        std::swap(pool[i], pool[i + pick.NextBelow(pool.size() - i)]);
        sample.push_back(pool[i]);
      }
    }
    for (TypeChangeRow& row : sweep.rows) {
      // Same stream for every budget: the grid is compared on shared noise.
      RngStream noise(seed, 1);
      std::vector<std::pair<std::string, std::string>> pairs;
      for (size_t idx : sample) {
        DPTG_ASSIGN_OR_RETURN(Neighbor nn, PerturbWord(store, idx, row.epsilon, noise));
        pairs.emplace_back(store.word(idx), store.word(nn.index));
      }
      const TypeChangeReport rep = WordTypeChangeRate(pairs, lexicon);
      row.rates.push_back(rep.rate.value_or(0.0));
      row.evaluated += rep.evaluated;
      row.changed += rep.changed;
    }
  }
  for (TypeChangeRow& row : sweep.rows) row.median_rate = Median(row.rates);
  return sweep;
}

json TypeChangeToJson(const TypeChangeSweep& sweep) {
  json rows = json::array();
  for (const TypeChangeRow& r : sweep.rows) {
    rows.push_back({{"epsilon", r.epsilon},
                    {"median_rate", r.median_rate},
                    {"rates", r.rates},
                    {"evaluated", r.evaluated},
                    {"changed", r.changed}});
  }
  return {{"candidates", sweep.candidates},
          {"sampled_with_replacement", sweep.sampled_with_replacement},
          {"rows", rows}};
}

}  // namespace dptg::pipeline
