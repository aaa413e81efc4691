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

#include "dptg/cli.h"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dptg/pipeline.h"

namespace dptg::cli {
namespace {

using pipeline::Command;
using pipeline::RunConfig;

struct Flags {
  RunConfig config;
  std::string geometry = "euclidean";
  std::string oov_policy = "ignore";
  std::string normalization = "clamp";
  double temperature = 0.0;
  double mechanism_epsilon = 0.0;
  std::string manifest;
};

void AddOutput(CLI::App* app, Flags& f) {
  app->add_option("-o,--output", f.config.output, "Output path")->required();
  app->add_option("--seed", f.config.seed, "Random seed (falls back to $DPTG_SEED)");
  app->add_option("--threads", f.config.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  app->add_option("--kernel", f.config.kernel, "Distance kernel: auto, scalar, avx2");
}

void AddMechanism(CLI::App* app, Flags& f) {
  app->add_option("--geometry", f.geometry, "euclidean or poincare");
  app->add_option("--oov-policy", f.oov_policy, "ignore or remove");
}

void AddAttacker(CLI::App* app, Flags& f) {
  app->add_option("--test-fraction", f.config.test_fraction, "Held-out fraction");
  app->add_option("--gram-size", f.config.gram_size, "Character n-gram size");
  app->add_option("--nb-alpha", f.config.nb_alpha, "Naive Bayes smoothing");
}

void AddDecoder(CLI::App* app, Flags& f) {
  app->add_option("--dq", f.config.dq, "Logit sensitivity bound");
  app->add_option("--max-len", f.config.max_len, "Maximum generated tokens");
  app->add_option("--lm-weight", f.config.lm_weight,
                  "Weight of the language model against the input content");
  app->add_option("--lm-order", f.config.lm_order, "n-gram order when training");
  app->add_option("--lm-alpha", f.config.lm_alpha, "n-gram smoothing when training");
}

}  // namespace

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private text rewriting toolkit", "dptg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DPTG_VERSION);
  Flags f;
  RunConfig& c = f.config;

  auto* anonymize = app.add_subcommand("anonymize", "Word-level perturb-and-replace");
  anonymize->add_option("--dataset", c.dataset, "Corpus JSONL")->required();
  anonymize->add_option("--embeddings", c.embeddings, "Embedding store")->required();
  anonymize->add_option("--epsilon", c.epsilon, "Per-word budget")->required();
  AddMechanism(anonymize, f);
  AddOutput(anonymize, f);

  auto* paraphrase = app.add_subcommand("paraphrase", "Temperature-sampled paraphrasing");
  paraphrase->add_option("--dataset", c.dataset, "Corpus JSONL")->required();
  paraphrase->add_option("--model", c.model, "n-gram model JSON")->required();
  auto* eps_opt = paraphrase->add_option("--epsilon", c.epsilon, "Per-token budget");
  auto* t_opt = paraphrase->add_option("--temperature", f.temperature, "Temperature");
  eps_opt->excludes(t_opt);
  AddDecoder(paraphrase, f);
  AddOutput(paraphrase, f);

  auto* attack = app.add_subcommand("attack", "Authorship and sentiment attackers");
  attack->add_option("--dataset", c.dataset, "Original corpus JSONL")->required();
  attack->add_option("--perturbed", c.perturbed, "Mechanism output JSONL")->required();
  attack->add_option("--text-field", c.text_field, "Member holding perturbed text");
  attack->add_option("--task", c.task, "author, sentiment or all");
  attack->add_option("--mode", c.mode, "static, adaptive or all");
  AddAttacker(attack, f);
  AddOutput(attack, f);

  auto* sweep = app.add_subcommand("sweep", "Privacy-utility sweep over budgets");
  sweep->add_option("--dataset", c.dataset, "Corpus JSONL")->required();
  sweep->add_option("--embeddings", c.embeddings, "Euclidean embedding store");
  sweep->add_option("--poincare-embeddings", c.poincare_embeddings, "Poincare store");
  sweep->add_option("--lexicon", c.lexicon, "Word type lexicon TSV");
  sweep->add_option("--model", c.model, "n-gram model JSON (trained if absent)");
  sweep->add_option("--epsilons", c.epsilons, "Budget grid")->delimiter(',')->required();
  sweep->add_option("--mechanisms", c.mechanisms,
                    "identity, euclidean, poincare, paraphrase")
      ->delimiter(',');
  sweep->add_option("--repeats", c.repeats, "Seeds per cell (median reported)");
  sweep->add_option("--folds", c.folds, "Cross-fitting folds (1 = single split)");
  sweep->add_option("--oov-policy", f.oov_policy, "ignore or remove");
  sweep->add_option("--normalization", f.normalization, "clamp or affine");
  AddAttacker(sweep, f);
  AddDecoder(sweep, f);
  AddOutput(sweep, f);

  auto* audit = app.add_subcommand("audit", "Exhaustive Exponential-mechanism audit");
  audit->add_option("--table", c.table, "Quality table JSON")->required();
  audit->add_option("--epsilon", c.epsilon, "Claimed budget")->required();
  auto* me = audit->add_option("--mechanism-epsilon", f.mechanism_epsilon,
                               "Budget the mechanism was built for");
  audit->add_option("--exponent-scale", c.exponent_scale,
                    "Exponent multiplier (0.5 is correct)");
  audit->add_option("--sequence-length", c.sequence_length, "Audit n-fold composition");
  AddOutput(audit, f);

  auto* typechange = app.add_subcommand("typechange", "Word type change rates");
  typechange->add_option("--lexicon", c.lexicon, "Word type lexicon TSV")->required();
  typechange->add_option("--embeddings", c.embeddings, "Embedding store")->required();
  typechange->add_option("--epsilons", c.epsilons, "Budget grid")
      ->delimiter(',')
      ->required();
  typechange->add_option("--sample-size", c.sample_size, "Tokens per repeat");
  typechange->add_option("--repeats", c.repeats, "Seeds (median reported)");
  typechange->add_option("--geometry", f.geometry, "euclidean or poincare");
  AddOutput(typechange, f);

  auto* synth = app.add_subcommand("synth", "Write the synthetic world to a directory");
  AddOutput(synth, f);

  auto* convert = app.add_subcommand("convert", "Raw review scores to corpus JSONL");
  convert->add_option("--dataset", c.dataset, "Raw reviews JSONL")->required();
  convert->add_option("--rating-scale", c.rating_scale, "5 or 10");
  convert->add_option("--top-authors", c.top_authors, "Keep the most prolific authors");
  AddOutput(convert, f);

  auto* train_lm = app.add_subcommand("train-lm", "Train the n-gram decoder model");
  train_lm->add_option("--dataset", c.dataset, "Corpus JSONL")->required();
  train_lm->add_option("--lm-order", c.lm_order, "n-gram order");
  train_lm->add_option("--lm-alpha", c.lm_alpha, "Add-alpha smoothing");
  AddOutput(train_lm, f);

  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", f.manifest, "Manifest JSON")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (replay->parsed()) {
    auto loaded = pipeline::LoadManifest(f.manifest);
    if (!loaded.ok()) {
      err << "error: " << loaded.status().message() << "\n";
      return kExitData;
    }
    c = *loaded;
  } else {
    const CLI::App* sub = app.get_subcommands().front();
    auto command = pipeline::ParseCommand(sub->get_name());
    if (!command.ok()) {
      err << "error: " << command.status().message() << "\n";
      return kExitUsage;
    }
    c.command = *command;
    if (const CLI::Option* seed = sub->get_option_no_throw("--seed");
        seed == nullptr || seed->count() == 0) {
      if (const char* env = std::getenv("DPTG_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        c.seed = std::strtoull(env, &end, 10);
        if (*end != '\0') {
          err << "error: DPTG_SEED must be an unsigned integer\n";
          return kExitUsage;
        }
      }
    }
    auto geometry = ParseGeometry(f.geometry);
    auto oov = ParseOovPolicy(f.oov_policy);
    if (!geometry.ok() || !oov.ok()) {
      err << "error: "
          << (!geometry.ok() ? geometry.status().message() : oov.status().message())
          << "\n";
      return kExitUsage;
    }
    c.geometry = *geometry;
    c.oov_policy = *oov;
    if (f.normalization == "clamp") {
      c.normalization = ScoreNormalization::kClampNegative;
    } else if (f.normalization == "affine") {
      c.normalization = ScoreNormalization::kAffine;
    } else {
      err << "error: --normalization must be clamp or affine\n";
      return kExitUsage;
    }
    if (t_opt->count() > 0) c.temperature = f.temperature;
    if (me->count() > 0) c.mechanism_epsilon = f.mechanism_epsilon;
  }

  if (absl::Status st = pipeline::ValidateConfig(c); !st.ok()) {
    err << "error: " << st.message() << "\n";
    return kExitUsage;
  }
  auto outcome = pipeline::Run(c, err);
  if (!outcome.ok()) {
    err << "error: " << outcome.status().message() << "\n";
    return kExitData;
  }
  return outcome->audit_pass ? kExitOk : kExitAuditFailed;
}

}  // namespace dptg::cli
