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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dptg/cli.h"
#include "dptg/corpus.h"
#include "dptg/dp_softmax.h"
#include "dptg/embedding_store.h"
#include "dptg/exponential_mechanism.h"
#include "dptg/metrics.h"
#include "dptg/ngram_decoder.h"
#include "dptg/noise.h"
#include "dptg/pipeline.h"
#include "dptg/rng.h"
#include "dptg/tokenizer.h"
#include "dptg/word_mechanism.h"

namespace dptg::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records a failed check; the first few messages are kept.
  void Check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || std::count(detail.begin(), detail.end(), ';') < 4) {
      absl::StrAppend(&detail, detail.empty() ? "" : "; ", what);
    }
    pass = false;
  }
  void Note(const std::string& what) {
    absl::StrAppend(&detail, detail.empty() ? "" : "; ", what);
  }
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string DataDir() { return DPTG_DATA_DIR; }

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// exp(scale * eps * q / dq), normalized, in long double.
std::vector<long double> DirectPmf(const QualityTable& t, size_t x, double eps,
                                   double dq, double scale) {
  std::vector<long double> w(t.num_outputs());
  long double top = -std::numeric_limits<long double>::infinity();
  for (size_t y = 0; y < w.size(); ++y) {
    w[y] = static_cast<long double>(scale) * eps * t.at(x, y) / dq;
    top = std::max(top, w[y]);
  }
  long double sum = 0;
  for (long double& v : w) sum += (v = std::exp(v - top));
  for (long double& v : w) v /= sum;
  return w;
}

long double DirectMaxRatio(const QualityTable& t, double eps, double dq, double scale) {
  long double worst = 1;
  for (const auto& [a, b] : t.adjacency) {
    const auto pa = DirectPmf(t, a, eps, dq, scale);
    const auto pb = DirectPmf(t, b, eps, dq, scale);
    for (size_t y = 0; y < pa.size(); ++y) {
      worst = std::max({worst, pa[y] / pb[y], pb[y] / pa[y]});
    }
  }
  return worst;
}

QualityTable RandomTable(RngStream& rng, size_t max_inputs, size_t max_outputs) {
  const size_t nx = 2 + rng.NextBelow(max_inputs - 1);
  const size_t ny = 1 + rng.NextBelow(max_outputs);
  std::vector<double> q(nx * ny);
  // Raw scores spill past [0, 1] and are clamped, so ties at the ends occur.
  for (double& v : q) v = std::clamp(1.4 * rng.NextUniform() - 0.2, 0.0, 1.0);
  std::vector<std::string> in(nx), out(ny);
  for (size_t i = 0; i < nx; ++i) in[i] = absl::StrCat("x", i);
  for (size_t j = 0; j < ny; ++j) out[j] = absl::StrCat("y", j);
  return *QualityTable::Create(in, out, q, QualityTable::AllPairs(nx));
}

// ---- AC1 --------------------------------------------------------------------

Verdict Ac1() {
  Verdict v;
  const auto start = Clock::now();
  RngStream rng(101, 0);
  size_t checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const QualityTable t = RandomTable(rng, 8, 32);
    const double eps = 0.05 + 8.0 * rng.NextUniform();
    auto report = VerifyDpBound(t, eps);
    if (!report.ok()) {
      v.Check(false, std::string(report.status().message()));
      continue;
    }
    v.Check(report->pass, absl::StrCat("table ", trial, " failed its audit"));
    const double dq = t.Sensitivity();
    if (dq == 0.0) {
      v.Check(report->max_ratio == 1.0, "constant table with non-unit ratio");
      ++checked;
      continue;
    }
    const long double direct = DirectMaxRatio(t, eps, dq, 0.5);
    v.Check(std::abs(direct - report->max_ratio) <= 1e-9 * direct,
            absl::StrCat("table ", trial, " ratio disagrees with direct formula"));
    // Set-level bound on random output subsets, from the direct pmfs.
    for (const auto& [a, b] : t.adjacency) {
      const auto pa = DirectPmf(t, a, eps, dq, 0.5);
      const auto pb = DirectPmf(t, b, eps, dq, 0.5);
      for (int s = 0; s < 4; ++s) {
        long double ra = 0, rb = 0;
        for (size_t y = 0; y < pa.size(); ++y) {
          if (rng.NextBelow(2) == 1) {
            ra += pa[y];
            rb += pb[y];
          }
        }
        if (rb == 0) continue;
        const long double excess = ra - std::exp(static_cast<long double>(eps)) * rb;
        v.Check(excess <= 1e-9, absl::StrCat("table ", trial, " set bound violated"));
      }
    }
    ++checked;
  }

  // Exponent eps instead of eps/2: the witness rows (1,0,0) and (0,1,1).
  auto witness = QualityTable::Create({"d", "d2"}, {"a", "b", "c"}, {1, 0, 0, 0, 1, 1},
                                      {{0, 1}});
  bool flagged = false;
  for (double eps : {0.5, 1.0, 2.0}) {
    auto bad = VerifyDpBound(*witness, eps, MechanismParams{eps, 1.0});
    const bool this_flagged = bad.ok() && !bad->pass;
    v.Check(this_flagged, absl::StrCat("mis-scaled mechanism passed at eps=", eps));
    flagged = flagged || this_flagged;
  }
  // The same mis-scaling on fresh random tables: count how many are caught.
  RngStream again(102, 0);
  size_t caught = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const QualityTable t = RandomTable(again, 8, 32);
    const double eps = 0.05 + 8.0 * again.NextUniform();
    auto bad = VerifyDpBound(t, eps, MechanismParams{eps, 1.0});
    if (bad.ok() && !bad->pass) ++caught;
  }
  const double secs = Seconds(start);
  v.Check(secs < 30.0, absl::StrFormat("runtime %.1fs", secs));
  v.Note(absl::StrFormat(
      "%zu tables within 1e-9; mis-scaled witness flagged=%s; mis-scaled random "
      "tables flagged %zu/1000; %.1fs",
      checked, flagged ? "yes" : "no", caught, secs));
  return v;
}

// ---- AC2 --------------------------------------------------------------------

Verdict Ac2() {
  Verdict v;
  RngStream rng(202, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t m = 1 + rng.NextBelow(64);
    std::vector<double> logits(m);
    for (double& l : logits) l = 16.0 * rng.NextUniform() - 8.0;
    const double temperature = 0.05 + 5.0 * rng.NextUniform();
    const double dq = 0.1 + 1.9 * rng.NextUniform();
    auto soft = SoftmaxWithTemperature(logits, temperature);
    auto table = QualityTable::Create({"x"}, std::vector<std::string>(m, "y"), logits, {},
                                      dq);
    if (!soft.ok() || !table.ok()) {
      v.Check(false, "setup failed");
      continue;
    }
    auto pmf = ExponentialMechanismPmf(*table, 0, 2.0 * dq / temperature);
    if (!pmf.ok()) {
      v.Check(false, std::string(pmf.status().message()));
      continue;
    }
    for (size_t y = 0; y < m; ++y) {
      worst = std::max(worst, std::abs(pmf->probs[y] - (*soft)[y]));
    }
  }
  v.Check(worst <= 1e-12, absl::StrFormat("max deviation %.3g", worst));
  v.Note(absl::StrFormat("1000 vectors, max |softmax - EM| = %.3g", worst));
  return v;
}

// ---- AC3 --------------------------------------------------------------------

// Laplace density (eps/2) exp(-eps |z - mu|) integrated over [lo, hi] by
// composite Simpson, split at the kink.
double SimpsonMass(double mu, double eps, double lo, double hi) {
  auto simpson = [&](double a, double b) {
    if (b <= a) return 0.0;
    const int n = 4000;
    const double h = (b - a) / n;
    auto f = [&](double z) { return 0.5 * eps * std::exp(-eps * std::abs(z - mu)); };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  if (mu <= lo || mu >= hi) return simpson(lo, hi);
  return simpson(lo, mu) + simpson(mu, hi);
}

double LaplaceCdf(double z, double mu, double eps) {
  return z < mu ? 0.5 * std::exp(eps * (z - mu)) : 1.0 - 0.5 * std::exp(-eps * (z - mu));
}

Verdict Ac3() {
  Verdict v;
  const auto start = Clock::now();
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  const std::vector<double> pos = {0.0, 0.6, 1.1, 2.5, 4.0};
  auto store = EmbeddingStore::Create(words, pos, 1, Geometry::kEuclidean);
  if (!store.ok()) {
    v.Check(false, "store");
    return v;
  }
  const size_t k = words.size();
  double worst_excess = -1.0, worst_cf = 0.0, worst_z = 0.0;
  for (double eps : {0.5, 1.0, 2.0}) {
    const double tail = 60.0 / eps;
    std::vector<double> edge(k + 1);
    edge[0] = pos.front() - tail;
    edge[k] = pos.back() + tail;
    for (size_t j = 1; j < k; ++j) edge[j] = 0.5 * (pos[j - 1] + pos[j]);

    std::vector<std::vector<double>> p(k, std::vector<double>(k));
    for (size_t x = 0; x < k; ++x) {
      for (size_t y = 0; y < k; ++y) {
        p[x][y] = SimpsonMass(pos[x], eps, edge[y], edge[y + 1]);
        const double lo = y == 0 ? 0.0 : LaplaceCdf(edge[y], pos[x], eps);
        const double hi = y == k - 1 ? 1.0 : LaplaceCdf(edge[y + 1], pos[x], eps);
        worst_cf = std::max(worst_cf, std::abs(p[x][y] - (hi - lo)));
      }
    }
    for (size_t x = 0; x < k; ++x) {
      for (size_t x2 = 0; x2 < k; ++x2) {
        const double bound = std::exp(eps * std::abs(pos[x] - pos[x2]));
        for (size_t y = 0; y < k; ++y) {
          const double excess = p[x][y] / p[x2][y] - bound;
          worst_excess = std::max(worst_excess, excess / bound);
          v.Check(p[x][y] <= bound * p[x2][y] * (1.0 + 1e-6),
                  absl::StrFormat("eps=%g %s->%s vs %s", eps, words[x], words[y],
                                  words[x2]));
        }
      }
    }
    // The implementation's substitution frequencies match the quadrature.
    const int draws = 100000;
    for (size_t x = 0; x < k; ++x) {
      RngStream rng(303, x);
      std::vector<int> hits(k);
      for (int i = 0; i < draws; ++i) {
        auto nn = PerturbWord(*store, x, eps, rng);
        if (nn.ok()) ++hits[nn->index];
      }
      for (size_t y = 0; y < k; ++y) {
        const double f = static_cast<double>(hits[y]) / draws;
        const double sd = std::sqrt(p[x][y] * (1 - p[x][y]) / draws) + 1e-6;
        const double z = std::abs(f - p[x][y]) / sd;
        worst_z = std::max(worst_z, z);
        v.Check(z < 5.0, absl::StrFormat("eps=%g %s->%s MC %.4f vs %.4f", eps, words[x],
                                         words[y], f, p[x][y]));
      }
    }
  }
  const double secs = Seconds(start);
  v.Check(worst_cf < 1e-9, absl::StrFormat("quadrature off closed form by %.2g", worst_cf));
  v.Check(secs < 10.0, absl::StrFormat("runtime %.1fs", secs));
  v.Note(absl::StrFormat(
      "max relative excess over e^{eps d} = %.2g; quadrature vs closed form %.1g; "
      "Monte Carlo max |z| = %.2f; %.1fs",
      worst_excess, worst_cf, worst_z, secs));
  return v;
}

// ---- AC4 --------------------------------------------------------------------

Verdict Ac4() {
  Verdict v;
  std::string notes;
  for (auto [dim, eps] : {std::pair<size_t, double>{1, 1.0}, {50, 10.0}, {50, 0.5}}) {
    auto spec = NoiseSpec::Create(eps, dim, Geometry::kEuclidean);
    const std::vector<double> origin(dim, 0.0);
    RngStream rng(404, dim * 1000 + static_cast<uint64_t>(eps * 10));
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      auto z = SampleNoise(*spec, origin, rng);
      double r2 = 0.0;
      for (double c : *z) r2 += c * c;
      sum += std::sqrt(r2);
    }
    const double mean = sum / n, target = static_cast<double>(dim) / eps;
    const double rel = std::abs(mean - target) / target;
    v.Check(rel <= 0.02, absl::StrFormat("(%zu,%g) mean %.4f vs %.4f", dim, eps, mean,
                                         target));
    absl::StrAppend(&notes, notes.empty() ? "" : ", ",
                    absl::StrFormat("(%zu,%g): %.4f vs %.4f (%.3f%%)", dim, eps, mean,
                                    target, 100 * rel));
  }
  v.Note(notes);
  return v;
}

// ---- AC5 --------------------------------------------------------------------

Verdict Ac5() {
  Verdict v;
  const std::string dir = DataDir() + "/synthetic/";
  auto corpus = ReadJsonlFile(dir + "corpus.jsonl");
  auto store = EmbeddingStore::LoadFile(dir + "euclidean.txt", {});
  if (!corpus.ok() || !store.ok()) {
    v.Check(false, "cannot load synthetic data");
    return v;
  }
  size_t runs = 0;
  for (double eps : {0.5, 3.0, 20.0}) {
    for (OovPolicy policy : {OovPolicy::kIgnore, OovPolicy::kRemove}) {
      const MechanismConfig config{eps, Geometry::kEuclidean, policy, 5};
      for (size_t i = 0; i < corpus->size(); i += 4) {
        std::vector<std::string> tokens = Tokenize((*corpus)[i].text);
        tokens.push_back("zzunknownzz");
        RngStream rng(5, i);
        auto out = AnonymizeSentence(tokens, *store, config, rng);
        if (!out.ok()) {
          v.Check(false, std::string(out.status().message()));
          continue;
        }
        size_t in_vocab = 0;
        for (const std::string& t : tokens) in_vocab += store->IndexOf(t).has_value();
        const BudgetReport& b = out->budget;
        v.Check(b.perturbed_token_count == in_vocab, "perturbed count");
        v.Check(b.total_epsilon == eps * static_cast<double>(in_vocab),
                absl::StrCat("anonymize total ", b.total_epsilon, " != ", eps, " x ",
                             in_vocab));
        ++runs;
      }
    }
  }
  std::vector<std::vector<std::string>> sentences;
  for (const Record& r : *corpus) sentences.push_back(Tokenize(r.text));
  auto model = NgramModel::Train(sentences, 2, 0.1);
  if (!model.ok()) {
    v.Check(false, "lm");
    return v;
  }
  for (double eps : {1.0, 4.0, 16.0}) {
    GenerationOptions options;
    options.temperature = TemperatureFromEpsilon(eps, 1.0);
    for (size_t i = 0; i < corpus->size(); i += 8) {
      RngStream rng(6, i);
      auto g = Generate(*model, (*corpus)[i].text, options, rng);
      if (!g.ok()) {
        v.Check(false, std::string(g.status().message()));
        continue;
      }
      v.Check(g->total_epsilon == g->per_step_epsilon * static_cast<double>(g->length),
              "generation total != per-step x steps");
      v.Check(std::abs(g->per_step_epsilon - eps) <= 1e-12 * eps, "per-step epsilon");
      v.Check(g->length >= g->tokens.size() && g->length <= options.max_len,
              "step count");
      ++runs;
    }
  }

  // Composed audit on toy sequences.
  RngStream rng(505, 0);
  size_t audits = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const QualityTable t = RandomTable(rng, 4, 4);
    const double eps = 0.1 + 3.0 * rng.NextUniform();
    const double dq = t.Sensitivity();
    for (size_t n = 1; n <= 3; ++n) {
      auto r = VerifySequenceDpBound(t, eps, n, MechanismParams{eps, 0.5});
      if (!r.ok()) {
        v.Check(false, std::string(r.status().message()));
        continue;
      }
      const double bound = std::exp(static_cast<double>(n) * eps);
      v.Check(r->pass && r->max_ratio <= bound * (1 + 1e-9),
              absl::StrFormat("sequence n=%zu ratio %.6g > %.6g", n, r->max_ratio, bound));
      if (dq > 0) {
        // Independent positions: the worst ratio is the single-step one to the n.
        const double expected = static_cast<double>(
            std::pow(DirectMaxRatio(t, eps, dq, 0.5), static_cast<long double>(n)));
        worst_gap = std::max(worst_gap, std::abs(r->max_ratio - expected) / expected);
      }
      ++audits;
    }
  }
  v.Check(worst_gap <= 1e-9, absl::StrFormat("composed ratio off by %.2g", worst_gap));
  v.Note(absl::StrFormat(
      "%zu runs with total = per-step x n exactly; %zu sequence audits within e^{n eps}, "
      "composed ratio = single^n within %.1g",
      runs, audits, worst_gap));
  return v;
}

// ---- AC6 --------------------------------------------------------------------

Verdict Ac6() {
  Verdict v;
  const std::string dir = DataDir() + "/synthetic/";
  auto store = EmbeddingStore::LoadFile(dir + "euclidean.txt", {});
  auto lexicon = TypeLexicon::LoadFile(dir + "lexicon.tsv");
  auto corpus = ReadJsonlFile(dir + "corpus.jsonl");
  if (!store.ok() || !lexicon.ok() || !corpus.ok()) {
    v.Check(false, "cannot load synthetic data");
    return v;
  }
  pipeline::RunConfig config;
  config.epsilons = {2.0, 8.0, 20.0};
  config.repeats = 5;
  config.sample_size = 1000;
  config.seed = 0;
  auto sweep = pipeline::RunTypeChange(*store, *lexicon, config);
  if (!sweep.ok()) {
    v.Check(false, std::string(sweep.status().message()));
    return v;
  }
  std::string rates;
  for (size_t i = 0; i < sweep->rows.size(); ++i) {
    absl::StrAppend(&rates, i ? ", " : "",
                    absl::StrFormat("eps=%g: %.4f", sweep->rows[i].epsilon,
                                    sweep->rows[i].median_rate));
    if (i > 0) {
      v.Check(sweep->rows[i].median_rate < sweep->rows[i - 1].median_rate,
              absl::StrFormat("not strictly decreasing at eps=%g",
                              sweep->rows[i].epsilon));
    }
  }

  std::vector<std::string> tokens;
  for (size_t i = 0; i < corpus->size(); i += 10) {
    for (const std::string& t : Tokenize((*corpus)[i].text)) {
      if (store->IndexOf(t)) tokens.push_back(t);
    }
  }
  const MechanismConfig huge{1e6, Geometry::kEuclidean, OovPolicy::kIgnore, 0};
  RngStream rng(606, 0);
  auto self = SelfSubstitutionRate(*store, huge, tokens, 5, rng);
  if (!self.ok()) {
    v.Check(false, std::string(self.status().message()));
    return v;
  }
  v.Check(*self > 0.99, absl::StrFormat("self-substitution %.4f", *self));
  v.Note(absl::StrFormat("median type-change rate %s; self-substitution at 1e6 = %.4f",
                         rates, *self));
  return v;
}

// ---- AC7 --------------------------------------------------------------------

// Repeats are fixed so that the paraphrase cells at the two smallest budgets,
// whose static author scores differ by about 0.01 against a per-repeat
// spread of about 0.012, are ordered with high probability.
constexpr size_t kSweepRepeats = 15;
constexpr size_t kSweepFolds = 5;

Verdict Ac7() {
  Verdict v;
  const auto start = Clock::now();
  const std::string dir = DataDir() + "/synthetic/";
  auto corpus = ReadJsonlFile(dir + "corpus.jsonl");
  auto euclidean = EmbeddingStore::LoadFile(dir + "euclidean.txt", {});
  LoadOptions poincare_options;
  poincare_options.geometry = Geometry::kPoincareBall;
  auto poincare = EmbeddingStore::LoadFile(dir + "poincare.txt", poincare_options);
  auto lexicon = TypeLexicon::LoadFile(dir + "lexicon.tsv");
  if (!corpus.ok() || !euclidean.ok() || !poincare.ok() || !lexicon.ok()) {
    v.Check(false, "cannot load synthetic data");
    return v;
  }
  pipeline::RunConfig config;
  config.command = pipeline::Command::kSweep;
  config.epsilons = {1.0, 4.0, 16.0, 1e6};
  config.mechanisms = {"identity", "euclidean", "poincare", "paraphrase"};
  config.repeats = kSweepRepeats;
  config.folds = kSweepFolds;
  config.seed = 0;
  config.threads = std::max(1u, std::thread::hardware_concurrency());
  pipeline::SweepInputs inputs;
  inputs.corpus = &*corpus;
  inputs.euclidean = &*euclidean;
  inputs.poincare = &*poincare;
  inputs.lexicon = &*lexicon;
  std::ostringstream log;
  auto report = pipeline::RunSweep(inputs, config, log);
  if (!report.ok()) {
    v.Check(false, std::string(report.status().message()));
    return v;
  }
  const double secs = Seconds(start);
  std::cout << "  AC7 sweep (" << kSweepRepeats << " repeats, " << kSweepFolds
            << " folds, seed 0): author baseline "
            << absl::StrFormat("%.4f", report->author_baseline) << ", sentiment baseline "
            << absl::StrFormat("%.4f", report->sentiment_baseline) << "\n";
  for (const pipeline::SweepRow& r : report->rows) {
    std::cout << absl::StrFormat(
        "    %-10s eps=%-8g author static %.4f adaptive %.4f | sentiment static %.4f "
        "adaptive %.4f\n",
        r.mechanism, r.epsilon, r.author_static, r.author_adaptive, r.sentiment_static,
        r.sentiment_adaptive);
  }

  // (a)
  double min_a = std::numeric_limits<double>::infinity();
  for (const pipeline::SweepRow& r : report->rows) {
    const double margin = r.author_adaptive - (r.author_static - 0.05);
    min_a = std::min(min_a, margin);
    v.Check(margin >= 0.0, absl::StrFormat("(a) %s eps=%g adaptive %.4f < static %.4f - 0.05",
                                           r.mechanism, r.epsilon, r.author_adaptive,
                                           r.author_static));
  }
  // (b)
  double min_b = std::numeric_limits<double>::infinity();
  std::map<std::string, std::vector<const pipeline::SweepRow*>> by_mechanism;
  for (const pipeline::SweepRow& r : report->rows) {
    if (r.mechanism != "identity") by_mechanism[r.mechanism].push_back(&r);
  }
  for (const auto& [m, rows] : by_mechanism) {
    for (size_t i = 1; i < rows.size(); ++i) {
      const double step = rows[i]->author_static - rows[i - 1]->author_static;
      min_b = std::min(min_b, step);
      v.Check(step >= 0.0, absl::StrFormat("(b) %s static author %.4f at eps=%g > %.4f at "
                                           "eps=%g",
                                           m, rows[i - 1]->author_static,
                                           rows[i - 1]->epsilon, rows[i]->author_static,
                                           rows[i]->epsilon));
    }
  }
  // (c)
  double max_c = 0.0;
  for (const pipeline::SweepRow& r : report->rows) {
    if (r.mechanism != "identity") continue;
    for (double d : {r.author_static - report->author_baseline,
                     r.author_adaptive - report->author_baseline,
                     r.sentiment_static - report->sentiment_baseline,
                     r.sentiment_adaptive - report->sentiment_baseline}) {
      max_c = std::max(max_c, std::abs(d));
    }
  }
  v.Check(max_c <= 0.02, absl::StrFormat("(c) identity off baseline by %.4f", max_c));
  v.Check(secs < 300.0, absl::StrFormat("runtime %.0fs", secs));
  v.Note(absl::StrFormat(
      "min (a) margin %.4f, min (b) step %.4f, (c) max deviation %.4f; %.0fs on %zu "
      "threads",
      min_a, min_b, max_c, secs, config.threads));
  return v;
}

// ---- AC8 --------------------------------------------------------------------

Verdict Ac8() {
  Verdict v;
  auto mcc = [](const std::vector<std::vector<int64_t>>& rows) {
    return Mcc(*ConfusionMatrix::FromRows(rows));
  };
  v.Check(mcc({{25, 0, 0}, {0, 13, 0}, {0, 0, 40}}) == 1.0, "diagonal MCC");
  v.Check(std::abs(mcc({{40, 10}, {10, 40}}) - 0.6) < 1e-12, "[[40,10],[10,40]] MCC");
  v.Check(mcc({{30, 0}, {20, 0}}) == 0.0, "degenerate column MCC");
  v.Check(mcc({{0, 0}, {0, 0}}) == 0.0, "empty MCC");

  auto gamma = [](double ao, double so, double ap, double sp) {
    return *RelativeGain(ao, so, ap, sp);
  };
  v.Check(std::abs(gamma(0.9, 0.7, 0.0, 0.7) - 1.0) < 1e-12, "gamma = 1");
  v.Check(std::abs(gamma(0.9, 0.7, 0.9, 0.7)) < 1e-12, "gamma = 0");
  const double g = gamma(0.98, 0.71, 0.12, 0.21);
  v.Check(std::abs(g - 0.1733) < 5e-5, absl::StrFormat("gamma %.5f vs 0.1733", g));

  TypeLexicon lex;
  (void)lex.Add("escape", kNoun | kVerb);
  (void)lex.Add("run", kVerb);
  (void)lex.Add("table", kNoun);
  (void)lex.Add("green", kAdjective);
  auto rate = [&](std::vector<std::pair<std::string, std::string>> p) {
    return WordTypeChangeRate(p, lex);
  };
  v.Check(*rate({{"table", "table"}}).rate == 0.0, "same word");
  v.Check(*rate({{"escape", "run"}}).rate == 0.0, "overlapping types");
  v.Check(*rate({{"table", "green"}}).rate == 1.0, "disjoint types");
  const TypeChangeReport mixed =
      rate({{"table", "green"}, {"run", "escape"}, {"table", "zzz"}, {"qq", "run"}});
  v.Check(mixed.evaluated == 2 && mixed.changed == 1 && mixed.excluded == 2 &&
              *mixed.rate == 0.5,
          "mixed pairs");
  v.Note(absl::StrFormat("MCC, gamma (0.1733 -> %.5f) and type-change examples", g));
  return v;
}

// ---- AC9 --------------------------------------------------------------------

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dptg");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict Ac9() {
  Verdict v;
  const fs::path tmp = fs::temp_directory_path() / "dptg_acceptance_ac9";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  auto f = [&](const std::string& name) { return (tmp / name).string(); };
  const std::string data = DataDir() + "/synthetic/";

  // A 200-record slice keeps the sweep and attack quick.
  {
    std::ifstream in(data + "corpus.jsonl");
    std::ofstream out(f("corpus.jsonl"));
    std::string line;
    for (int i = 0; i < 200 && std::getline(in, line); ++i) out << line << "\n";
    std::ofstream raw(f("raw.jsonl"));
    raw << "{\"user\":\"u1\",\"rating\":9,\"text\":\"great film\"}\n"
        << "{\"user\":\"u2\",\"rating\":2,\"text\":\"dull\"}\n"
        << "{\"user\":\"u1\",\"rating\":4,\"text\":\"meh\"}\n";
  }

  struct Job {
    std::vector<std::string> args;
    std::vector<std::string> outputs;
  };
  const std::vector<Job> jobs = {
      {{"synth", "--seed", "3", "-o", f("world")},
       {f("world/euclidean.txt"), f("world/poincare.txt"), f("world/lexicon.tsv"),
        f("world/corpus.jsonl")}},
      {{"convert", "--dataset", f("raw.jsonl"), "-o", f("converted.jsonl")},
       {f("converted.jsonl")}},
      {{"train-lm", "--dataset", f("corpus.jsonl"), "-o", f("lm.json")}, {f("lm.json")}},
      {{"anonymize", "--dataset", f("corpus.jsonl"), "--embeddings", data + "euclidean.txt",
        "--epsilon", "4", "--seed", "8", "--threads", "3", "-o", f("anon.jsonl")},
       {f("anon.jsonl")}},
      {{"anonymize", "--dataset", f("corpus.jsonl"), "--embeddings", data + "poincare.txt",
        "--geometry", "poincare", "--oov-policy", "remove", "--epsilon", "2", "-o",
        f("anon_p.jsonl")},
       {f("anon_p.jsonl")}},
      {{"paraphrase", "--dataset", f("corpus.jsonl"), "--model", f("lm.json"), "--epsilon",
        "8", "--seed", "2", "-o", f("para.jsonl")},
       {f("para.jsonl")}},
      {{"attack", "--dataset", f("corpus.jsonl"), "--perturbed", f("anon.jsonl"), "-o",
        f("attack.json")},
       {f("attack.json")}},
      {{"audit", "--table", DataDir() + "/tables/binary.json", "--epsilon", "1",
        "--sequence-length", "2", "-o", f("audit.json")},
       {f("audit.json")}},
      {{"typechange", "--lexicon", data + "lexicon.tsv", "--embeddings",
        data + "euclidean.txt", "--epsilons", "2,8", "--repeats", "2", "--sample-size",
        "200", "-o", f("tc.json")},
       {f("tc.json")}},
      {{"sweep", "--dataset", f("corpus.jsonl"), "--embeddings", data + "euclidean.txt",
        "--lexicon", data + "lexicon.tsv", "--model", f("lm.json"), "--mechanisms",
        "identity,euclidean,paraphrase", "--epsilons", "2,1000000", "--max-len", "12",
        "--threads", "2", "-o", f("sweep.csv")},
       {f("sweep.csv")}},
  };

  size_t compared = 0;
  for (const Job& job : jobs) {
    const std::string& name = job.args.front();
    const std::string manifest = pipeline::ManifestPath(job.args.back());
    if (Cli(job.args) != cli::kExitOk) {
      v.Check(false, name + " failed");
      continue;
    }
    std::vector<std::string> before;
    for (const std::string& o : job.outputs) before.push_back(ReadAll(o));
    const std::string manifest_before = ReadAll(manifest);
    for (const std::string& o : job.outputs) fs::remove(o);
    if (Cli({"replay", "--manifest", manifest}) != cli::kExitOk) {
      v.Check(false, name + " replay failed");
      continue;
    }
    for (size_t i = 0; i < job.outputs.size(); ++i) {
      v.Check(!before[i].empty() && ReadAll(job.outputs[i]) == before[i],
              name + " output differs on replay");
      ++compared;
    }
    v.Check(ReadAll(manifest) == manifest_before, name + " manifest differs on replay");
  }
  // The shipped data replays from its own manifest.
  {
    std::ifstream in(DataDir() + "/synthetic.manifest.json");
    std::stringstream ss;
    ss << in.rdbuf();
    auto config = pipeline::RunConfigFromJson(nlohmann::json::parse(ss.str())["config"]);
    if (!config.ok()) {
      v.Check(false, "shipped manifest unreadable");
    } else {
      config->output = f("shipped");
      std::ostringstream log;
      auto run = pipeline::Run(*config, log);
      v.Check(run.ok(), "shipped manifest run failed");
      for (const char* file : {"euclidean.txt", "poincare.txt", "lexicon.tsv",
                               "corpus.jsonl"}) {
        v.Check(ReadAll(f(std::string("shipped/") + file)) == ReadAll(data + file),
                absl::StrCat("shipped ", file, " differs"));
        ++compared;
      }
    }
  }
  fs::remove_all(tmp);
  v.Note(absl::StrFormat("%zu commands replayed, %zu files byte-identical", jobs.size(),
                         compared));
  return v;
}

}  // namespace
}  // namespace dptg::acceptance

int main() {
  using namespace dptg::acceptance;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1 exponential mechanism audit", Ac1},
      {"AC2 softmax equals exponential mechanism", Ac2},
      {"AC3 word mechanism metric bound (1-D quadrature)", Ac3},
      {"AC4 Laplace radius calibration", Ac4},
      {"AC5 budget accounting and composition", Ac5},
      {"AC6 type-change trend and self-substitution", Ac6},
      {"AC7 attacker pattern on synthetic corpus", Ac7},
      {"AC8 metric examples", Ac8},
      {"AC9 manifest replay byte identity", Ac9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    const Verdict v = run();
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << " ["
              << absl::StrFormat("%.1fs", Seconds(start)) << "] " << v.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : absl::StrCat(failed, " failed"))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
