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

#include "dptg/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dptg/noise.h"
#include "dptg/rng.h"
#include "dptg/status_macros.h"
#include "dptg/tokenizer.h"

namespace dptg {
namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                   "r", "s", "t", "v", "z", "br", "st", "tr", "pl"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
constexpr const char* kCodas[] = {"", "", "", "n", "r", "l", "s", "m"};
constexpr const char* kPunctuation[] = {".", ",", ";", ":", "!", "?", "-", "(", ")"};
constexpr uint8_t kTypeCycle[] = {kNoun, kVerb, kAdjective, kAdverb};

class WordMaker {
 public:
  explicit WordMaker(RngStream& rng) : rng_(rng) {}

  std::string Make(size_t min_syllables, size_t max_syllables) {
    while (true) {
      const size_t n = min_syllables + rng_.NextBelow(max_syllables - min_syllables + 1);
      std::string w;
      for (size_t i = 0; i < n; ++i) {
        w += kOnsets[rng_.NextBelow(std::size(kOnsets))];
        w += kVowels[rng_.NextBelow(std::size(kVowels))];
      }
      w += kCodas[rng_.NextBelow(std::size(kCodas))];
      if (used_.insert(w).second) return w;
    }
  }

 private:
  RngStream& rng_;
  absl::flat_hash_set<std::string> used_;
};

// Zipf weights 1/(r+1) over a random permutation of ranks.
std::vector<double> ZipfWeights(size_t n, RngStream& rng) {
  std::vector<size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  for (size_t i = n; i > 1; --i) std::swap(rank[i - 1], rank[rng.NextBelow(i)]);
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(rank[i] + 1);
  return w;
}

size_t Draw(const std::vector<double>& weights, RngStream& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.NextUniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.size() - 1;
}

struct Cluster {
  std::vector<size_t> words;  // indices into the Euclidean vocabulary
  uint8_t dominant_type = kNoun;
};

}  // namespace

absl::StatusOr<SyntheticWorld> GenerateSyntheticWorld(const SyntheticOptions& o) {
  if (o.dim == 0 || o.num_topics == 0 || o.words_per_topic == 0 ||
      o.sentiment_words == 0 || o.num_authors < 2 || o.num_authors > 26 || o.records_per_author < 2 ||
      o.preferred_topics == 0 || o.preferred_topics > o.num_topics ||
      o.min_tokens == 0 || o.min_tokens > o.max_tokens || !(o.spread >= 0) ||
      !(o.center_radius > 0) || !(o.poincare_scale > 0) ||
      !(o.type_purity >= 0 && o.type_purity <= 1) ||
      !(o.topic_focus >= 0 && o.topic_focus <= 1) || !(o.function_rate >= 0) ||
      !(o.sentiment_rate >= 0) || !(o.punctuation_rate >= 0) ||
      !(o.function_rate + o.sentiment_rate + o.punctuation_rate <= 1)) {
    return absl::InvalidArgumentError("invalid synthetic world options");
  }
  RngStream rng(o.seed, /*stream_id=*/1);
  WordMaker maker(rng);

  std::vector<std::string> words;
  std::vector<double> vectors;
  TypeLexicon lexicon;
  auto add_cluster = [&](size_t count, size_t min_syl, size_t max_syl,
                         double radius) -> Cluster {
    Cluster c;
    std::vector<double> center = SampleUnitDirection(o.dim, rng);
    for (double& x : center) x *= radius;
    for (size_t i = 0; i < count; ++i) {
      c.words.push_back(words.size());
      words.push_back(maker.Make(min_syl, max_syl));
      for (size_t d = 0; d < o.dim; ++d) {
        vectors.push_back(center[d] + o.spread * rng.NextGaussian());
      }
    }
    return c;
  };
  auto assign_types = [&](const Cluster& c) -> absl::Status {
    for (size_t w : c.words) {
      uint8_t types = c.dominant_type;
      if (rng.NextUniform() >= o.type_purity) {
        const uint8_t other = kTypeCycle[rng.NextBelow(std::size(kTypeCycle))];
        // Half of the impure words add a second type, half swap it.
        types = rng.NextBelow(2) == 0 ? (types | other) : other;
      }
      DPTG_RETURN_IF_ERROR(lexicon.Add(words[w], types));
    }
    return absl::OkStatus();
  };

  Cluster function = add_cluster(o.function_words, 1, 1, o.center_radius * 0.5);
  std::vector<Cluster> topics;
  for (size_t t = 0; t < o.num_topics; ++t) {
    topics.push_back(add_cluster(o.words_per_topic, 2, 3, o.center_radius));
    topics.back().dominant_type = kTypeCycle[t % std::size(kTypeCycle)];
  }
  std::vector<Cluster> sentiment;
  for (int s = 0; s < 2; ++s) {
    sentiment.push_back(add_cluster(o.sentiment_words, 2, 3, o.center_radius));
    sentiment.back().dominant_type = kAdjective;
  }
  for (const Cluster& c : topics) DPTG_RETURN_IF_ERROR(assign_types(c));
  for (const Cluster& c : sentiment) DPTG_RETURN_IF_ERROR(assign_types(c));

  std::vector<std::string> hyper_words;
  std::vector<double> hyper_vectors;
  for (size_t i = function.words.size(); i < words.size(); ++i) {
    std::span<const double> v(vectors.data() + i * o.dim, o.dim);
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    const double scale =
        norm > 0 ? std::min(std::tanh(norm / o.poincare_scale), kPoincareMaxNorm) / norm
                 : 0.0;
    hyper_words.push_back(words[i]);
    for (double x : v) hyper_vectors.push_back(x * scale);
  }

  DPTG_ASSIGN_OR_RETURN(EmbeddingStore euclidean,
                        EmbeddingStore::Create(words, vectors, o.dim, Geometry::kEuclidean));
  DPTG_ASSIGN_OR_RETURN(EmbeddingStore poincare,
                        EmbeddingStore::Create(hyper_words, hyper_vectors, o.dim,
                                               Geometry::kPoincareBall));
  SyntheticWorld world{std::move(euclidean), std::move(poincare), std::move(lexicon), {}};

  // Shared function-word and sentiment distributions.
  const std::vector<double> function_weights = ZipfWeights(function.words.size(), rng);
  std::vector<std::vector<double>> sentiment_weights;
  for (const Cluster& c : sentiment) sentiment_weights.push_back(ZipfWeights(c.words.size(), rng));

  struct Author {
    std::string name;
    std::vector<double> topic_weights;
    std::vector<std::vector<double>> word_weights;  // per topic
    std::vector<double> punctuation_weights;
  };
  std::vector<Author> authors;
  for (size_t a = 0; a < o.num_authors; ++a) {
    Author au;
    au.name = absl::StrCat("author_", std::string(1, static_cast<char>('a' + a)));
    au.topic_weights.assign(o.num_topics,
                           (1.0 - o.topic_focus) / static_cast<double>(o.num_topics));
    std::vector<size_t> order(o.num_topics);
    std::iota(order.begin(), order.end(), 0);
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.NextBelow(i)]);
    for (size_t k = 0; k < o.preferred_topics; ++k) {
      au.topic_weights[order[k]] += o.topic_focus / static_cast<double>(o.preferred_topics);
    }
    for (const Cluster& c : topics) au.word_weights.push_back(ZipfWeights(c.words.size(), rng));
    au.punctuation_weights = ZipfWeights(std::size(kPunctuation), rng);
    authors.push_back(std::move(au));
  }

  size_t next_id = 0;
  for (size_t r = 0; r < o.records_per_author; ++r) {
    for (const Author& au : authors) {
      const int polarity = static_cast<int>(r % 2);
      const size_t length = o.min_tokens + rng.NextBelow(o.max_tokens - o.min_tokens + 1);
      std::vector<std::string> tokens;
      for (size_t i = 0; i < length; ++i) {
        const double u = rng.NextUniform();
        if (u < o.function_rate) {
          tokens.push_back(words[function.words[Draw(function_weights, rng)]]);
        } else if (u < o.function_rate + o.sentiment_rate) {
          const Cluster& c = sentiment[polarity];
          tokens.push_back(words[c.words[Draw(sentiment_weights[polarity], rng)]]);
        } else if (u < o.function_rate + o.sentiment_rate + o.punctuation_rate) {
          tokens.emplace_back(kPunctuation[Draw(au.punctuation_weights, rng)]);
        } else {
          const size_t t = Draw(au.topic_weights, rng);
          tokens.push_back(words[topics[t].words[Draw(au.word_weights[t], rng)]]);
        }
      }
      Record rec;
      rec.id = absl::StrCat("r", next_id++);
      rec.author = au.name;
      rec.sentiment = polarity == 1 ? "1" : "0";
      rec.sentiment_is_integer = true;
      rec.text = Detokenize(tokens);
      world.corpus.push_back(std::move(rec));
    }
  }
  return world;
}

}  // namespace dptg
