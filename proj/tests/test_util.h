// tests/test_util.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Test-only oracles and generators. Everything here is independent of the
// implementation paths it checks: feasibility comes from explicit language
// enumeration, edit distance from a plain quadratic DP, EM from explicit
// segmentation enumeration, and the constrained-decode reference replays
// the search policy over the enumerated language.

#ifndef GCTC_TESTS_TEST_UTIL_H_
#define GCTC_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gctc/align.h"
#include "gctc/decode.h"
#include "gctc/dict.h"
#include "gctc/label.h"
#include "gctc/rng.h"
#include "gctc/simulate.h"

namespace gctc {
namespace testutil {

inline std::shared_ptr<const Vocabulary> VocabOf(
    const std::vector<std::string>& surfaces) {
  return std::make_shared<const Vocabulary>(Vocabulary::FromSurfaces(surfaces));
}

inline MixedLabelSequence Seq(const Vocabulary& vocab,
                              const std::string& text) {
  return MixedLabelSequence::Parse(text, vocab);
}

// Builds a normalized emission matrix from per-frame logits.
inline EmissionMatrix MatrixFromLogits(
    std::shared_ptr<const Vocabulary> vocab,
    const std::vector<std::vector<double>>& logits) {
  std::vector<float> rows;
  for (const std::vector<double>& frame : logits) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double x : frame) max_logit = std::max(max_logit, x);
    double sum = 0.0;
    for (double x : frame) sum += std::exp(x - max_logit);
    double log_z = max_logit + std::log(sum);
    for (double x : frame) rows.push_back(static_cast<float>(x - log_z));
  }
  return EmissionMatrix(std::move(vocab),
                        static_cast<int>(logits.size()), std::move(rows));
}

// One frame per entry of `winners`; the named surface gets the top logit.
// Extra (surface, logit) pairs per frame can shape the ranking.
inline EmissionMatrix MatrixFavoring(
    std::shared_ptr<const Vocabulary> vocab,
    const std::vector<std::vector<std::pair<std::string, double>>>& frames) {
  std::vector<std::vector<double>> logits;
  for (const auto& frame : frames) {
    std::vector<double> row(vocab->size(), 0.0);
    for (const auto& [surface, logit] : frame) {
      row[vocab->IdOrThrow(surface)] = logit;
    }
    logits.push_back(std::move(row));
  }
  return MatrixFromLogits(std::move(vocab), logits);
}

// ---------------------------------------------------------------------------
// Expansion-language enumeration (oracle for lattice and decode checks).

using Language = std::set<std::vector<std::string>>;

inline void EnumerateLanguageFrom(const GraphemeSequence& grapheme,
                                  const G2pDictionary& dict, int max_key_len,
                                  int pos,
                                  std::vector<std::optional<Language>>* memo) {
  if ((*memo)[pos].has_value()) return;
  Language result;
  if (pos == grapheme.size()) {
    result.insert(std::vector<std::string>{});
  } else {
    for (int span = 1; span <= std::min(max_key_len, grapheme.size() - pos);
         ++span) {
      std::string key = grapheme.Substring(pos, span);
      const ExpansionSet& expansions = dict.Lookup(key);
      if (expansions.empty()) continue;
      EnumerateLanguageFrom(grapheme, dict, max_key_len, pos + span, memo);
      for (const Expansion& expansion : expansions) {
        for (const std::vector<std::string>& tail : *(*memo)[pos + span]) {
          std::vector<std::string> full = expansion;
          full.insert(full.end(), tail.begin(), tail.end());
          result.insert(std::move(full));
        }
      }
    }
  }
  (*memo)[pos] = std::move(result);
}

// All phoneme sequences that spell out the whole grapheme sequence as a
// concatenation of dictionary-key expansions.
inline Language EnumerateLanguage(const GraphemeSequence& grapheme,
                                  const G2pDictionary& dict,
                                  int max_key_len = 4) {
  std::vector<std::optional<Language>> memo(grapheme.size() + 1);
  EnumerateLanguageFrom(grapheme, dict, max_key_len, 0, &memo);
  return *memo[0];
}

inline bool IsPrefix(const std::vector<std::string>& prefix,
                     const std::vector<std::string>& full) {
  if (prefix.size() > full.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), full.begin());
}

inline bool FeasiblePrefix(const Language& language,
                           const std::vector<std::string>& prefix) {
  for (const auto& member : language) {
    if (IsPrefix(prefix, member)) return true;
  }
  return false;
}

constexpr int kOracleInfinity = std::numeric_limits<int>::max();

inline int MinCompletion(const Language& language,
                         const std::vector<std::string>& prefix) {
  int best = kOracleInfinity;
  for (const auto& member : language) {
    if (IsPrefix(prefix, member)) {
      best = std::min(best,
                      static_cast<int>(member.size() - prefix.size()));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Quadratic edit-distance oracle (distance only).

inline int EditDistanceOracle(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::vector<std::vector<int>> d(a.size() + 1,
                                  std::vector<int>(b.size() + 1, 0));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
                          d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  return d[a.size()][b.size()];
}

// ---------------------------------------------------------------------------
// Enumeration-based EM oracle.

using SegmentationChunks = std::vector<std::pair<std::string, std::string>>;

inline void EnumerateSegmentationsFrom(const GraphemeSequence& units,
                                       const std::vector<std::string>& phonemes,
                                       int max_g, int max_p, int i, int j,
                                       SegmentationChunks* current,
                                       std::vector<SegmentationChunks>* out) {
  if (i == units.size() &&
      j == static_cast<int>(phonemes.size())) {
    out->push_back(*current);
    return;
  }
  for (int a = 1; a <= std::min(max_g, units.size() - i); ++a) {
    for (int b = 1;
         b <= std::min(max_p, static_cast<int>(phonemes.size()) - j); ++b) {
      std::vector<std::string> p_chunk(phonemes.begin() + j,
                                       phonemes.begin() + j + b);
      current->emplace_back(units.Substring(i, a), JoinTokens(p_chunk));
      EnumerateSegmentationsFrom(units, phonemes, max_g, max_p, i + a, j + b,
                                 current, out);
      current->pop_back();
    }
  }
}

inline std::vector<SegmentationChunks> EnumerateSegmentations(
    const TrainingPair& pair, int max_g, int max_p) {
  GraphemeSequence units = GraphemeSequence::FromUtf8(pair.grapheme);
  std::vector<SegmentationChunks> out;
  SegmentationChunks current;
  EnumerateSegmentationsFrom(units, pair.phonemes, max_g, max_p, 0, 0,
                             &current, &out);
  return out;
}

struct BruteEmResult {
  std::vector<double> log_likelihood;
  std::map<std::pair<std::string, std::string>, double> probs;
};

// EM by explicit enumeration of every segmentation of every pair.
inline BruteEmResult BruteForceEm(const std::vector<TrainingPair>& pairs,
                                  const EmTrainOptions& options, int iters) {
  auto chunk_units = [](const std::string& g) {
    return GraphemeSequence::FromUtf8(g).size();
  };
  auto chunk_tokens = [](const std::string& p) {
    return static_cast<int>(SplitWhitespace(p).size());
  };
  std::vector<std::vector<SegmentationChunks>> all_segmentations;
  std::set<std::pair<std::string, std::string>> support;
  for (const TrainingPair& pair : pairs) {
    auto segmentations =
        EnumerateSegmentations(pair, options.max_g, options.max_p);
    for (const auto& segmentation : segmentations) {
      for (const auto& chunk : segmentation) support.insert(chunk);
    }
    if (!segmentations.empty()) {
      all_segmentations.push_back(std::move(segmentations));
    }
  }
  BruteEmResult result;
  for (const auto& chunk : support) {
    result.probs[chunk] = 1.0 / static_cast<double>(support.size());
  }
  for (int iter = 0; iter < iters; ++iter) {
    double log_likelihood = 0.0;
    std::map<std::pair<std::string, std::string>, double> counts;
    for (const auto& segmentations : all_segmentations) {
      std::vector<double> weight(segmentations.size());
      double z = 0.0;
      for (size_t s = 0; s < segmentations.size(); ++s) {
        double w = 1.0;
        for (const auto& chunk : segmentations[s]) {
          double area = static_cast<double>(chunk_units(chunk.first)) *
                        chunk_tokens(chunk.second);
          w *= result.probs[chunk] *
               std::exp(-options.length_penalty * (area - 1.0));
        }
        weight[s] = w;
        z += w;
      }
      log_likelihood += std::log(z);
      for (size_t s = 0; s < segmentations.size(); ++s) {
        for (const auto& chunk : segmentations[s]) {
          counts[chunk] += weight[s] / z;
        }
      }
    }
    result.log_likelihood.push_back(log_likelihood);
    double total = 0.0;
    for (const auto& [chunk, count] : counts) total += count;
    result.probs.clear();
    for (const auto& [chunk, count] : counts) {
      if (count > 0.0) result.probs[chunk] = count / total;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Independent replay of the constrained-decode policy. Feasibility, minimum
// completion, and full-match checks all come from the enumerated language.

struct ReplayResult {
  std::string sequence;
  double score = 0.0;
  std::string status;
  int backtracks = 0;
};

inline ReplayResult ReplayConstrained(const EmissionMatrix& em,
                                      const Language& language,
                                      const DecodeConfig& config) {
  const Vocabulary& vocab = em.vocab();
  const int blank = vocab.blank_id();
  const int num_frames = em.num_frames();
  std::vector<int> top(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    int best = 0;
    for (int id = 1; id < vocab.size(); ++id) {
      if (em.at(t, id) > em.at(t, best)) best = id;
    }
    top[t] = best;
  }
  std::vector<int> retained;
  for (int t = 0; t < num_frames; ++t) {
    if (top[t] != blank) retained.push_back(t);
  }
  const int num_steps = static_cast<int>(retained.size());

  int backtracks = 0;
  auto greedy_fallback = [&]() {
    ReplayResult fallback;
    fallback.status = "FallbackUnconstrained";
    fallback.backtracks = backtracks;
    std::vector<std::string> out;
    int prev = -1;
    for (int t = 0; t < num_frames; ++t) {
      fallback.score += em.at(t, top[t]);
      if (top[t] != prev && top[t] != blank) {
        out.push_back(vocab.token(top[t]).surface);
      }
      prev = top[t];
    }
    fallback.sequence = JoinTokens(out);
    return fallback;
  };

  std::vector<int> chosen(num_steps, -1);
  std::vector<char> emitted(num_steps, 0);
  std::vector<int> skip(num_steps, 0);
  std::vector<std::vector<std::string>> prefixes(num_steps + 1);

  auto ranked = [&](int step) {
    std::vector<int> order;
    for (int id = 0; id < vocab.size(); ++id) {
      if (id != blank) order.push_back(id);
    }
    int frame = retained[step];
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (em.at(frame, a) != em.at(frame, b)) {
        return em.at(frame, a) > em.at(frame, b);
      }
      return a < b;
    });
    return order;
  };

  auto admissible = [&](int step, int id,
                        std::vector<std::string>* next_prefix,
                        bool* emits) -> bool {
    bool collapses = step > 0 && id == chosen[step - 1] &&
                     retained[step] == retained[step - 1] + 1;
    if (collapses) {
      *next_prefix = prefixes[step];
      *emits = false;
      return true;
    }
    const Token& token = vocab.token(id);
    if (token.kind == TokenKind::kProsody) {
      *next_prefix = prefixes[step];
      *emits = true;
      return true;
    }
    std::vector<std::string> extended = prefixes[step];
    extended.push_back(token.surface);
    if (!FeasiblePrefix(language, extended)) return false;
    if (MinCompletion(language, extended) > num_steps - 1 - step) return false;
    *next_prefix = std::move(extended);
    *emits = true;
    return true;
  };

  int step = 0;
  while (true) {
    if (step == num_steps) {
      if (language.count(prefixes[num_steps]) != 0) break;
    } else if (skip[step] < config.beam_width) {
      int picked = -1;
      std::vector<std::string> next_prefix;
      bool emits = false;
      int seen = 0;
      for (int id : ranked(step)) {
        if (!admissible(step, id, &next_prefix, &emits)) continue;
        if (seen == skip[step]) {
          picked = id;
          break;
        }
        ++seen;
      }
      if (picked >= 0) {
        chosen[step] = picked;
        emitted[step] = emits;
        prefixes[step + 1] = next_prefix;
        ++step;
        continue;
      }
    }
    if (config.strict_greedy || backtracks >= config.max_backtracks ||
        step == 0) {
      return greedy_fallback();
    }
    ++backtracks;
    --step;
    skip[step] += 1;
    for (int later = step + 1; later < num_steps; ++later) skip[later] = 0;
  }

  ReplayResult result;
  result.status = "Matched";
  result.backtracks = backtracks;
  std::vector<std::string> out;
  for (int s = 0; s < num_steps; ++s) {
    if (emitted[s]) out.push_back(vocab.token(chosen[s]).surface);
  }
  result.sequence = JoinTokens(out);
  int next_retained = 0;
  for (int t = 0; t < num_frames; ++t) {
    if (next_retained < num_steps && retained[next_retained] == t) {
      result.score += em.at(t, chosen[next_retained]);
      ++next_retained;
    } else {
      result.score += em.at(t, blank);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Randomized instance family: graphemes of at most 4 units over {A,B,C,D},
// at most 5 keys with at most 3 expansions of at most 4 tokens, V <= 8,
// N <= 12.

struct RandomInstance {
  std::shared_ptr<const Vocabulary> vocab;
  G2pDictionary dict;
  GraphemeSequence grapheme;
  Language language;  // may be empty (NoCover)
};

inline std::shared_ptr<const Vocabulary> InstanceVocab() {
  static std::shared_ptr<const Vocabulary> vocab =
      VocabOf({"<blank>", "p1", "p2", "p3", "p4", "p5", "["});
  return vocab;
}

inline RandomInstance MakeRandomInstance(Rng& rng) {
  RandomInstance instance;
  instance.vocab = InstanceVocab();
  const std::vector<std::string> units = {"A", "B", "C", "D"};
  const std::vector<std::string> phonemes = {"p1", "p2", "p3", "p4", "p5"};

  int num_keys = rng.UniformInt(1, 5);
  for (int k = 0; k < num_keys; ++k) {
    int key_len = rng.UniformInt(1, 2);
    std::string key;
    for (int u = 0; u < key_len; ++u) {
      key += units[rng.UniformInt(0, static_cast<int>(units.size()) - 1)];
    }
    int num_expansions = rng.UniformInt(1, 3);
    for (int e = 0; e < num_expansions; ++e) {
      Expansion expansion;
      int len = rng.UniformInt(1, 4);
      for (int p = 0; p < len; ++p) {
        expansion.push_back(
            phonemes[rng.UniformInt(0, static_cast<int>(phonemes.size()) - 1)]);
      }
      instance.dict.Add(key, std::move(expansion));
    }
  }

  int grapheme_len = rng.UniformInt(0, 20) == 0 ? 0 : rng.UniformInt(1, 4);
  std::vector<std::string> grapheme_units;
  for (int u = 0; u < grapheme_len; ++u) {
    grapheme_units.push_back(
        units[rng.UniformInt(0, static_cast<int>(units.size()) - 1)]);
  }
  instance.grapheme = GraphemeSequence(std::move(grapheme_units));
  instance.language = EnumerateLanguage(instance.grapheme, instance.dict, 4);
  return instance;
}

// Random normalized emission over the instance vocabulary, N <= 12.
inline EmissionMatrix RandomEmission(Rng& rng,
                                     std::shared_ptr<const Vocabulary> vocab,
                                     int max_frames = 12) {
  int num_frames = rng.UniformInt(0, max_frames);
  std::vector<std::vector<double>> logits(num_frames);
  for (auto& row : logits) {
    row.resize(vocab->size());
    for (double& x : row) x = 5.0 * rng.NextDouble();
  }
  return MatrixFromLogits(std::move(vocab), logits);
}

// Truth-driven emission: a random language member with sprinkled prosody,
// synthesized with consonant-style confusion noise. Returns nullopt when
// the language is empty or no draw fits within `max_frames`.
inline std::optional<EmissionMatrix> TruthEmission(
    Rng& rng, const RandomInstance& instance, double eps, int max_frames = 12,
    MixedLabelSequence* truth_out = nullptr) {
  if (instance.language.empty()) return std::nullopt;
  std::vector<std::vector<std::string>> members(instance.language.begin(),
                                                instance.language.end());
  for (int attempt = 0; attempt < 20; ++attempt) {
    const auto& member =
        members[rng.UniformInt(0, static_cast<int>(members.size()) - 1)];
    if (static_cast<int>(member.size()) > 8) continue;
    std::vector<Token> tokens;
    for (const std::string& phoneme : member) {
      if (rng.Bernoulli(0.15)) tokens.push_back(MakeProsody("["));
      tokens.push_back(MakePhoneme(phoneme));
    }
    MixedLabelSequence truth(std::move(tokens));
    SimConfig config;
    config.frames_per_token = 1;
    config.blank_insert_prob = 0.2;
    config.confusion_eps = eps;
    config.rng_seed = rng.NextU64();
    EmissionMatrix em = Synthesize(truth, instance.vocab, config);
    if (em.num_frames() <= max_frames) {
      if (truth_out != nullptr) *truth_out = truth;
      return em;
    }
  }
  return std::nullopt;
}

}  // namespace testutil
}  // namespace gctc

#endif  // GCTC_TESTS_TEST_UTIL_H_
