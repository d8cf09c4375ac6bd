// src/gctc/simulate.cc
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

#include "gctc/simulate.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "gctc/rng.h"

namespace gctc {

namespace {

constexpr double kFloor = 1e-9;    // keeps every row strictly positive
constexpr double kWinnerMass = 0.62;
constexpr double kTruthMass = 0.28;  // runner-up mass kept on the truth
constexpr double kSpreadMass = 0.10;

void ValidateConfig(const SimConfig& config) {
  if (config.frames_per_token < 1 || config.frames_per_token > 3) {
    throw ConfigError("frames_per_token must be in [1, 3]");
  }
  if (config.blank_insert_prob < 0.0 || config.blank_insert_prob > 1.0) {
    throw ConfigError("blank_insert_prob must be in [0, 1]");
  }
  if (config.confusion_eps < 0.0 || config.confusion_eps > 1.0) {
    throw ConfigError("confusion_eps must be in [0, 1]");
  }
}

}  // namespace

EmissionMatrix Synthesize(const MixedLabelSequence& truth,
                          std::shared_ptr<const Vocabulary> vocab,
                          const SimConfig& config) {
  ValidateConfig(config);
  const Vocabulary& v = *vocab;
  const int vocab_size = v.size();
  const int blank = v.blank_id();

  std::map<int, std::vector<int>> partners;
  for (const auto& [token, partner] : config.confusion_pairs) {
    int token_id = v.IdOrThrow(token);
    int partner_id = v.IdOrThrow(partner);
    if (token_id == blank || partner_id == blank) {
      throw ConfigError("confusion pairs must not involve the blank token");
    }
    partners[token_id].push_back(partner_id);
  }

  std::vector<int> truth_ids(truth.size());
  for (int i = 0; i < truth.size(); ++i) {
    truth_ids[i] = v.IdOrThrow(truth.token(i).surface);
  }

  std::vector<int> non_blank;
  non_blank.reserve(vocab_size - 1);
  for (int id = 0; id < vocab_size; ++id) {
    if (id != blank) non_blank.push_back(id);
  }

  Rng rng(config.rng_seed);
  std::vector<float> rows;
  int num_frames = 0;
  std::vector<double> weights(vocab_size);

  auto append_row = [&]() {
    double total = 0.0;
    for (double w : weights) total += w;
    rows.reserve(rows.size() + vocab_size);
    for (double w : weights) {
      rows.push_back(static_cast<float>(std::log(w / total)));
    }
    ++num_frames;
  };

  auto blank_row = [&]() {
    std::fill(weights.begin(), weights.end(), kFloor);
    weights[blank] += 1.0;
    append_row();
  };

  // Clean prosody frames keep their runner-up mass on blank, mirroring the
  // silence that surrounds boundary labels: deleting the prosody mass then
  // turns these frames into blank-top frames.
  auto prosody_row = [&](int truth_id) {
    std::fill(weights.begin(), weights.end(), kFloor);
    weights[truth_id] += kWinnerMass + kTruthMass;
    weights[blank] += kSpreadMass;
    append_row();
  };

  // Picks uniformly among non-blank tokens other than `exclude`.
  auto uniform_other = [&](int exclude) -> int {
    int n = static_cast<int>(non_blank.size());
    if (n <= 1) return exclude;
    auto it = std::lower_bound(non_blank.begin(), non_blank.end(), exclude);
    int exclude_pos = static_cast<int>(it - non_blank.begin());
    int j = rng.UniformInt(0, n - 2);
    if (j >= exclude_pos) ++j;
    return non_blank[j];
  };

  auto token_row = [&](int winner_id, int truth_id,
                       const std::vector<int>* confusable) {
    std::fill(weights.begin(), weights.end(), kFloor);
    weights[winner_id] += kWinnerMass;
    weights[truth_id] += kTruthMass;
    if (confusable != nullptr && !confusable->empty()) {
      for (int id : *confusable) {
        weights[id] += kSpreadMass / confusable->size();
      }
    } else if (non_blank.size() > 1) {
      for (int id : non_blank) {
        if (id != truth_id) {
          weights[id] += kSpreadMass / (non_blank.size() - 1);
        }
      }
    } else {
      weights[truth_id] += kSpreadMass;
    }
    append_row();
  };

  for (int i = 0; i < truth.size(); ++i) {
    int truth_id = truth_ids[i];
    const Token& token = truth.token(i);
    auto partner_it = partners.find(truth_id);
    const std::vector<int>* confusable =
        partner_it == partners.end() ? nullptr : &partner_it->second;
    bool eligible =
        token.kind == TokenKind::kPhoneme || config.prosody_noise;

    int frames = rng.UniformInt(1, config.frames_per_token);
    for (int f = 0; f < frames; ++f) {
      int winner = truth_id;
      if (eligible && rng.Bernoulli(config.confusion_eps)) {
        if (confusable != nullptr && !confusable->empty()) {
          winner = (*confusable)[rng.UniformInt(
              0, static_cast<int>(confusable->size()) - 1)];
        } else {
          winner = uniform_other(truth_id);
        }
      }
      if (token.kind == TokenKind::kProsody && winner == truth_id) {
        prosody_row(truth_id);
      } else {
        token_row(winner, truth_id, confusable);
      }
    }
    if (i + 1 < truth.size()) {
      if (truth.token(i + 1) == token) {
        blank_row();  // equal consecutive tokens always get a separator
      } else if (rng.Bernoulli(config.blank_insert_prob)) {
        blank_row();
      }
    }
  }

  return EmissionMatrix(std::move(vocab), num_frames, std::move(rows));
}

}  // namespace gctc
