// src/gctc/simulate.h
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

#ifndef GCTC_SIMULATE_H_
#define GCTC_SIMULATE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gctc/decode.h"
#include "gctc/label.h"

namespace gctc {

struct SimConfig {
  // Each truth token occupies a uniform 1..frames_per_token frames.
  int frames_per_token = 3;
  // Probability of a separating blank frame between distinct consecutive
  // tokens; equal consecutive tokens always get one.
  double blank_insert_prob = 0.3;
  // Per-frame probability that the frame's top mass moves to a confusion
  // partner of the truth token.
  double confusion_eps = 0.0;
  // Directed (token, partner) pairs; a token with no partners confuses
  // uniformly over all other non-blank tokens.
  std::vector<std::pair<std::string, std::string>> confusion_pairs;
  uint64_t rng_seed = 0;
  // Confusions are phoneme-only unless enabled for prosody rows too.
  bool prosody_noise = false;
};

// Synthesizes a normalized emission matrix from a ground-truth sequence.
// Deterministic given (truth, vocab, config): the same seed yields
// byte-identical matrices. With confusion_eps = 0 the greedy decode of the
// result reproduces `truth` exactly.
EmissionMatrix Synthesize(const MixedLabelSequence& truth,
                          std::shared_ptr<const Vocabulary> vocab,
                          const SimConfig& config);

}  // namespace gctc

#endif  // GCTC_SIMULATE_H_
