// src/gctc/metrics.h
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

#ifndef GCTC_METRICS_H_
#define GCTC_METRICS_H_

#include <string>
#include <vector>

#include "gctc/dict.h"
#include "gctc/label.h"

namespace gctc {

struct EditCounts {
  int distance = 0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
};

// Minimal edit distance with a deterministic S/I/D breakdown (traceback
// prefers match/substitution, then deletion, then insertion).
EditCounts LevenshteinAlign(const std::vector<std::string>& ref,
                            const std::vector<std::string>& hyp);

struct PerResult {
  double per = 0.0;
  int ref_length = 0;  // reference phoneme count
  EditCounts counts;
};

// Edit distance on the phoneme subsequences, divided by the reference
// phoneme count. Throws EmptyReferenceError if the reference has no
// phonemes.
PerResult PhonemeErrorRate(const MixedLabelSequence& ref,
                           const MixedLabelSequence& hyp);

struct ProsodyScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

// Aligns the full mixed sequences by minimum edit distance (ties prefer
// matches); a hyp prosody token is a true positive iff it is aligned to an
// identical ref prosody token.
ProsodyScore ProsodyF1(const MixedLabelSequence& ref,
                       const MixedLabelSequence& hyp);

// True iff hyp's phoneme subsequence equals any candidate exactly.
bool G2pMatch(const std::vector<std::vector<std::string>>& candidates,
              const MixedLabelSequence& hyp);

// Full-lattice match of hyp's phonemes against the grapheme sequence;
// false when the grapheme has no dictionary cover.
bool G2pMatchViaDictionary(const GraphemeSequence& grapheme,
                           const G2pDictionary& dict,
                           const MixedLabelSequence& hyp,
                           int max_key_len = 4);

struct EvalReport {
  double per = 0.0;
  double prosody_precision = 0.0;
  double prosody_recall = 0.0;
  double prosody_f1 = 0.0;
  double g2p_match_rate = 0.0;
  bool has_match_rate = false;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_phonemes = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int matched = 0;
  int total = 0;
};

// Micro-averaging accumulator: pools counts across utterances.
class EvalAccumulator {
 public:
  // `matched` < 0 means no match information for this utterance.
  void Add(const PerResult& per, const ProsodyScore& prosody, int matched);
  EvalReport Report() const;

 private:
  EvalReport pooled_;
  bool any_match_info_ = false;
};

}  // namespace gctc

#endif  // GCTC_METRICS_H_
