// src/gctc/metrics.cc
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

#include "gctc/metrics.h"

#include <algorithm>

#include "gctc/lattice.h"

namespace gctc {

EditCounts LevenshteinAlign(const std::vector<std::string>& ref,
                            const std::vector<std::string>& hyp) {
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());
  const int cols = m + 1;
  std::vector<int> dist(static_cast<size_t>(n + 1) * cols);
  for (int j = 0; j <= m; ++j) dist[j] = j;
  for (int i = 1; i <= n; ++i) {
    dist[i * cols] = i;
    for (int j = 1; j <= m; ++j) {
      int diag = dist[(i - 1) * cols + (j - 1)] + (ref[i - 1] != hyp[j - 1]);
      int del = dist[(i - 1) * cols + j] + 1;
      int ins = dist[i * cols + (j - 1)] + 1;
      dist[i * cols + j] = std::min({diag, del, ins});
    }
  }
  EditCounts counts;
  counts.distance = dist[n * cols + m];
  // Deterministic traceback: diagonal first, then deletion, then insertion.
  int i = n, j = m;
  while (i > 0 || j > 0) {
    int here = dist[i * cols + j];
    if (i > 0 && j > 0 &&
        here == dist[(i - 1) * cols + (j - 1)] + (ref[i - 1] != hyp[j - 1])) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (i > 0 && here == dist[(i - 1) * cols + j] + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

PerResult PhonemeErrorRate(const MixedLabelSequence& ref,
                           const MixedLabelSequence& hyp) {
  std::vector<std::string> ref_ph = ref.PhonemeSurfaces();
  std::vector<std::string> hyp_ph = hyp.PhonemeSurfaces();
  if (ref_ph.empty()) {
    throw EmptyReferenceError("reference has no phoneme tokens");
  }
  PerResult result;
  result.ref_length = static_cast<int>(ref_ph.size());
  result.counts = LevenshteinAlign(ref_ph, hyp_ph);
  result.per = static_cast<double>(result.counts.distance) /
               static_cast<double>(result.ref_length);
  return result;
}

ProsodyScore ProsodyF1(const MixedLabelSequence& ref,
                       const MixedLabelSequence& hyp) {
  const std::vector<Token>& r = ref.tokens();
  const std::vector<Token>& h = hyp.tokens();
  const int n = static_cast<int>(r.size());
  const int m = static_cast<int>(h.size());
  const int cols = m + 1;
  // Cost pairs (distance, -matches): minimum distance first, then the
  // alignment with the most matched token pairs.
  std::vector<int> dist(static_cast<size_t>(n + 1) * cols);
  std::vector<int> matches(dist.size());
  for (int j = 0; j <= m; ++j) {
    dist[j] = j;
    matches[j] = 0;
  }
  for (int i = 1; i <= n; ++i) {
    dist[i * cols] = i;
    matches[i * cols] = 0;
    for (int j = 1; j <= m; ++j) {
      bool equal = r[i - 1] == h[j - 1];
      int best_dist = dist[(i - 1) * cols + (j - 1)] + (equal ? 0 : 1);
      int best_matches = matches[(i - 1) * cols + (j - 1)] + (equal ? 1 : 0);
      int del_dist = dist[(i - 1) * cols + j] + 1;
      int del_matches = matches[(i - 1) * cols + j];
      if (del_dist < best_dist ||
          (del_dist == best_dist && del_matches > best_matches)) {
        best_dist = del_dist;
        best_matches = del_matches;
      }
      int ins_dist = dist[i * cols + (j - 1)] + 1;
      int ins_matches = matches[i * cols + (j - 1)];
      if (ins_dist < best_dist ||
          (ins_dist == best_dist && ins_matches > best_matches)) {
        best_dist = ins_dist;
        best_matches = ins_matches;
      }
      dist[i * cols + j] = best_dist;
      matches[i * cols + j] = best_matches;
    }
  }

  ProsodyScore score;
  // Traceback along the optimal (distance, matches) path; diagonal first.
  int i = n, j = m;
  while (i > 0 || j > 0) {
    int here_dist = dist[i * cols + j];
    int here_matches = matches[i * cols + j];
    if (i > 0 && j > 0) {
      bool equal = r[i - 1] == h[j - 1];
      if (here_dist == dist[(i - 1) * cols + (j - 1)] + (equal ? 0 : 1) &&
          here_matches ==
              matches[(i - 1) * cols + (j - 1)] + (equal ? 1 : 0)) {
        if (equal && r[i - 1].kind == TokenKind::kProsody) ++score.tp;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here_dist == dist[(i - 1) * cols + j] + 1 &&
        here_matches == matches[(i - 1) * cols + j]) {
      --i;
      continue;
    }
    --j;
  }

  int ref_prosody = static_cast<int>(ref.ProsodySubsequence().size());
  int hyp_prosody = static_cast<int>(hyp.ProsodySubsequence().size());
  score.fp = hyp_prosody - score.tp;
  score.fn = ref_prosody - score.tp;
  score.precision =
      hyp_prosody > 0 ? static_cast<double>(score.tp) / hyp_prosody : 0.0;
  score.recall =
      ref_prosody > 0 ? static_cast<double>(score.tp) / ref_prosody : 0.0;
  double pr = score.precision + score.recall;
  score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
  return score;
}

bool G2pMatch(const std::vector<std::vector<std::string>>& candidates,
              const MixedLabelSequence& hyp) {
  std::vector<std::string> phonemes = hyp.PhonemeSurfaces();
  for (const std::vector<std::string>& candidate : candidates) {
    if (candidate == phonemes) return true;
  }
  return false;
}

bool G2pMatchViaDictionary(const GraphemeSequence& grapheme,
                           const G2pDictionary& dict,
                           const MixedLabelSequence& hyp, int max_key_len) {
  std::vector<std::string> phonemes = hyp.PhonemeSurfaces();
  try {
    GraphemeLattice lattice(grapheme, dict, max_key_len);
    MatchCursor cursor = lattice.StartCursor();
    for (const std::string& surface : phonemes) {
      cursor = cursor.AdvanceSurface(surface);
      if (!cursor.Feasible()) return false;
    }
    return cursor.IsFullMatch();
  } catch (const NoCoverError&) {
    return false;
  }
}

void EvalAccumulator::Add(const PerResult& per, const ProsodyScore& prosody,
                          int matched) {
  pooled_.substitutions += per.counts.substitutions;
  pooled_.insertions += per.counts.insertions;
  pooled_.deletions += per.counts.deletions;
  pooled_.ref_phonemes += per.ref_length;
  pooled_.tp += prosody.tp;
  pooled_.fp += prosody.fp;
  pooled_.fn += prosody.fn;
  if (matched >= 0) {
    any_match_info_ = true;
    pooled_.matched += matched > 0 ? 1 : 0;
  }
  pooled_.total += 1;
}

EvalReport EvalAccumulator::Report() const {
  EvalReport report = pooled_;
  int errors = report.substitutions + report.insertions + report.deletions;
  report.per = report.ref_phonemes > 0
                   ? static_cast<double>(errors) / report.ref_phonemes
                   : 0.0;
  int hyp_prosody = report.tp + report.fp;
  int ref_prosody = report.tp + report.fn;
  report.prosody_precision =
      hyp_prosody > 0 ? static_cast<double>(report.tp) / hyp_prosody : 0.0;
  report.prosody_recall =
      ref_prosody > 0 ? static_cast<double>(report.tp) / ref_prosody : 0.0;
  double pr = report.prosody_precision + report.prosody_recall;
  report.prosody_f1 =
      pr > 0.0 ? 2.0 * report.prosody_precision * report.prosody_recall / pr
               : 0.0;
  report.has_match_rate = any_match_info_;
  report.g2p_match_rate =
      report.total > 0 && any_match_info_
          ? static_cast<double>(report.matched) / report.total
          : 0.0;
  return report;
}

}  // namespace gctc
