// src/gctc/align.h
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

#ifndef GCTC_ALIGN_H_
#define GCTC_ALIGN_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gctc/error.h"

namespace gctc {

// One grapheme/phoneme training pair. Grapheme chunking operates on UTF-8
// code-point units of `grapheme`.
struct TrainingPair {
  std::string grapheme;
  std::vector<std::string> phonemes;
};

// Joint multiplicative model over (grapheme-chunk, phoneme-chunk) pairs,
// normalized so that the probabilities of all chunk pairs sum to 1.
// Chunks are non-empty on both sides (no insertions or deletions).
//
// Chunk scores carry an optional length penalty
//   weight(c) = prob(c) * exp(-length_penalty * (|g_c| * |p_c| - 1)),
// which biases segmentations toward minimum units. 1x1 chunks are never
// penalized; length_penalty = 0 disables the bias entirely.
class AlignmentModel {
 public:
  AlignmentModel(int max_g, int max_p, double length_penalty = 0.0);

  int max_g() const { return max_g_; }
  int max_p() const { return max_p_; }
  double length_penalty() const { return length_penalty_; }

  void SetProb(const std::string& g_chunk,
               const std::vector<std::string>& p_chunk, double prob);

  // 0 if the chunk pair is not stored. `p_joined` is the phoneme chunk
  // joined with single spaces.
  double Prob(const std::string& g_chunk, const std::string& p_joined) const;

  // Inner map for a grapheme chunk, or nullptr. Keys are joined phoneme
  // chunks; values are probabilities.
  const std::map<std::string, double>* Expansions(
      const std::string& g_chunk) const;

  // log(prob * penalty), or -inf when absent.
  double LogWeight(const std::string& g_chunk, const std::string& p_joined,
                   int g_len, int p_len) const;
  double PenaltyLogFactor(int g_len, int p_len) const {
    return -length_penalty_ * (static_cast<double>(g_len) * p_len - 1.0);
  }

  size_t NumChunks() const;
  double TotalProb() const;  // sums to 1 after every M-step

  const std::map<std::string, std::map<std::string, double>>& chunks() const {
    return chunks_;
  }

  // TSV dump `g_chunk<TAB>p_chunk<TAB>prob`, sorted, preceded by
  // `#key value` header lines for max_g/max_p/length_penalty.
  void Write(std::ostream& out) const;
  void Save(const std::string& path) const;
  static AlignmentModel Read(std::istream& in,
                             const std::string& path = "<model>");
  static AlignmentModel Load(const std::string& path);

 private:
  std::map<std::string, std::map<std::string, double>> chunks_;
  int max_g_;
  int max_p_;
  double length_penalty_;
};

struct AlignSegment {
  std::string grapheme;                // concatenated grapheme units
  std::vector<std::string> phonemes;   // phoneme chunk

  bool operator==(const AlignSegment& other) const = default;
};

// A monotone segmentation of one pair. Concatenating the segment graphemes
// (resp. phonemes) reproduces the sources.
struct AlignedPair {
  std::string grapheme;
  std::vector<std::string> phonemes;
  std::vector<AlignSegment> segments;

  bool operator==(const AlignedPair& other) const = default;
};

struct EmTrainOptions {
  int max_g = 3;
  int max_p = 6;
  int max_iters = 30;
  double tol = 1e-6;
  double length_penalty = 1.0;
  int jobs = 1;
};

struct EmTrainResult {
  AlignmentModel model;
  std::vector<double> log_likelihood;  // penalized corpus LL per iteration
  int used_pairs = 0;
  int skipped_pairs = 0;
};

// A pair is alignable iff a monotone chunking exists under the bounds.
bool IsAlignable(int g_units, int p_tokens, int max_g, int max_p);

// EM over the monotone chunk-alignment lattice. Pairs that cannot be
// aligned under the chunk bounds are skipped (reported in the result);
// throws NoAlignablePairsError if nothing remains. The corpus
// log-likelihood is non-decreasing across iterations; training stops when
// the improvement drops below `tol` or after `max_iters` iterations.
EmTrainResult EmTrain(const std::vector<TrainingPair>& pairs,
                      const EmTrainOptions& options = {});

// Highest-weight monotone segmentation. Ties are broken by preferring more
// segments, then the lexicographically earliest boundary sequence.
// Throws UnalignableError if no segmentation with positive weight exists.
AlignedPair ViterbiAlign(const AlignmentModel& model,
                         const TrainingPair& pair);

std::string JoinTokens(const std::vector<std::string>& tokens);

}  // namespace gctc

#endif  // GCTC_ALIGN_H_
