// src/gctc/decode.h
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

#ifndef GCTC_DECODE_H_
#define GCTC_DECODE_H_

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gctc/label.h"
#include "gctc/lattice.h"

namespace gctc {

// Per-frame log-probabilities over the label vocabulary including blank.
// Rows are normalized distributions (log-sum-exp == 0 within 1e-3), which
// the constructor enforces. Immutable after construction.
class EmissionMatrix {
 public:
  EmissionMatrix(std::shared_ptr<const Vocabulary> vocab, int num_frames,
                 std::vector<float> log_probs,
                 std::optional<double> frame_rate = std::nullopt);

  int num_frames() const { return num_frames_; }
  int vocab_size() const { return vocab_->size(); }
  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }
  std::optional<double> frame_rate() const { return frame_rate_; }

  float at(int frame, int token) const {
    return log_probs_[static_cast<size_t>(frame) * vocab_->size() + token];
  }
  std::span<const float> row(int frame) const {
    return {log_probs_.data() + static_cast<size_t>(frame) * vocab_->size(),
            static_cast<size_t>(vocab_->size())};
  }

  // Ties choose the lowest token id.
  int ArgmaxRow(int frame) const;

  // Binary format: magic "EMIT1", u32 N, u32 V (little-endian), then
  // N*V little-endian float32 log-probs, row-major. The vocabulary lives
  // in a sidecar file.
  void WriteBinary(std::ostream& out) const;
  void SaveBinary(const std::string& path) const;
  static EmissionMatrix ReadBinary(std::istream& in,
                                   std::shared_ptr<const Vocabulary> vocab,
                                   const std::string& path = "<emissions>");
  static EmissionMatrix LoadBinary(const std::string& path,
                                   std::shared_ptr<const Vocabulary> vocab);

  // TSV format for hand-made tests: a header row of token surfaces, then
  // one row of log-probs per frame. Columns may be in any vocabulary order.
  void WriteTsv(std::ostream& out) const;
  static EmissionMatrix ReadTsv(std::istream& in,
                                std::shared_ptr<const Vocabulary> vocab,
                                const std::string& path = "<emissions>");

  // Sniffs the magic to pick the binary or TSV reader.
  static EmissionMatrix LoadAuto(const std::string& path,
                                 std::shared_ptr<const Vocabulary> vocab);

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  int num_frames_;
  std::vector<float> log_probs_;
  std::optional<double> frame_rate_;
};

enum class DecodeStatus {
  kUnchecked,               // plain greedy output, no lattice consulted
  kMatched,                 // full match against the grapheme lattice
  kFallbackUnconstrained,   // constrained search exhausted, greedy returned
  kNoCover,                 // grapheme not coverable by dictionary keys
};

const char* DecodeStatusName(DecodeStatus status);

struct DecodeResult {
  MixedLabelSequence sequence;
  double score = 0.0;            // sum of chosen per-frame log-probs
  DecodeStatus status = DecodeStatus::kUnchecked;
  std::vector<int> frames_used;  // original indices of non-blank frames
  int backtracks = 0;
};

struct DecodeConfig {
  int beam_width = 4;        // alternatives considered per step
  int max_backtracks = 256;  // total backtrack budget
  bool strict_greedy = false;  // disable backtracking entirely
};

// Per-frame argmax with CTC collapse: merge consecutive identical tokens,
// then drop blanks. status is kUnchecked.
DecodeResult GreedyDecode(const EmissionMatrix& em);

struct FilteredEmission {
  EmissionMatrix matrix;
  std::vector<int> frame_index;  // original index of each retained frame
};

// Keeps exactly the frames whose argmax is not blank, preserving order.
FilteredEmission FilterNonblankFrames(const EmissionMatrix& em);

// Sum of em[frame][path[frame]] over all frames.
// Throws LengthMismatchError unless path covers every frame.
double ScoreHypothesis(const EmissionMatrix& em, std::span<const int> path);

// Greedy search over the blank-filtered frames, restricted to hypotheses
// whose phoneme prefix stays alignable with the grapheme sequence. At each
// retained frame the highest-scored admissible token is taken: prosody
// always matches; a phoneme must keep the cursor feasible and fit the
// remaining frame budget; a token equal to the previous one with no blank
// frame in between collapses and leaves the cursor untouched. Dead ends
// trigger bounded backtracking, then fall back to the unconstrained greedy
// result with status kFallbackUnconstrained. On success the result is a
// full match and status is kMatched.
DecodeResult ConstrainedDecode(const EmissionMatrix& em,
                               const GraphemeLattice& lattice,
                               const DecodeConfig& config = {});

}  // namespace gctc

#endif  // GCTC_DECODE_H_
