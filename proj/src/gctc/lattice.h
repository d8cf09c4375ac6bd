// src/gctc/lattice.h
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

#ifndef GCTC_LATTICE_H_
#define GCTC_LATTICE_H_

#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gctc/dict.h"
#include "gctc/label.h"

namespace gctc {

class GraphemeLattice;

inline constexpr int kInfinitePhonemes = std::numeric_limits<int>::max();

// A set of lattice states reached after consuming some phoneme prefix.
// Value-like and cheap to copy; the lattice must outlive its cursors.
// The cursor is feasible iff the frontier is non-empty, i.e. iff the
// consumed prefix can still extend to a full expansion of the entire
// grapheme sequence.
class MatchCursor {
 public:
  bool Feasible() const { return !states_.empty(); }
  int consumed() const { return consumed_; }

  // Consumes one phoneme. The returned cursor may be infeasible;
  // infeasibility is a state, not an error. Throws ConfigError if the
  // token is not a phoneme (prosody never touches the cursor).
  MatchCursor Advance(const Token& phoneme) const;
  MatchCursor AdvanceSurface(const std::string& surface) const;

  // True iff some frontier state has consumed the whole grapheme sequence
  // with no partial key open.
  bool IsFullMatch() const;

  // Minimum number of further phonemes needed to reach a full match;
  // kInfinitePhonemes iff infeasible.
  int MinPhonemesToAccept() const;

  size_t FrontierSize() const { return states_.size(); }

 private:
  friend class GraphemeLattice;

  // edge == -1 encodes "at the key boundary before position `node`";
  // otherwise the state is trie node `node` inside edge `edge`.
  struct State {
    int edge;
    int node;
    auto operator<=>(const State&) const = default;
  };

  const GraphemeLattice* lattice_ = nullptr;
  std::vector<State> states_;  // sorted, unique
  int consumed_ = 0;
};

// Prefix-feasibility automaton for one grapheme sequence under a
// dictionary: states pair a grapheme position with a node of the expansion
// trie of a key starting there. Built once, then queried phoneme-by-phoneme
// through MatchCursor. Immutable after construction; one lattice may serve
// many threads.
class GraphemeLattice {
 public:
  // Covers every segmentation of `grapheme` into dictionary keys of at most
  // `max_key_len` units and every expansion choice. Throws NoCoverError if
  // no segmentation into dictionary keys exists.
  GraphemeLattice(GraphemeSequence grapheme, const G2pDictionary& dict,
                  int max_key_len = 4);

  MatchCursor StartCursor() const;

  const GraphemeSequence& grapheme() const { return grapheme_; }
  int max_key_len() const { return max_key_len_; }

  // All phoneme surfaces appearing on lattice transitions.
  const std::set<std::string>& TokenSurfaces() const {
    return token_surfaces_;
  }

  // Human-readable dump of the state graph (for inspection).
  std::string DebugString() const;

 private:
  friend class MatchCursor;

  struct Edge {
    int start;
    int dest;
    int trie;  // index into tries_
  };

  int MinRemainingOf(MatchCursor::State state) const;
  void Land(int edge, int node, std::vector<MatchCursor::State>* out) const;

  GraphemeSequence grapheme_;
  int max_key_len_;
  std::vector<ExpansionTrie> tries_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> edges_at_;  // position -> edge ids
  std::vector<int> min_remaining_pos_;      // position -> phonemes to accept
  std::set<std::string> token_surfaces_;
};

// Bulk evaluation: advances token-by-token over `phonemes`.
MatchCursor AdvanceAll(MatchCursor cursor,
                       std::span<const std::string> phonemes);

}  // namespace gctc

#endif  // GCTC_LATTICE_H_
