// src/gctc/lattice.cc
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

#include "gctc/lattice.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace gctc {

GraphemeLattice::GraphemeLattice(GraphemeSequence grapheme,
                                 const G2pDictionary& dict, int max_key_len)
    : grapheme_(std::move(grapheme)), max_key_len_(max_key_len) {
  if (max_key_len < 1) throw ConfigError("max_key_len must be >= 1");
  const int length = grapheme_.size();
  edges_at_.resize(length + 1);

  std::unordered_map<std::string, int> trie_of_key;
  for (int pos = 0; pos < length; ++pos) {
    for (int span = 1; span <= std::min(max_key_len, length - pos); ++span) {
      std::string key = grapheme_.Substring(pos, span);
      if (!dict.HasKey(key)) continue;
      auto [it, inserted] = trie_of_key.emplace(key, tries_.size());
      if (inserted) {
        tries_.emplace_back(dict.Lookup(key));
      }
      int edge_id = static_cast<int>(edges_.size());
      edges_.push_back(Edge{pos, pos + span, it->second});
      edges_at_[pos].push_back(edge_id);
    }
  }

  min_remaining_pos_.assign(length + 1, kInfinitePhonemes);
  min_remaining_pos_[length] = 0;
  for (int pos = length - 1; pos >= 0; --pos) {
    for (int edge_id : edges_at_[pos]) {
      const Edge& edge = edges_[edge_id];
      int tail = min_remaining_pos_[edge.dest];
      if (tail == kInfinitePhonemes) continue;
      int via = tries_[edge.trie].MinToTerminal(ExpansionTrie::kRoot);
      min_remaining_pos_[pos] = std::min(min_remaining_pos_[pos], via + tail);
    }
  }
  if (length > 0 && min_remaining_pos_[0] == kInfinitePhonemes) {
    throw NoCoverError("no segmentation of \"" + grapheme_.ToString() +
                       "\" into dictionary keys");
  }

  for (const Edge& edge : edges_) {
    // Only edges on some start-to-accept path contribute tokens.
    if (min_remaining_pos_[edge.dest] == kInfinitePhonemes) continue;
    const ExpansionTrie& trie = tries_[edge.trie];
    for (int node = 0; node < trie.size(); ++node) {
      for (const auto& [token, child] : trie.Children(node)) {
        token_surfaces_.insert(token);
      }
    }
  }
}

MatchCursor GraphemeLattice::StartCursor() const {
  MatchCursor cursor;
  cursor.lattice_ = this;
  cursor.states_.push_back(MatchCursor::State{-1, 0});
  return cursor;
}

int GraphemeLattice::MinRemainingOf(MatchCursor::State state) const {
  if (state.edge < 0) return min_remaining_pos_[state.node];
  const Edge& edge = edges_[state.edge];
  int tail = min_remaining_pos_[edge.dest];
  int via = tries_[edge.trie].MinToTerminal(state.node);
  if (tail == kInfinitePhonemes || via == kInfinitePhonemes) {
    return kInfinitePhonemes;
  }
  return via + tail;
}

// Inserts the states produced by landing on trie node `node` of `edge`:
// the in-key state when deeper expansions remain, and (eagerly) the
// boundary state of the destination position when `node` ends an expansion.
void GraphemeLattice::Land(int edge, int node,
                           std::vector<MatchCursor::State>* out) const {
  const Edge& e = edges_[edge];
  const ExpansionTrie& trie = tries_[e.trie];
  if (trie.HasChildren(node) &&
      min_remaining_pos_[e.dest] != kInfinitePhonemes) {
    out->push_back(MatchCursor::State{edge, node});
  }
  if (trie.IsTerminal(node) &&
      min_remaining_pos_[e.dest] != kInfinitePhonemes) {
    out->push_back(MatchCursor::State{-1, e.dest});
  }
}

MatchCursor MatchCursor::Advance(const Token& phoneme) const {
  if (phoneme.kind != TokenKind::kPhoneme) {
    throw ConfigError("MatchCursor::Advance expects a phoneme token");
  }
  return AdvanceSurface(phoneme.surface);
}

MatchCursor MatchCursor::AdvanceSurface(const std::string& surface) const {
  MatchCursor next;
  next.lattice_ = lattice_;
  next.consumed_ = consumed_ + 1;
  if (lattice_ == nullptr) return next;
  for (const State& state : states_) {
    if (state.edge < 0) {
      for (int edge_id : lattice_->edges_at_[state.node]) {
        const GraphemeLattice::Edge& edge = lattice_->edges_[edge_id];
        int child = lattice_->tries_[edge.trie].Step(ExpansionTrie::kRoot,
                                                     surface);
        if (child >= 0) lattice_->Land(edge_id, child, &next.states_);
      }
    } else {
      const GraphemeLattice::Edge& edge = lattice_->edges_[state.edge];
      int child = lattice_->tries_[edge.trie].Step(state.node, surface);
      if (child >= 0) lattice_->Land(state.edge, child, &next.states_);
    }
  }
  std::sort(next.states_.begin(), next.states_.end());
  next.states_.erase(std::unique(next.states_.begin(), next.states_.end()),
                     next.states_.end());
  return next;
}

bool MatchCursor::IsFullMatch() const {
  if (lattice_ == nullptr) return false;
  State accept{-1, lattice_->grapheme_.size()};
  return std::binary_search(states_.begin(), states_.end(), accept);
}

int MatchCursor::MinPhonemesToAccept() const {
  int best = kInfinitePhonemes;
  for (const State& state : states_) {
    best = std::min(best, lattice_->MinRemainingOf(state));
  }
  return best;
}

std::string GraphemeLattice::DebugString() const {
  std::ostringstream out;
  out << "grapheme: " << grapheme_.ToString() << "\n";
  for (int pos = 0; pos <= grapheme_.size(); ++pos) {
    out << "pos " << pos << " min_remaining="
        << (min_remaining_pos_[pos] == kInfinitePhonemes
                ? std::string("inf")
                : std::to_string(min_remaining_pos_[pos]))
        << "\n";
    if (pos < grapheme_.size()) {
      for (int edge_id : edges_at_[pos]) {
        const Edge& edge = edges_[edge_id];
        out << "  key \"" << grapheme_.Substring(pos, edge.dest - edge.start)
            << "\" -> pos " << edge.dest << " (" << tries_[edge.trie].size()
            << " trie nodes)\n";
      }
    }
  }
  return out.str();
}

MatchCursor AdvanceAll(MatchCursor cursor,
                       std::span<const std::string> phonemes) {
  for (const std::string& surface : phonemes) {
    cursor = cursor.AdvanceSurface(surface);
  }
  return cursor;
}

}  // namespace gctc
