// src/gctc/dict.h
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

#ifndef GCTC_DICT_H_
#define GCTC_DICT_H_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gctc/align.h"

namespace gctc {

using Expansion = std::vector<std::string>;
using ExpansionSet = std::set<Expansion>;

struct DictStats {
  int key_count = 0;
  int total_expansions = 0;
  double mean_expansions = 0.0;
};

// Grapheme-key -> set-of-phoneme-expansions map. Matching against it is
// boolean; the dictionary is used for recall, so extra expansions can only
// admit more hypotheses. Immutable once built; concurrent lookups are safe.
class G2pDictionary {
 public:
  G2pDictionary() = default;

  void Add(const std::string& key, Expansion expansion);

  // Expansion set for an exact key; empty set for a missing key.
  const ExpansionSet& Lookup(const std::string& key) const;
  bool HasKey(const std::string& key) const {
    return entries_.count(key) != 0;
  }

  int key_count() const { return static_cast<int>(entries_.size()); }
  DictStats Stats() const;
  const std::map<std::string, ExpansionSet>& entries() const {
    return entries_;
  }
  // Longest key, in grapheme units.
  int MaxKeyUnits() const;

  // TSV `key<TAB>expansion tokens`, one (key, expansion) per line, sorted
  // by key then expansion.
  void Write(std::ostream& out) const;
  void Save(const std::string& path) const;
  static G2pDictionary Read(std::istream& in,
                            const std::string& path = "<dict>");
  static G2pDictionary Load(const std::string& path);

  bool operator==(const G2pDictionary& other) const = default;

 private:
  std::map<std::string, ExpansionSet> entries_;
};

// Every alignment segment becomes an entry. With `keep_multi_unit`, each
// whole pair additionally becomes an entry under its full grapheme key.
G2pDictionary BuildDictionary(const std::vector<AlignedPair>& aligned,
                              bool keep_multi_unit = false);

// Key-wise union of expansion sets; commutative and idempotent.
G2pDictionary Merge(const G2pDictionary& a, const G2pDictionary& b);

// Trie over the phoneme expansions of one key. Terminal nodes mark
// expansion ends; paths to terminals are exactly the expansion set.
class ExpansionTrie {
 public:
  explicit ExpansionTrie(const ExpansionSet& expansions);

  static constexpr int kRoot = 0;

  // Child id or -1.
  int Step(int node, const std::string& token) const;
  bool IsTerminal(int node) const { return nodes_[node].terminal; }
  bool HasChildren(int node) const { return !nodes_[node].children.empty(); }
  // Tokens to the nearest terminal at or below `node` (0 if terminal).
  int MinToTerminal(int node) const { return nodes_[node].min_to_terminal; }
  int size() const { return static_cast<int>(nodes_.size()); }

  const std::map<std::string, int>& Children(int node) const {
    return nodes_[node].children;
  }

  // Re-enumerates all terminal paths (for verification).
  ExpansionSet EnumeratePaths() const;

 private:
  struct Node {
    std::map<std::string, int> children;
    bool terminal = false;
    int min_to_terminal = 0;
  };
  int ComputeMinToTerminal(int node);

  std::vector<Node> nodes_;
};

}  // namespace gctc

#endif  // GCTC_DICT_H_
