// src/gctc/dict.cc
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

#include "gctc/dict.h"

#include <algorithm>
#include <fstream>
#include <limits>

#include "gctc/label.h"

namespace gctc {

namespace {
const ExpansionSet kEmptySet;
}  // namespace

void G2pDictionary::Add(const std::string& key, Expansion expansion) {
  if (key.empty()) throw ConfigError("empty dictionary key");
  if (expansion.empty()) throw ConfigError("empty expansion for key " + key);
  for (const std::string& token : expansion) {
    if (token.empty()) throw ConfigError("empty phoneme in expansion");
  }
  entries_[key].insert(std::move(expansion));
}

const ExpansionSet& G2pDictionary::Lookup(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? kEmptySet : it->second;
}

DictStats G2pDictionary::Stats() const {
  DictStats stats;
  stats.key_count = key_count();
  for (const auto& [key, expansions] : entries_) {
    stats.total_expansions += static_cast<int>(expansions.size());
  }
  stats.mean_expansions =
      stats.key_count == 0
          ? 0.0
          : static_cast<double>(stats.total_expansions) / stats.key_count;
  return stats;
}

int G2pDictionary::MaxKeyUnits() const {
  int max_units = 0;
  for (const auto& [key, expansions] : entries_) {
    max_units = std::max(max_units, GraphemeSequence::FromUtf8(key).size());
  }
  return max_units;
}

void G2pDictionary::Write(std::ostream& out) const {
  for (const auto& [key, expansions] : entries_) {
    for (const Expansion& expansion : expansions) {
      out << key << '\t' << JoinTokens(expansion) << "\n";
    }
  }
}

void G2pDictionary::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dictionary file: " + path);
  Write(out);
}

G2pDictionary G2pDictionary::Read(std::istream& in, const std::string& path) {
  G2pDictionary dict;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path, line_no, "expected `key<TAB>expansion`");
    }
    std::string key = line.substr(0, tab);
    Expansion expansion = SplitWhitespace(line.substr(tab + 1));
    if (key.empty() || expansion.empty()) {
      throw ParseError(path, line_no, "bad dictionary row");
    }
    dict.Add(key, std::move(expansion));
  }
  return dict;
}

G2pDictionary G2pDictionary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dictionary file: " + path);
  return Read(in, path);
}

G2pDictionary BuildDictionary(const std::vector<AlignedPair>& aligned,
                              bool keep_multi_unit) {
  G2pDictionary dict;
  for (const AlignedPair& pair : aligned) {
    for (const AlignSegment& segment : pair.segments) {
      dict.Add(segment.grapheme, segment.phonemes);
    }
    if (keep_multi_unit && !pair.grapheme.empty() && !pair.phonemes.empty()) {
      dict.Add(pair.grapheme, pair.phonemes);
    }
  }
  return dict;
}

G2pDictionary Merge(const G2pDictionary& a, const G2pDictionary& b) {
  G2pDictionary merged = a;
  for (const auto& [key, expansions] : b.entries()) {
    for (const Expansion& expansion : expansions) {
      merged.Add(key, expansion);
    }
  }
  return merged;
}

ExpansionTrie::ExpansionTrie(const ExpansionSet& expansions) {
  nodes_.emplace_back();
  for (const Expansion& expansion : expansions) {
    int node = kRoot;
    for (const std::string& token : expansion) {
      auto it = nodes_[node].children.find(token);
      if (it == nodes_[node].children.end()) {
        int child = static_cast<int>(nodes_.size());
        nodes_[node].children.emplace(token, child);
        nodes_.emplace_back();
        node = child;
      } else {
        node = it->second;
      }
    }
    nodes_[node].terminal = true;
  }
  ComputeMinToTerminal(kRoot);
}

int ExpansionTrie::ComputeMinToTerminal(int node) {
  int best = nodes_[node].terminal ? 0 : std::numeric_limits<int>::max();
  for (const auto& [token, child] : nodes_[node].children) {
    int below = ComputeMinToTerminal(child);
    if (below != std::numeric_limits<int>::max()) {
      best = std::min(best, 1 + below);
    }
  }
  nodes_[node].min_to_terminal = best;
  return best;
}

int ExpansionTrie::Step(int node, const std::string& token) const {
  auto it = nodes_[node].children.find(token);
  return it == nodes_[node].children.end() ? -1 : it->second;
}

ExpansionSet ExpansionTrie::EnumeratePaths() const {
  ExpansionSet paths;
  Expansion current;
  // Iterative DFS with explicit walk to keep it simple and ordered.
  struct Frame {
    int node;
    std::map<std::string, int>::const_iterator next;
  };
  std::vector<Frame> stack;
  stack.push_back({kRoot, nodes_[kRoot].children.begin()});
  if (nodes_[kRoot].terminal) paths.insert(current);
  while (!stack.empty()) {
    Frame& frame = stack.back();
    if (frame.next == nodes_[frame.node].children.end()) {
      stack.pop_back();
      if (!current.empty()) current.pop_back();
      continue;
    }
    auto [token, child] = *frame.next;
    ++frame.next;
    current.push_back(token);
    if (nodes_[child].terminal) paths.insert(current);
    stack.push_back({child, nodes_[child].children.begin()});
  }
  return paths;
}

}  // namespace gctc
