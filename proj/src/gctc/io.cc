// src/gctc/io.cc
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

#include "gctc/io.h"

#include <fstream>

namespace gctc {

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<MixedLabelSequence> ReadLabelFile(const std::string& path,
                                              const Vocabulary& vocab) {
  std::vector<MixedLabelSequence> out;
  int line_no = 0;
  for (const std::string& line : ReadLines(path)) {
    ++line_no;
    try {
      out.push_back(MixedLabelSequence::Parse(line, vocab));
    } catch (const Error& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return out;
}

std::vector<TrainingPair> ReadPairsFile(const std::string& path) {
  std::vector<TrainingPair> out;
  int line_no = 0;
  for (const std::string& line : ReadLines(path)) {
    ++line_no;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path, line_no, "expected `grapheme<TAB>phonemes`");
    }
    TrainingPair pair;
    pair.grapheme = line.substr(0, tab);
    pair.phonemes = SplitWhitespace(line.substr(tab + 1));
    if (pair.grapheme.empty()) {
      throw ParseError(path, line_no, "empty grapheme field");
    }
    if (pair.phonemes.empty()) {
      throw ParseError(path, line_no, "empty phoneme field");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<GraphemeSequence> ReadGraphemesFile(const std::string& path) {
  std::vector<GraphemeSequence> out;
  for (const std::string& line : ReadLines(path)) {
    out.push_back(GraphemeSequence::FromUtf8(line));
  }
  return out;
}

std::vector<std::vector<std::vector<std::string>>> ReadCandidatesFile(
    const std::string& path) {
  std::vector<std::vector<std::vector<std::string>>> out;
  for (const std::string& line : ReadLines(path)) {
    std::vector<std::vector<std::string>> candidates;
    if (!line.empty()) {
      size_t begin = 0;
      while (begin <= line.size()) {
        size_t tab = line.find('\t', begin);
        size_t end = (tab == std::string::npos) ? line.size() : tab;
        std::vector<std::string> tokens =
            SplitWhitespace(std::string_view(line).substr(begin, end - begin));
        if (!tokens.empty()) candidates.push_back(std::move(tokens));
        if (tab == std::string::npos) break;
        begin = tab + 1;
      }
    }
    out.push_back(std::move(candidates));
  }
  return out;
}

}  // namespace gctc
