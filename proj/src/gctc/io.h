// src/gctc/io.h
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

#ifndef GCTC_IO_H_
#define GCTC_IO_H_

#include <string>
#include <vector>

#include "gctc/align.h"
#include "gctc/label.h"

namespace gctc {

// Reads all lines of a UTF-8 text file, stripping trailing '\r'.
std::vector<std::string> ReadLines(const std::string& path);

// Label file: one utterance per line, whitespace-separated token surfaces.
// Line numbers are reported in parse errors.
std::vector<MixedLabelSequence> ReadLabelFile(const std::string& path,
                                              const Vocabulary& vocab);

// Pairs TSV: `grapheme<TAB>phoneme tokens space-separated`, one per line.
std::vector<TrainingPair> ReadPairsFile(const std::string& path);

// Graphemes file: one utterance per line, raw grapheme string.
std::vector<GraphemeSequence> ReadGraphemesFile(const std::string& path);

// Candidates file: line i holds the reading candidates for utterance i,
// TAB-separated; each candidate is a space-separated phoneme sequence.
// An empty line means no candidates.
std::vector<std::vector<std::vector<std::string>>> ReadCandidatesFile(
    const std::string& path);

}  // namespace gctc

#endif  // GCTC_IO_H_
