// src/gctc/label.h
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

#ifndef GCTC_LABEL_H_
#define GCTC_LABEL_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gctc/error.h"

namespace gctc {

// The five prosodic labels of the Tokyo-dialect pitch-accent scheme:
// pause, accent rise, accent fall, accent-phrase boundary, and raise-type
// boundary pitch movement.
inline constexpr const char* kProsodySurfaces[] = {"_", "[", "]", "#", "?"};

inline constexpr const char* kDefaultBlankSurface = "<blank>";

bool IsProsodySurface(std::string_view surface);

enum class TokenKind { kPhoneme, kProsody, kBlank };

// One label. Phoneme surfaces are opaque mora-level strings; the toolkit
// never inspects their internal characters. The blank token carries the
// vocabulary's blank marker as its surface.
struct Token {
  TokenKind kind = TokenKind::kPhoneme;
  std::string surface;

  bool operator==(const Token& other) const = default;
};

Token MakePhoneme(std::string surface);
Token MakeProsody(std::string surface);

// Ordered token inventory with dense ids 0..V-1 and exactly one blank.
// Immutable after construction; safe to share across threads.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Classifies each surface (blank marker / prosody / phoneme) and checks
  // for duplicates and empty surfaces. The blank surface must occur exactly
  // once among `surfaces`.
  static Vocabulary FromSurfaces(const std::vector<std::string>& surfaces,
                                 const std::string& blank_surface =
                                     kDefaultBlankSurface);

  // File format: one token surface per line, line index = id. An optional
  // leading header line "#blank <surface>" overrides the blank marker.
  static Vocabulary Read(std::istream& in, const std::string& path = "<vocab>");
  static Vocabulary Load(const std::string& path);
  void Write(std::ostream& out) const;
  void Save(const std::string& path) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_id() const { return blank_id_; }
  const std::string& blank_surface() const {
    return tokens_[blank_id_].surface;
  }
  const Token& token(int id) const { return tokens_[id]; }

  std::optional<int> FindId(std::string_view surface) const;
  int IdOrThrow(std::string_view surface) const;  // throws UnknownTokenError
  bool Contains(std::string_view surface) const {
    return FindId(surface).has_value();
  }

 private:
  std::vector<Token> tokens_;
  std::unordered_map<std::string, int> index_;
  int blank_id_ = -1;
};

// Interleaved phonemic and prosodic tokens; never contains blank.
class MixedLabelSequence {
 public:
  MixedLabelSequence() = default;
  explicit MixedLabelSequence(std::vector<Token> tokens);

  // Parses whitespace-separated surfaces, resolving each via `vocab`.
  // Throws UnknownTokenError or BlankInSequenceError.
  static MixedLabelSequence Parse(std::string_view text,
                                  const Vocabulary& vocab);

  std::string ToString() const;  // space-separated surfaces

  int size() const { return static_cast<int>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  const Token& token(int i) const { return tokens_[i]; }
  const std::vector<Token>& tokens() const { return tokens_; }

  std::vector<Token> PhonemeSubsequence() const;
  std::vector<Token> ProsodySubsequence() const;
  std::vector<std::string> PhonemeSurfaces() const;

  bool operator==(const MixedLabelSequence& other) const = default;

 private:
  std::vector<Token> tokens_;
};

// Result of SplitStreams: each token with its position in the original
// mixed sequence, so the two streams can be zipped back together.
struct StreamSplit {
  std::vector<std::pair<int, Token>> phonemes;
  std::vector<std::pair<int, Token>> prosody;
};

StreamSplit SplitStreams(const MixedLabelSequence& seq);

// A grapheme sequence as a list of units (typically one per code point).
class GraphemeSequence {
 public:
  GraphemeSequence() = default;
  explicit GraphemeSequence(std::vector<std::string> units);

  // Splits UTF-8 text into one unit per code point. Bytes that do not form
  // a valid UTF-8 sequence are kept as single-byte units.
  static GraphemeSequence FromUtf8(std::string_view text);

  int size() const { return static_cast<int>(units_.size()); }
  bool empty() const { return units_.empty(); }
  const std::string& unit(int i) const { return units_[i]; }
  const std::vector<std::string>& units() const { return units_; }

  // Concatenation of units [begin, begin+count).
  std::string Substring(int begin, int count) const;
  std::string ToString() const { return Substring(0, size()); }

  bool operator==(const GraphemeSequence& other) const = default;

 private:
  std::vector<std::string> units_;
};

// Splits on ASCII whitespace; no escaping.
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace gctc

#endif  // GCTC_LABEL_H_
