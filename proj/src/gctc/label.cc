// src/gctc/label.cc
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

#include "gctc/label.h"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gctc {

bool IsProsodySurface(std::string_view surface) {
  for (const char* p : kProsodySurfaces) {
    if (surface == p) return true;
  }
  return false;
}

Token MakePhoneme(std::string surface) {
  return Token{TokenKind::kPhoneme, std::move(surface)};
}

Token MakeProsody(std::string surface) {
  return Token{TokenKind::kProsody, std::move(surface)};
}

Vocabulary Vocabulary::FromSurfaces(const std::vector<std::string>& surfaces,
                                    const std::string& blank_surface) {
  if (blank_surface.empty()) {
    throw ConfigError("blank surface must be non-empty");
  }
  Vocabulary vocab;
  vocab.tokens_.reserve(surfaces.size());
  for (const std::string& surface : surfaces) {
    if (surface.empty()) {
      throw ParseError("empty token surface in vocabulary");
    }
    int id = static_cast<int>(vocab.tokens_.size());
    if (!vocab.index_.emplace(surface, id).second) {
      throw ParseError("duplicate token surface in vocabulary: \"" + surface +
                       "\"");
    }
    TokenKind kind;
    if (surface == blank_surface) {
      kind = TokenKind::kBlank;
      vocab.blank_id_ = id;
    } else if (IsProsodySurface(surface)) {
      kind = TokenKind::kProsody;
    } else {
      kind = TokenKind::kPhoneme;
    }
    vocab.tokens_.push_back(Token{kind, surface});
  }
  if (vocab.blank_id_ < 0) {
    throw ParseError("vocabulary does not contain the blank surface \"" +
                     blank_surface + "\"");
  }
  return vocab;
}

Vocabulary Vocabulary::Read(std::istream& in, const std::string& path) {
  std::string blank_surface = kDefaultBlankSurface;
  std::vector<std::string> surfaces;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.rfind("#blank ", 0) == 0) {
      blank_surface = line.substr(7);
      if (blank_surface.empty()) {
        throw ParseError(path, line_no, "empty blank surface in header");
      }
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) {
      throw ParseError(path, line_no, "empty vocabulary line");
    }
    surfaces.push_back(line);
  }
  try {
    return FromSurfaces(surfaces, blank_surface);
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open vocabulary file: " + path);
  return Read(in, path);
}

void Vocabulary::Write(std::ostream& out) const {
  out << "#blank " << blank_surface() << "\n";
  for (const Token& token : tokens_) {
    out << token.surface << "\n";
  }
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vocabulary file: " + path);
  Write(out);
}

std::optional<int> Vocabulary::FindId(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::IdOrThrow(std::string_view surface) const {
  if (auto id = FindId(surface)) return *id;
  throw UnknownTokenError(std::string(surface));
}

MixedLabelSequence::MixedLabelSequence(std::vector<Token> tokens)
    : tokens_(std::move(tokens)) {
  for (const Token& token : tokens_) {
    if (token.kind == TokenKind::kBlank) {
      throw BlankInSequenceError("blank token in mixed label sequence");
    }
  }
}

MixedLabelSequence MixedLabelSequence::Parse(std::string_view text,
                                             const Vocabulary& vocab) {
  std::vector<Token> tokens;
  for (const std::string& surface : SplitWhitespace(text)) {
    const Token& token = vocab.token(vocab.IdOrThrow(surface));
    if (token.kind == TokenKind::kBlank) {
      throw BlankInSequenceError("blank marker \"" + surface +
                                 "\" in label sequence");
    }
    tokens.push_back(token);
  }
  return MixedLabelSequence(std::move(tokens));
}

std::string MixedLabelSequence::ToString() const {
  std::string out;
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += ' ';
    out += tokens_[i].surface;
  }
  return out;
}

std::vector<Token> MixedLabelSequence::PhonemeSubsequence() const {
  std::vector<Token> out;
  for (const Token& token : tokens_) {
    if (token.kind == TokenKind::kPhoneme) out.push_back(token);
  }
  return out;
}

std::vector<Token> MixedLabelSequence::ProsodySubsequence() const {
  std::vector<Token> out;
  for (const Token& token : tokens_) {
    if (token.kind == TokenKind::kProsody) out.push_back(token);
  }
  return out;
}

std::vector<std::string> MixedLabelSequence::PhonemeSurfaces() const {
  std::vector<std::string> out;
  for (const Token& token : tokens_) {
    if (token.kind == TokenKind::kPhoneme) out.push_back(token.surface);
  }
  return out;
}

StreamSplit SplitStreams(const MixedLabelSequence& seq) {
  StreamSplit split;
  for (int i = 0; i < seq.size(); ++i) {
    const Token& token = seq.token(i);
    if (token.kind == TokenKind::kPhoneme) {
      split.phonemes.emplace_back(i, token);
    } else {
      split.prosody.emplace_back(i, token);
    }
  }
  return split;
}

GraphemeSequence::GraphemeSequence(std::vector<std::string> units)
    : units_(std::move(units)) {
  for (const std::string& unit : units_) {
    if (unit.empty()) throw ParseError("empty grapheme unit");
  }
}

GraphemeSequence GraphemeSequence::FromUtf8(std::string_view text) {
  std::vector<std::string> units;
  size_t i = 0;
  while (i < text.size()) {
    unsigned char lead = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    // Continuation bytes must be 10xxxxxx; otherwise fall back to one byte.
    for (size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    units.emplace_back(text.substr(i, len));
    i += len;
  }
  return GraphemeSequence(std::move(units));
}

std::string GraphemeSequence::Substring(int begin, int count) const {
  std::string out;
  for (int i = begin; i < begin + count; ++i) {
    out += units_[i];
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        out.push_back(current);
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

}  // namespace gctc
