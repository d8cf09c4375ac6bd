// src/gctc/decode.cc
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

#include "gctc/decode.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace gctc {

namespace {

void PutU32Le(std::ostream& out, uint32_t value) {
  char bytes[4];
  bytes[0] = static_cast<char>(value & 0xFF);
  bytes[1] = static_cast<char>((value >> 8) & 0xFF);
  bytes[2] = static_cast<char>((value >> 16) & 0xFF);
  bytes[3] = static_cast<char>((value >> 24) & 0xFF);
  out.write(bytes, 4);
}

uint32_t GetU32Le(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw ParseError("truncated emission file: " + path);
  }
  return static_cast<uint32_t>(bytes[0]) |
         (static_cast<uint32_t>(bytes[1]) << 8) |
         (static_cast<uint32_t>(bytes[2]) << 16) |
         (static_cast<uint32_t>(bytes[3]) << 24);
}

constexpr char kEmissionMagic[5] = {'E', 'M', 'I', 'T', '1'};

double ParseFloatField(std::string_view text, const std::string& path,
                       int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(path, line_no,
                     "bad number: \"" + std::string(text) + "\"");
  }
  return value;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t begin = 0;
  while (true) {
    size_t tab = line.find('\t', begin);
    fields.push_back(line.substr(begin, tab == std::string::npos
                                            ? std::string::npos
                                            : tab - begin));
    if (tab == std::string::npos) break;
    begin = tab + 1;
  }
  return fields;
}

// Greedy result from precomputed per-frame argmaxes.
DecodeResult GreedyFromTop(const EmissionMatrix& em,
                           const std::vector<int>& top) {
  DecodeResult result;
  result.status = DecodeStatus::kUnchecked;
  const int blank = em.vocab().blank_id();
  std::vector<Token> tokens;
  int prev = -1;
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    int id = top[frame];
    result.score += em.at(frame, id);
    if (id != prev && id != blank) {
      tokens.push_back(em.vocab().token(id));
    }
    prev = id;
    if (id != blank) result.frames_used.push_back(frame);
  }
  result.sequence = MixedLabelSequence(std::move(tokens));
  return result;
}

std::vector<int> ArgmaxPerFrame(const EmissionMatrix& em) {
  std::vector<int> top(em.num_frames());
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    top[frame] = em.ArgmaxRow(frame);
  }
  return top;
}

}  // namespace

EmissionMatrix::EmissionMatrix(std::shared_ptr<const Vocabulary> vocab,
                               int num_frames, std::vector<float> log_probs,
                               std::optional<double> frame_rate)
    : vocab_(std::move(vocab)),
      num_frames_(num_frames),
      log_probs_(std::move(log_probs)),
      frame_rate_(frame_rate) {
  if (!vocab_) throw ConfigError("emission matrix requires a vocabulary");
  if (num_frames_ < 0 ||
      log_probs_.size() !=
          static_cast<size_t>(num_frames_) * vocab_->size()) {
    throw ConfigError("emission matrix shape mismatch");
  }
  for (int frame = 0; frame < num_frames_; ++frame) {
    std::span<const float> r = row(frame);
    float max_log = -std::numeric_limits<float>::infinity();
    for (float v : r) max_log = std::max(max_log, v);
    if (!(max_log > -std::numeric_limits<float>::infinity())) {
      throw Error("emission row " + std::to_string(frame) +
                  " has no probability mass");
    }
    double sum = 0.0;
    for (float v : r) sum += std::exp(static_cast<double>(v) - max_log);
    double log_sum = max_log + std::log(sum);
    if (std::fabs(log_sum) > 1e-3) {
      throw Error("emission row " + std::to_string(frame) +
                  " is not a normalized distribution (log-sum-exp = " +
                  std::to_string(log_sum) + ")");
    }
  }
}

int EmissionMatrix::ArgmaxRow(int frame) const {
  std::span<const float> r = row(frame);
  int best = 0;
  for (int id = 1; id < static_cast<int>(r.size()); ++id) {
    if (r[id] > r[best]) best = id;
  }
  return best;
}

void EmissionMatrix::WriteBinary(std::ostream& out) const {
  out.write(kEmissionMagic, sizeof(kEmissionMagic));
  PutU32Le(out, static_cast<uint32_t>(num_frames_));
  PutU32Le(out, static_cast<uint32_t>(vocab_->size()));
  for (float value : log_probs_) {
    PutU32Le(out, std::bit_cast<uint32_t>(value));
  }
}

void EmissionMatrix::SaveBinary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write emission file: " + path);
  WriteBinary(out);
}

EmissionMatrix EmissionMatrix::ReadBinary(
    std::istream& in, std::shared_ptr<const Vocabulary> vocab,
    const std::string& path) {
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kEmissionMagic, 5) != 0) {
    throw ParseError("bad emission magic in " + path);
  }
  uint32_t num_frames = GetU32Le(in, path);
  uint32_t vocab_size = GetU32Le(in, path);
  if (!vocab) throw ConfigError("emission matrix requires a vocabulary");
  if (vocab_size != static_cast<uint32_t>(vocab->size())) {
    throw VocabMismatchError(
        path + ": emission vocab size " + std::to_string(vocab_size) +
        " != vocabulary size " + std::to_string(vocab->size()));
  }
  std::vector<float> log_probs(static_cast<size_t>(num_frames) * vocab_size);
  for (float& value : log_probs) {
    value = std::bit_cast<float>(GetU32Le(in, path));
  }
  return EmissionMatrix(std::move(vocab), static_cast<int>(num_frames),
                        std::move(log_probs));
}

EmissionMatrix EmissionMatrix::LoadBinary(
    const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open emission file: " + path);
  return ReadBinary(in, std::move(vocab), path);
}

void EmissionMatrix::WriteTsv(std::ostream& out) const {
  for (int id = 0; id < vocab_->size(); ++id) {
    if (id) out << '\t';
    out << vocab_->token(id).surface;
  }
  out << '\n';
  char buf[32];
  for (int frame = 0; frame < num_frames_; ++frame) {
    std::span<const float> r = row(frame);
    for (int id = 0; id < static_cast<int>(r.size()); ++id) {
      if (id) out << '\t';
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(r[id]));
      out << buf;
    }
    out << '\n';
  }
}

EmissionMatrix EmissionMatrix::ReadTsv(std::istream& in,
                                       std::shared_ptr<const Vocabulary> vocab,
                                       const std::string& path) {
  if (!vocab) throw ConfigError("emission matrix requires a vocabulary");
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path + ": missing TSV header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = SplitTabs(line);
  if (static_cast<int>(header.size()) != vocab->size()) {
    throw VocabMismatchError(path + ": header has " +
                             std::to_string(header.size()) +
                             " columns, vocabulary has " +
                             std::to_string(vocab->size()));
  }
  std::vector<int> column_to_id(header.size());
  std::vector<char> seen(vocab->size(), 0);
  for (size_t col = 0; col < header.size(); ++col) {
    auto id = vocab->FindId(header[col]);
    if (!id || seen[*id]) {
      throw VocabMismatchError(path + ": header token \"" + header[col] +
                               "\" missing from vocabulary or duplicated");
    }
    seen[*id] = 1;
    column_to_id[col] = *id;
  }
  std::vector<float> log_probs;
  int line_no = 1;
  int num_frames = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() != header.size()) {
      throw ParseError(path, line_no, "wrong number of columns");
    }
    log_probs.resize(log_probs.size() + vocab->size());
    float* frame_row =
        log_probs.data() + static_cast<size_t>(num_frames) * vocab->size();
    for (size_t col = 0; col < fields.size(); ++col) {
      frame_row[column_to_id[col]] =
          static_cast<float>(ParseFloatField(fields[col], path, line_no));
    }
    ++num_frames;
  }
  return EmissionMatrix(std::move(vocab), num_frames, std::move(log_probs));
}

EmissionMatrix EmissionMatrix::LoadAuto(
    const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open emission file: " + path);
  char magic[5] = {0};
  in.read(magic, 5);
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kEmissionMagic, 5) == 0) {
    return ReadBinary(in, std::move(vocab), path);
  }
  return ReadTsv(in, std::move(vocab), path);
}

const char* DecodeStatusName(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::kUnchecked:
      return "Unchecked";
    case DecodeStatus::kMatched:
      return "Matched";
    case DecodeStatus::kFallbackUnconstrained:
      return "FallbackUnconstrained";
    case DecodeStatus::kNoCover:
      return "NoCover";
  }
  return "?";
}

DecodeResult GreedyDecode(const EmissionMatrix& em) {
  return GreedyFromTop(em, ArgmaxPerFrame(em));
}

FilteredEmission FilterNonblankFrames(const EmissionMatrix& em) {
  const int blank = em.vocab().blank_id();
  std::vector<int> frame_index;
  std::vector<float> rows;
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    if (em.ArgmaxRow(frame) == blank) continue;
    frame_index.push_back(frame);
    std::span<const float> r = em.row(frame);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  EmissionMatrix filtered(em.vocab_ptr(),
                          static_cast<int>(frame_index.size()),
                          std::move(rows), em.frame_rate());
  return FilteredEmission{std::move(filtered), std::move(frame_index)};
}

double ScoreHypothesis(const EmissionMatrix& em, std::span<const int> path) {
  if (static_cast<int>(path.size()) != em.num_frames()) {
    throw LengthMismatchError(
        "path length " + std::to_string(path.size()) + " != frame count " +
        std::to_string(em.num_frames()));
  }
  double score = 0.0;
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    int id = path[frame];
    if (id < 0 || id >= em.vocab_size()) {
      throw Error("token id out of range in path");
    }
    score += em.at(frame, id);
  }
  return score;
}

DecodeResult ConstrainedDecode(const EmissionMatrix& em,
                               const GraphemeLattice& lattice,
                               const DecodeConfig& config) {
  if (config.beam_width < 1 || config.max_backtracks < 0) {
    throw ConfigError("bad decode config");
  }
  for (const std::string& surface : lattice.TokenSurfaces()) {
    if (!em.vocab().Contains(surface)) {
      throw VocabMismatchError("lattice phoneme \"" + surface +
                               "\" is not in the emission vocabulary");
    }
  }

  const Vocabulary& vocab = em.vocab();
  const int blank = vocab.blank_id();
  std::vector<int> top = ArgmaxPerFrame(em);
  std::vector<int> retained;
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    if (top[frame] != blank) retained.push_back(frame);
  }
  const int num_steps = static_cast<int>(retained.size());

  std::vector<int> chosen(num_steps, -1);
  std::vector<char> emitted(num_steps, 0);
  std::vector<int> skip(num_steps, 0);
  std::vector<MatchCursor> cursors(num_steps + 1);
  cursors[0] = lattice.StartCursor();
  std::vector<std::vector<int>> ranked(num_steps);  // built on demand

  auto ranked_candidates = [&](int step) -> const std::vector<int>& {
    std::vector<int>& order = ranked[step];
    if (order.empty()) {
      order.reserve(vocab.size() - 1);
      for (int id = 0; id < vocab.size(); ++id) {
        if (id != blank) order.push_back(id);
      }
      const int frame = retained[step];
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        float pa = em.at(frame, a), pb = em.at(frame, b);
        if (pa != pb) return pa > pb;
        return a < b;
      });
    }
    return order;
  };

  // Admissibility of candidate `id` at `step` given the current cursor.
  // On success sets *next_cursor / *emits.
  auto admissible = [&](int step, int id, MatchCursor* next_cursor,
                        bool* emits) -> bool {
    bool collapses = step > 0 && id == chosen[step - 1] &&
                     retained[step] == retained[step - 1] + 1;
    if (collapses) {
      *next_cursor = cursors[step];
      *emits = false;
      return true;
    }
    const Token& token = vocab.token(id);
    if (token.kind == TokenKind::kProsody) {
      *next_cursor = cursors[step];
      *emits = true;
      return true;
    }
    MatchCursor advanced = cursors[step].AdvanceSurface(token.surface);
    if (!advanced.Feasible()) return false;
    if (advanced.MinPhonemesToAccept() > num_steps - 1 - step) return false;
    *next_cursor = std::move(advanced);
    *emits = true;
    return true;
  };

  int backtracks = 0;
  int step = 0;
  while (true) {
    if (step == num_steps) {
      if (cursors[num_steps].IsFullMatch()) break;
    } else if (skip[step] < config.beam_width) {
      // Pick the (skip[step]+1)-th admissible candidate by rank.
      MatchCursor next_cursor;
      bool emits = false;
      int picked = -1;
      if (skip[step] == 0 &&
          admissible(step, top[retained[step]], &next_cursor, &emits)) {
        picked = top[retained[step]];  // argmax fast path
      } else {
        int seen = 0;
        for (int id : ranked_candidates(step)) {
          if (!admissible(step, id, &next_cursor, &emits)) continue;
          if (seen == skip[step]) {
            picked = id;
            break;
          }
          ++seen;
        }
      }
      if (picked >= 0) {
        chosen[step] = picked;
        emitted[step] = emits;
        cursors[step + 1] = std::move(next_cursor);
        ++step;
        continue;
      }
    }
    // Dead end at `step` (or final full-match check failed).
    if (config.strict_greedy || backtracks >= config.max_backtracks ||
        step == 0) {
      DecodeResult fallback = GreedyFromTop(em, top);
      fallback.status = DecodeStatus::kFallbackUnconstrained;
      fallback.backtracks = backtracks;
      return fallback;
    }
    ++backtracks;
    --step;
    skip[step] += 1;
    for (int later = step + 1; later < num_steps; ++later) skip[later] = 0;
  }

  DecodeResult result;
  result.status = DecodeStatus::kMatched;
  result.backtracks = backtracks;
  result.frames_used = retained;
  std::vector<Token> tokens;
  for (int s = 0; s < num_steps; ++s) {
    if (emitted[s]) tokens.push_back(vocab.token(chosen[s]));
  }
  result.sequence = MixedLabelSequence(std::move(tokens));
  // Summed in original frame order so that a constrained pass that keeps
  // every greedy choice reproduces the greedy score bit for bit.
  int next_retained = 0;
  for (int frame = 0; frame < em.num_frames(); ++frame) {
    if (next_retained < num_steps && retained[next_retained] == frame) {
      result.score += em.at(frame, chosen[next_retained]);
      ++next_retained;
    } else {
      result.score += em.at(frame, blank);
    }
  }
  return result;
}

}  // namespace gctc
