// src/gctc/align.cc
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

#include "gctc/align.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "gctc/label.h"

namespace gctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string FormatDouble(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double ParseDouble(const std::string& text, const std::string& path,
                   int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(path, line_no, "bad number: \"" + text + "\"");
  }
  return value;
}

// Working form of one pair plus all chunk substrings within bounds.
struct PairChunks {
  int num_units = 0;
  int num_phonemes = 0;
  // g_sub[i][a-1] = units[i..i+a) concatenated; sized to the bound.
  std::vector<std::vector<std::string>> g_sub;
  // p_sub[j][b-1] = phonemes[j..j+b) joined with spaces.
  std::vector<std::vector<std::string>> p_sub;
};

PairChunks MakeChunks(const TrainingPair& pair, int max_g, int max_p) {
  PairChunks out;
  GraphemeSequence g = GraphemeSequence::FromUtf8(pair.grapheme);
  out.num_units = g.size();
  out.num_phonemes = static_cast<int>(pair.phonemes.size());
  out.g_sub.resize(out.num_units);
  for (int i = 0; i < out.num_units; ++i) {
    int bound = std::min(max_g, out.num_units - i);
    out.g_sub[i].reserve(bound);
    for (int a = 1; a <= bound; ++a) {
      out.g_sub[i].push_back(g.Substring(i, a));
    }
  }
  out.p_sub.resize(out.num_phonemes);
  for (int j = 0; j < out.num_phonemes; ++j) {
    int bound = std::min(max_p, out.num_phonemes - j);
    out.p_sub[j].reserve(bound);
    std::string joined;
    for (int b = 1; b <= bound; ++b) {
      if (b > 1) joined += ' ';
      joined += pair.phonemes[j + b - 1];
      out.p_sub[j].push_back(joined);
    }
  }
  return out;
}

using CountMap = std::map<std::string, std::map<std::string, double>>;

// Linear-space weights of all chunk moves for one pair, indexed as
// [(i * max_g + (a-1)) * K * max_p + j * max_p + (b-1)].
std::vector<double> PairWeights(const AlignmentModel& model,
                                const PairChunks& chunks) {
  const int max_g = model.max_g();
  const int max_p = model.max_p();
  const int num_units = chunks.num_units;
  const int num_phonemes = chunks.num_phonemes;
  std::vector<double> weights(
      static_cast<size_t>(num_units) * max_g * num_phonemes * max_p, 0.0);
  for (int i = 0; i < num_units; ++i) {
    for (int a = 1; a <= static_cast<int>(chunks.g_sub[i].size()); ++a) {
      const auto* expansions = model.Expansions(chunks.g_sub[i][a - 1]);
      if (expansions == nullptr) continue;
      size_t base = (static_cast<size_t>(i) * max_g + (a - 1)) *
                    num_phonemes * max_p;
      for (int j = 0; j < num_phonemes; ++j) {
        for (int b = 1; b <= static_cast<int>(chunks.p_sub[j].size()); ++b) {
          auto it = expansions->find(chunks.p_sub[j][b - 1]);
          if (it == expansions->end()) continue;
          weights[base + static_cast<size_t>(j) * max_p + (b - 1)] =
              it->second * std::exp(model.PenaltyLogFactor(a, b));
        }
      }
    }
  }
  return weights;
}

struct EStepAccum {
  CountMap counts;
  double log_likelihood = 0.0;
};

void AccumulatePair(const AlignmentModel& model, const TrainingPair& pair,
                    EStepAccum* accum) {
  PairChunks chunks = MakeChunks(pair, model.max_g(), model.max_p());
  const int max_g = model.max_g();
  const int max_p = model.max_p();
  const int num_units = chunks.num_units;
  const int num_phonemes = chunks.num_phonemes;
  std::vector<double> weights = PairWeights(model, chunks);
  auto weight_at = [&](int i, int a, int j, int b) -> double {
    return weights[(static_cast<size_t>(i) * max_g + (a - 1)) *
                       num_phonemes * max_p +
                   static_cast<size_t>(j) * max_p + (b - 1)];
  };

  const int cols = num_phonemes + 1;
  std::vector<double> alpha(static_cast<size_t>(num_units + 1) * cols, 0.0);
  std::vector<double> beta(alpha.size(), 0.0);
  alpha[0] = 1.0;
  for (int i = 0; i <= num_units; ++i) {
    for (int j = 0; j <= num_phonemes; ++j) {
      double a_ij = alpha[i * cols + j];
      if (a_ij == 0.0) continue;
      int a_max = std::min(max_g, num_units - i);
      int b_max = std::min(max_p, num_phonemes - j);
      for (int a = 1; a <= a_max; ++a) {
        for (int b = 1; b <= b_max; ++b) {
          double w = weight_at(i, a, j, b);
          if (w > 0.0) alpha[(i + a) * cols + (j + b)] += a_ij * w;
        }
      }
    }
  }
  double z = alpha[num_units * cols + num_phonemes];
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw Error("numeric underflow aligning pair \"" + pair.grapheme +
                "\"; pair too long for linear-space EM");
  }

  beta[num_units * cols + num_phonemes] = 1.0;
  for (int i = num_units; i >= 0; --i) {
    for (int j = num_phonemes; j >= 0; --j) {
      int a_max = std::min(max_g, num_units - i);
      int b_max = std::min(max_p, num_phonemes - j);
      double sum = beta[i * cols + j];
      if (i == num_units && j == num_phonemes) sum = 1.0;
      if (i != num_units || j != num_phonemes) {
        sum = 0.0;
        for (int a = 1; a <= a_max; ++a) {
          for (int b = 1; b <= b_max; ++b) {
            double w = weight_at(i, a, j, b);
            if (w > 0.0) sum += w * beta[(i + a) * cols + (j + b)];
          }
        }
        beta[i * cols + j] = sum;
      }
      // Expected counts for moves leaving (i, j).
      double a_ij = alpha[i * cols + j];
      if (a_ij == 0.0) continue;
      for (int a = 1; a <= a_max; ++a) {
        for (int b = 1; b <= b_max; ++b) {
          double w = weight_at(i, a, j, b);
          if (w <= 0.0) continue;
          double posterior = a_ij * w * beta[(i + a) * cols + (j + b)] / z;
          if (posterior > 0.0) {
            accum->counts[chunks.g_sub[i][a - 1]][chunks.p_sub[j][b - 1]] +=
                posterior;
          }
        }
      }
    }
  }
  accum->log_likelihood += std::log(z);
}

// Chunk pairs that can occur in at least one full segmentation of `pair`.
void CollectSupport(const TrainingPair& pair, int max_g, int max_p,
                    CountMap* support) {
  PairChunks chunks = MakeChunks(pair, max_g, max_p);
  const int num_units = chunks.num_units;
  const int num_phonemes = chunks.num_phonemes;
  const int cols = num_phonemes + 1;
  std::vector<char> reach(static_cast<size_t>(num_units + 1) * cols, 0);
  std::vector<char> coreach(reach.size(), 0);
  reach[0] = 1;
  for (int i = 0; i <= num_units; ++i) {
    for (int j = 0; j <= num_phonemes; ++j) {
      if (!reach[i * cols + j]) continue;
      for (int a = 1; a <= std::min(max_g, num_units - i); ++a) {
        for (int b = 1; b <= std::min(max_p, num_phonemes - j); ++b) {
          reach[(i + a) * cols + (j + b)] = 1;
        }
      }
    }
  }
  coreach[num_units * cols + num_phonemes] = 1;
  for (int i = num_units; i >= 0; --i) {
    for (int j = num_phonemes; j >= 0; --j) {
      for (int a = 1; a <= std::min(max_g, num_units - i); ++a) {
        for (int b = 1; b <= std::min(max_p, num_phonemes - j); ++b) {
          if (coreach[(i + a) * cols + (j + b)]) coreach[i * cols + j] = 1;
        }
      }
    }
  }
  for (int i = 0; i < num_units; ++i) {
    for (int j = 0; j < num_phonemes; ++j) {
      if (!reach[i * cols + j]) continue;
      for (int a = 1; a <= std::min(max_g, num_units - i); ++a) {
        for (int b = 1; b <= std::min(max_p, num_phonemes - j); ++b) {
          if (coreach[(i + a) * cols + (j + b)]) {
            (*support)[chunks.g_sub[i][a - 1]][chunks.p_sub[j][b - 1]] = 1.0;
          }
        }
      }
    }
  }
}

bool NearlyEqual(double x, double ref) {
  if (x == ref) return true;
  return std::fabs(x - ref) <= 1e-12 * std::max(1.0, std::fabs(ref));
}

}  // namespace

AlignmentModel::AlignmentModel(int max_g, int max_p, double length_penalty)
    : max_g_(max_g), max_p_(max_p), length_penalty_(length_penalty) {
  if (max_g < 1 || max_p < 1) {
    throw ConfigError("chunk bounds must be >= 1");
  }
}

void AlignmentModel::SetProb(const std::string& g_chunk,
                             const std::vector<std::string>& p_chunk,
                             double prob) {
  if (g_chunk.empty() || p_chunk.empty()) {
    throw ConfigError("empty chunk");
  }
  if (!(prob > 0.0)) throw ConfigError("chunk probability must be > 0");
  chunks_[g_chunk][JoinTokens(p_chunk)] = prob;
}

double AlignmentModel::Prob(const std::string& g_chunk,
                            const std::string& p_joined) const {
  auto it = chunks_.find(g_chunk);
  if (it == chunks_.end()) return 0.0;
  auto jt = it->second.find(p_joined);
  return jt == it->second.end() ? 0.0 : jt->second;
}

const std::map<std::string, double>* AlignmentModel::Expansions(
    const std::string& g_chunk) const {
  auto it = chunks_.find(g_chunk);
  return it == chunks_.end() ? nullptr : &it->second;
}

double AlignmentModel::LogWeight(const std::string& g_chunk,
                                 const std::string& p_joined, int g_len,
                                 int p_len) const {
  double prob = Prob(g_chunk, p_joined);
  if (prob <= 0.0) return kNegInf;
  return std::log(prob) + PenaltyLogFactor(g_len, p_len);
}

size_t AlignmentModel::NumChunks() const {
  size_t n = 0;
  for (const auto& [g, inner] : chunks_) n += inner.size();
  return n;
}

double AlignmentModel::TotalProb() const {
  double total = 0.0;
  for (const auto& [g, inner] : chunks_) {
    for (const auto& [p, prob] : inner) total += prob;
  }
  return total;
}

void AlignmentModel::Write(std::ostream& out) const {
  out << "#max_g " << max_g_ << "\n";
  out << "#max_p " << max_p_ << "\n";
  out << "#length_penalty " << FormatDouble(length_penalty_) << "\n";
  for (const auto& [g, inner] : chunks_) {
    for (const auto& [p, prob] : inner) {
      out << g << '\t' << p << '\t' << FormatDouble(prob) << "\n";
    }
  }
}

void AlignmentModel::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path);
  Write(out);
}

AlignmentModel AlignmentModel::Read(std::istream& in,
                                    const std::string& path) {
  int max_g = 0, max_p = 0;
  double length_penalty = 0.0;
  struct Row {
    std::string g, p;
    double prob;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string key, value;
      header >> key >> value;
      if (key == "max_g") max_g = static_cast<int>(
          ParseDouble(value, path, line_no));
      else if (key == "max_p") max_p = static_cast<int>(
          ParseDouble(value, path, line_no));
      else if (key == "length_penalty")
        length_penalty = ParseDouble(value, path, line_no);
      continue;
    }
    size_t t1 = line.find('\t');
    size_t t2 = (t1 == std::string::npos) ? std::string::npos
                                          : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw ParseError(path, line_no, "expected `g<TAB>p<TAB>prob`");
    }
    Row row;
    row.g = line.substr(0, t1);
    row.p = line.substr(t1 + 1, t2 - t1 - 1);
    row.prob = ParseDouble(line.substr(t2 + 1), path, line_no);
    if (row.g.empty() || row.p.empty() || !(row.prob > 0.0)) {
      throw ParseError(path, line_no, "bad model row");
    }
    rows.push_back(std::move(row));
  }
  if (max_g == 0 || max_p == 0) {
    // No header: derive bounds from the observed chunks.
    for (const Row& row : rows) {
      max_g = std::max(max_g, GraphemeSequence::FromUtf8(row.g).size());
      max_p = std::max(max_p, static_cast<int>(
                                  SplitWhitespace(row.p).size()));
    }
    if (max_g == 0) max_g = 1;
    if (max_p == 0) max_p = 1;
  }
  AlignmentModel model(max_g, max_p, length_penalty);
  for (const Row& row : rows) {
    model.chunks_[row.g][row.p] = row.prob;
  }
  return model;
}

AlignmentModel AlignmentModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  return Read(in, path);
}

bool IsAlignable(int g_units, int p_tokens, int max_g, int max_p) {
  if (g_units == 0 || p_tokens == 0) return g_units == 0 && p_tokens == 0;
  return static_cast<long long>(p_tokens) <= 1LL * max_p * g_units &&
         static_cast<long long>(g_units) <= 1LL * max_g * p_tokens;
}

EmTrainResult EmTrain(const std::vector<TrainingPair>& pairs,
                      const EmTrainOptions& options) {
  if (options.max_g < 1 || options.max_p < 1 || options.max_iters < 1 ||
      options.tol < 0.0 || options.jobs < 1) {
    throw ConfigError("bad EM training options");
  }
  std::vector<const TrainingPair*> usable;
  int skipped = 0;
  for (const TrainingPair& pair : pairs) {
    int g_units = GraphemeSequence::FromUtf8(pair.grapheme).size();
    int p_tokens = static_cast<int>(pair.phonemes.size());
    if (g_units > 0 && p_tokens > 0 &&
        IsAlignable(g_units, p_tokens, options.max_g, options.max_p)) {
      usable.push_back(&pair);
    } else {
      ++skipped;
    }
  }
  if (usable.empty()) {
    throw NoAlignablePairsError(
        "no pair is alignable under the chunk bounds");
  }

  // Uniform initialization over every chunk pair that occurs in some full
  // segmentation of some training pair.
  CountMap support;
  for (const TrainingPair* pair : usable) {
    CollectSupport(*pair, options.max_g, options.max_p, &support);
  }
  size_t support_size = 0;
  for (const auto& [g, inner] : support) support_size += inner.size();
  AlignmentModel model(options.max_g, options.max_p, options.length_penalty);
  {
    double uniform = 1.0 / static_cast<double>(support_size);
    CountMap init = support;
    for (auto& [g, inner] : init) {
      for (auto& [p, prob] : inner) prob = uniform;
    }
    // Install via Read-path internals: rebuild through SetProb.
    for (const auto& [g, inner] : init) {
      for (const auto& [p, prob] : inner) {
        model.SetProb(g, SplitWhitespace(p), prob);
      }
    }
  }

  EmTrainResult result{std::move(model), {}, static_cast<int>(usable.size()),
                       skipped};
  int jobs = std::min<int>(options.jobs, static_cast<int>(usable.size()));
  for (int iter = 0; iter < options.max_iters; ++iter) {
    std::vector<EStepAccum> accums(jobs);
    if (jobs == 1) {
      for (const TrainingPair* pair : usable) {
        AccumulatePair(result.model, *pair, &accums[0]);
      }
    } else {
      std::vector<std::thread> threads;
      size_t block = (usable.size() + jobs - 1) / jobs;
      for (int w = 0; w < jobs; ++w) {
        size_t lo = w * block;
        size_t hi = std::min(usable.size(), lo + block);
        threads.emplace_back([&, w, lo, hi] {
          for (size_t k = lo; k < hi; ++k) {
            AccumulatePair(result.model, *usable[k], &accums[w]);
          }
        });
      }
      for (auto& thread : threads) thread.join();
    }
    // Merge in worker order so that float sums are reproducible for a
    // fixed job count.
    CountMap counts = std::move(accums[0].counts);
    double log_likelihood = accums[0].log_likelihood;
    for (int w = 1; w < jobs; ++w) {
      for (const auto& [g, inner] : accums[w].counts) {
        auto& target = counts[g];
        for (const auto& [p, value] : inner) target[p] += value;
      }
      log_likelihood += accums[w].log_likelihood;
    }
    result.log_likelihood.push_back(log_likelihood);

    // M-step: joint normalization over all chunk pairs.
    double total = 0.0;
    for (const auto& [g, inner] : counts) {
      for (const auto& [p, value] : inner) total += value;
    }
    AlignmentModel updated(options.max_g, options.max_p,
                           options.length_penalty);
    for (const auto& [g, inner] : counts) {
      for (const auto& [p, value] : inner) {
        if (value > 0.0) updated.SetProb(g, SplitWhitespace(p), value / total);
      }
    }
    result.model = std::move(updated);

    size_t n = result.log_likelihood.size();
    if (n >= 2 && result.log_likelihood[n - 1] - result.log_likelihood[n - 2] <
                      options.tol) {
      break;
    }
  }
  return result;
}

AlignedPair ViterbiAlign(const AlignmentModel& model,
                         const TrainingPair& pair) {
  GraphemeSequence g = GraphemeSequence::FromUtf8(pair.grapheme);
  const int num_units = g.size();
  const int num_phonemes = static_cast<int>(pair.phonemes.size());
  AlignedPair aligned{pair.grapheme, pair.phonemes, {}};
  if (num_units == 0 && num_phonemes == 0) return aligned;
  if (!IsAlignable(num_units, num_phonemes, model.max_g(), model.max_p())) {
    throw UnalignableError("pair \"" + pair.grapheme +
                           "\" is not alignable under the chunk bounds");
  }

  TrainingPair as_pair{pair.grapheme, pair.phonemes};
  PairChunks chunks = MakeChunks(as_pair, model.max_g(), model.max_p());
  const int max_g = model.max_g();
  const int max_p = model.max_p();
  const int cols = num_phonemes + 1;

  // Log-weights of all moves.
  std::vector<double> logw(
      static_cast<size_t>(num_units) * max_g * num_phonemes * max_p, kNegInf);
  for (int i = 0; i < num_units; ++i) {
    for (int a = 1; a <= static_cast<int>(chunks.g_sub[i].size()); ++a) {
      const auto* expansions = model.Expansions(chunks.g_sub[i][a - 1]);
      if (expansions == nullptr) continue;
      for (int j = 0; j < num_phonemes; ++j) {
        for (int b = 1; b <= static_cast<int>(chunks.p_sub[j].size()); ++b) {
          auto it = expansions->find(chunks.p_sub[j][b - 1]);
          if (it == expansions->end()) continue;
          logw[(static_cast<size_t>(i) * max_g + (a - 1)) * num_phonemes *
                   max_p +
               static_cast<size_t>(j) * max_p + (b - 1)] =
              std::log(it->second) + model.PenaltyLogFactor(a, b);
        }
      }
    }
  }
  auto logw_at = [&](int i, int a, int j, int b) -> double {
    return logw[(static_cast<size_t>(i) * max_g + (a - 1)) * num_phonemes *
                    max_p +
                static_cast<size_t>(j) * max_p + (b - 1)];
  };

  // Suffix DP: best score from (i, j) to the end, and the maximum segment
  // count among near-optimal paths.
  std::vector<double> best(static_cast<size_t>(num_units + 1) * cols, kNegInf);
  std::vector<int> segs(best.size(), 0);
  best[num_units * cols + num_phonemes] = 0.0;
  for (int i = num_units; i >= 0; --i) {
    for (int j = num_phonemes; j >= 0; --j) {
      if (i == num_units && j == num_phonemes) continue;
      double best_score = kNegInf;
      for (int a = 1; a <= std::min(max_g, num_units - i); ++a) {
        for (int b = 1; b <= std::min(max_p, num_phonemes - j); ++b) {
          double score = logw_at(i, a, j, b) + best[(i + a) * cols + (j + b)];
          if (score > best_score) best_score = score;
        }
      }
      best[i * cols + j] = best_score;
      if (best_score == kNegInf) continue;
      int best_segs = 0;
      for (int a = 1; a <= std::min(max_g, num_units - i); ++a) {
        for (int b = 1; b <= std::min(max_p, num_phonemes - j); ++b) {
          double score = logw_at(i, a, j, b) + best[(i + a) * cols + (j + b)];
          if (NearlyEqual(score, best_score)) {
            best_segs = std::max(best_segs, 1 + segs[(i + a) * cols + (j + b)]);
          }
        }
      }
      segs[i * cols + j] = best_segs;
    }
  }
  if (best[0] == kNegInf) {
    throw UnalignableError("no segmentation of \"" + pair.grapheme +
                           "\" has positive weight under the model");
  }

  // Greedy walk: among optimal moves that preserve the maximum segment
  // count, take the smallest (a, b), which yields the lexicographically
  // earliest boundary sequence.
  int i = 0, j = 0;
  while (i != num_units || j != num_phonemes) {
    double target = best[i * cols + j];
    int target_segs = segs[i * cols + j];
    bool moved = false;
    for (int a = 1; a <= std::min(max_g, num_units - i) && !moved; ++a) {
      for (int b = 1; b <= std::min(max_p, num_phonemes - j) && !moved; ++b) {
        double score = logw_at(i, a, j, b) + best[(i + a) * cols + (j + b)];
        if (NearlyEqual(score, target) &&
            1 + segs[(i + a) * cols + (j + b)] == target_segs) {
          AlignSegment segment;
          segment.grapheme = chunks.g_sub[i][a - 1];
          segment.phonemes.assign(pair.phonemes.begin() + j,
                                  pair.phonemes.begin() + j + b);
          aligned.segments.push_back(std::move(segment));
          i += a;
          j += b;
          moved = true;
        }
      }
    }
    if (!moved) {
      throw Error("internal: Viterbi walk stuck");  // unreachable
    }
  }
  return aligned;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace gctc
