// tests/label_test.cc
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

#include <sstream>

#include "doctest.h"
#include "gctc/rng.h"
#include "test_util.h"

using namespace gctc;

namespace {
using testutil::Seq;

std::shared_ptr<const Vocabulary> TestVocab() {
  return testutil::VocabOf({"<blank>", "ka", "ga", "ku", "ba", "ke", "_", "[",
                            "]", "#", "?"});
}
}  // namespace

TEST_CASE("vocabulary classifies tokens and assigns dense ids") {
  auto vocab = TestVocab();
  CHECK(vocab->size() == 11);
  CHECK(vocab->blank_id() == 0);
  CHECK(vocab->token(0).kind == TokenKind::kBlank);
  CHECK(vocab->token(1).kind == TokenKind::kPhoneme);
  CHECK(vocab->token(6).kind == TokenKind::kProsody);
  CHECK(vocab->token(6).surface == "_");
  for (int id = 0; id < vocab->size(); ++id) {
    CHECK(vocab->IdOrThrow(vocab->token(id).surface) == id);
  }
  CHECK(!vocab->FindId("zo").has_value());
  CHECK_THROWS_AS(vocab->IdOrThrow("zo"), UnknownTokenError);
}

TEST_CASE("vocabulary rejects duplicates, empties, and missing blank") {
  CHECK_THROWS_AS(Vocabulary::FromSurfaces({"<blank>", "ka", "ka"}),
                  ParseError);
  CHECK_THROWS_AS(Vocabulary::FromSurfaces({"<blank>", ""}), ParseError);
  CHECK_THROWS_AS(Vocabulary::FromSurfaces({"ka", "ga"}), ParseError);
  // Exactly one blank: a second line equal to the marker is a duplicate.
  CHECK_THROWS_AS(Vocabulary::FromSurfaces({"<blank>", "<blank>"}),
                  ParseError);
}

TEST_CASE("vocabulary file round-trip with custom blank header") {
  std::istringstream in("#blank <pad>\n<pad>\nka\n[\n");
  Vocabulary vocab = Vocabulary::Read(in);
  CHECK(vocab.blank_surface() == "<pad>");
  CHECK(vocab.blank_id() == 0);
  CHECK(vocab.token(2).kind == TokenKind::kProsody);

  std::ostringstream out;
  vocab.Write(out);
  std::istringstream back(out.str());
  Vocabulary again = Vocabulary::Read(back);
  CHECK(again.size() == vocab.size());
  CHECK(again.blank_surface() == "<pad>");
}

TEST_CASE("parse_mixed resolves surfaces in order") {
  auto vocab = TestVocab();
  MixedLabelSequence seq = MixedLabelSequence::Parse("ka [ ga ku", *vocab);
  REQUIRE(seq.size() == 4);
  CHECK(seq.token(0) == MakePhoneme("ka"));
  CHECK(seq.token(1) == MakeProsody("["));
  CHECK(seq.token(2) == MakePhoneme("ga"));
  CHECK(seq.token(3) == MakePhoneme("ku"));
}

TEST_CASE("parse_mixed handles the empty line") {
  auto vocab = TestVocab();
  CHECK(MixedLabelSequence::Parse("", *vocab).empty());
}

TEST_CASE("parse_mixed phoneme-only line has empty prosody stream") {
  auto vocab = TestVocab();
  MixedLabelSequence seq = MixedLabelSequence::Parse("ba ke ga ku", *vocab);
  CHECK(seq.size() == 4);
  CHECK(seq.PhonemeSubsequence().size() == 4);
  CHECK(seq.ProsodySubsequence().empty());
}

TEST_CASE("parse_mixed errors") {
  auto vocab = TestVocab();
  CHECK_THROWS_AS(MixedLabelSequence::Parse("ka zo", *vocab),
                  UnknownTokenError);
  CHECK_THROWS_AS(MixedLabelSequence::Parse("ka <blank>", *vocab),
                  BlankInSequenceError);
}

TEST_CASE("split_streams keeps positions and partitions the sequence") {
  auto vocab = TestVocab();

  StreamSplit split = SplitStreams(Seq(*vocab, "ka ] ga"));
  REQUIRE(split.phonemes.size() == 2);
  REQUIRE(split.prosody.size() == 1);
  CHECK(split.phonemes[0] == std::pair{0, MakePhoneme("ka")});
  CHECK(split.phonemes[1] == std::pair{2, MakePhoneme("ga")});
  CHECK(split.prosody[0] == std::pair{1, MakeProsody("]")});

  StreamSplit empty = SplitStreams(MixedLabelSequence());
  CHECK(empty.phonemes.empty());
  CHECK(empty.prosody.empty());

  StreamSplit mixed = SplitStreams(Seq(*vocab, "_ ka [ ga ] ku"));
  REQUIRE(mixed.prosody.size() == 3);
  CHECK(mixed.prosody[0].first == 0);
  CHECK(mixed.prosody[1].first == 2);
  CHECK(mixed.prosody[2].first == 4);
  CHECK(mixed.phonemes[0].second.surface == "ka");
  CHECK(mixed.phonemes[1].second.surface == "ga");
  CHECK(mixed.phonemes[2].second.surface == "ku");
}

TEST_CASE("round-trip and partition properties on random sequences") {
  auto vocab = TestVocab();
  Rng rng(20260810);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Token> tokens;
    int length = rng.UniformInt(0, 12);
    for (int i = 0; i < length; ++i) {
      int id = rng.UniformInt(1, vocab->size() - 1);  // skip blank
      tokens.push_back(vocab->token(id));
    }
    MixedLabelSequence seq(tokens);
    CHECK(MixedLabelSequence::Parse(seq.ToString(), *vocab) == seq);

    StreamSplit split = SplitStreams(seq);
    CHECK(split.phonemes.size() + split.prosody.size() ==
          static_cast<size_t>(seq.size()));
    // Zipping the streams back by position reproduces the sequence.
    std::vector<Token> rebuilt(seq.size(), Token{});
    for (const auto& [pos, token] : split.phonemes) rebuilt[pos] = token;
    for (const auto& [pos, token] : split.prosody) rebuilt[pos] = token;
    CHECK(MixedLabelSequence(rebuilt) == seq);
  }
}

TEST_CASE("grapheme sequence splits UTF-8 into code points") {
  GraphemeSequence kanji = GraphemeSequence::FromUtf8("化学");
  REQUIRE(kanji.size() == 2);
  CHECK(kanji.unit(0) == "化");
  CHECK(kanji.unit(1) == "学");
  CHECK(kanji.ToString() == "化学");
  CHECK(kanji.Substring(1, 1) == "学");

  GraphemeSequence ascii = GraphemeSequence::FromUtf8("abc");
  CHECK(ascii.size() == 3);

  GraphemeSequence mixed = GraphemeSequence::FromUtf8("a学b");
  REQUIRE(mixed.size() == 3);
  CHECK(mixed.unit(1) == "学");

  CHECK(GraphemeSequence::FromUtf8("").empty());
}
