// Copyright 2026 The preorder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

namespace preorder {
namespace {

std::vector<Sentence> S(std::initializer_list<const char*> lines) {
  std::vector<Sentence> out;
  for (const char* l : lines) out.push_back(split_ws(l));
  return out;
}

TEST(ModifiedPrecision, Clipping) {
  EXPECT_EQ(modified_precision(S({"the the the"}), S({"the cat"}), 1), (NgramMatch{1, 3}));
  EXPECT_EQ(modified_precision(S({"a b c"}), S({"a b c"}), 1), (NgramMatch{3, 3}));
  EXPECT_EQ(modified_precision(S({"a b"}), S({"a b"}), 3), (NgramMatch{0, 0}));
  EXPECT_THROW(modified_precision(S({"a"}), S({"a", "b"}), 1), InputError);
}

TEST(CorpusBleu, WorkedExample) {
  // Reference value 0.5789300674674098 from an external implementation
  // (nltk corpus_bleu, default weights).
  auto r = corpus_bleu(S({"the cat sat on mat"}), S({"the cat sat on the mat"}));
  EXPECT_NEAR(r.score, 0.5789300674674098, 1e-12);
  EXPECT_DOUBLE_EQ(r.precisions[0], 1.0);
  EXPECT_DOUBLE_EQ(r.precisions[1], 0.75);
  EXPECT_DOUBLE_EQ(r.precisions[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.precisions[3], 0.5);
  EXPECT_NEAR(r.brevity_penalty, std::exp(1.0 - 6.0 / 5.0), 1e-15);
  EXPECT_EQ(r.to_string(), "BLEU = 57.89 (100.0/75.0/66.7/50.0, BP=0.819, ratio=0.833, hyp_len=5, ref_len=6)");
}

TEST(CorpusBleu, IdentityAndDisjoint) {
  auto x = S({"a b c d e", "f g h i"});
  EXPECT_EQ(corpus_bleu(x, x).score, 1.0);
  auto r = corpus_bleu(S({"a b c d"}), S({"w x y z"}));
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.precisions[0], 0.0);
  EXPECT_EQ(r.precisions.size(), 4u);
}

TEST(CorpusBleu, ShortSegmentsHaveVacuousHigherOrders) {
  auto x = S({"a b", "c"});
  auto r = corpus_bleu(x, x);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.counts[3], (NgramMatch{0, 0}));
  EXPECT_EQ(r.precisions[3], 1.0);
  // length is still penalised
  EXPECT_NEAR(corpus_bleu(S({"a"}), S({"a b c"})).score, std::exp(1.0 - 3.0), 1e-15);
}

TEST(CorpusBleu, EmptyHypothesisAndErrors) {
  auto r = corpus_bleu({Sentence{}}, S({"a b"}));
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.brevity_penalty, 0.0);
  EXPECT_THROW(corpus_bleu({}, {}), InputError);
  EXPECT_THROW(corpus_bleu(S({"a"}), S({"a"}), 0), InputError);
}

TEST(CorpusBleuProperty, OracleBoundsAndSegmentOrder) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> len(1, 12), word(0, 5), segs(1, 6);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<Sentence> h, r;
    int n = segs(rng);
    for (int i = 0; i < n; ++i) {
      Sentence a, b;
      for (int k = len(rng); k > 0; --k) a.push_back("w" + std::to_string(word(rng)));
      for (int k = len(rng); k > 0; --k) b.push_back("w" + std::to_string(word(rng)));
      h.push_back(a);
      r.push_back(b);
    }
    auto rep = corpus_bleu(h, r);
    ASSERT_NEAR(rep.score, testing::oracle_corpus_bleu(h, r, 4), 1e-12);
    ASSERT_GE(rep.score, 0.0);
    ASSERT_LE(rep.score, 1.0);
    if (rep.hyp_len >= rep.ref_len) {
      ASSERT_EQ(rep.brevity_penalty, 1.0);
    }
    ASSERT_EQ(corpus_bleu(r, r).score, 1.0);
    std::vector<std::size_t> idx(h.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Sentence> h2, r2;
    for (auto i : idx) {
      h2.push_back(h[i]);
      r2.push_back(r[i]);
    }
    ASSERT_NEAR(corpus_bleu(h2, r2).score, rep.score, 1e-15);
  }
}

TEST(CorpusBleuProperty, MonotoneInEachPrecision) {
  // With BP and the other precisions fixed, more matches at any order never
  // lowers the score: hyp "a b c d e f" against refs that agree on longer
  // prefixes.
  auto ref = S({"a b c d e f"});
  double last = -1.0;
  for (const char* h : {"a b c x y z", "a b c d y z", "a b c d e z", "a b c d e f"}) {
    double s = corpus_bleu(S({h}), ref).score;
    EXPECT_GE(s, last);
    last = s;
  }
}

TEST(SentenceBleu, SmoothedByHand) {
  // p1 = 1/2, p2 = (0+1)/(1+1), p3 = (0+1)/(0+1), p4 = (0+1)/(0+1)
  double expect = std::exp((std::log(0.5) + std::log(0.5) + 0.0 + 0.0) / 4.0);
  EXPECT_NEAR(sentence_bleu_smoothed({"a", "b"}, {"a", "c"}), expect, 1e-15);
  EXPECT_EQ(sentence_bleu_smoothed({"x", "y"}, {"a", "b"}), 0.0);
}

TEST(SentenceBleu, IdentityIsMaximalAmongEqualLength) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> word(0, 4);
  Sentence ref{"a", "b", "c", "d", "e"};
  double top = sentence_bleu_smoothed(ref, ref);
  for (int iter = 0; iter < 500; ++iter) {
    Sentence h;
    for (int k = 0; k < 5; ++k) h.push_back(std::string(1, static_cast<char>('a' + word(rng))));
    ASSERT_LE(sentence_bleu_smoothed(h, ref), top + 1e-15);
  }
}

}  // namespace
}  // namespace preorder
