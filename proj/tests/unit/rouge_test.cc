#include "cruciverba/rouge.h"

#include <gtest/gtest.h>

#include <random>

#include "cruciverba/error.h"
#include "rouge_fixture.h"
#include "rouge_oracle.h"

namespace cruciverba {
namespace {

constexpr double kTol = 1e-12;

TokenList random_tokens(std::mt19937_64& rng, int max_len, int vocab) {
  TokenList t(rng() % (max_len + 1));
  for (auto& s : t) s = std::string(1, static_cast<char>('a' + rng() % vocab));
  return t;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("È una salsa!"), (TokenList{"è", "una", "salsa"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("Harissa, Harissa"), (TokenList{"harissa", "harissa"}));
  EXPECT_EQ(tokenize("dell'Asia 1991"), (TokenList{"dell", "asia", "1991"}));
  EXPECT_EQ(tokenize("citta\xCC\x80"), TokenList{"città"});
}

TEST(RougeN, Examples) {
  const TokenList cand{"a", "b", "c"};
  const TokenList ref{"a", "c", "d"};
  const RougeScore r1 = rouge_n(cand, ref, 1);
  EXPECT_NEAR(r1.precision, 2.0 / 3, kTol);
  EXPECT_NEAR(r1.recall, 2.0 / 3, kTol);
  EXPECT_NEAR(r1.f1, 2.0 / 3, kTol);
  EXPECT_EQ(rouge_n(cand, ref, 2).f1, 0.0);
  EXPECT_EQ(rouge_n(cand, cand, 3).f1, 1.0);
  const RougeScore empty = rouge_n({}, {"a"}, 1);
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.recall, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
}

TEST(RougeN, ClipsRepeatedNgrams) {
  const RougeScore s = rouge_n({"a", "a", "a"}, {"a"}, 1);
  EXPECT_NEAR(s.precision, 1.0 / 3, kTol);
  EXPECT_NEAR(s.recall, 1.0, kTol);
}

TEST(RougeL, Examples) {
  const RougeScore s = rouge_l({"a", "b", "c"}, {"a", "c", "d"});
  EXPECT_NEAR(s.precision, 2.0 / 3, kTol);
  EXPECT_NEAR(s.recall, 2.0 / 3, kTol);
  EXPECT_NEAR(s.f1, 2.0 / 3, kTol);
  EXPECT_EQ(rouge_l({"a", "b"}, {"c", "d"}).f1, 0.0);
  const RougeScore prefix = rouge_l({"a", "b"}, {"a", "b", "c", "d", "e"});
  EXPECT_EQ(prefix.precision, 1.0);
  EXPECT_NEAR(prefix.recall, 2.0 / 5, kTol);
}

TEST(MakeScore, HarmonicMean) {
  EXPECT_EQ(make_score(0, 0).f1, 0.0);
  EXPECT_NEAR(make_score(0.5, 1.0).f1, 2.0 / 3, kTol);
}

TEST(RougeProperties, BoundsSymmetryAndLongN) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const TokenList a = random_tokens(rng, 10, 4);
    const TokenList b = random_tokens(rng, 10, 4);
    for (int n = 1; n <= 4; ++n) {
      const RougeScore s = rouge_n(a, b, n);
      const RougeScore t = rouge_n(b, a, n);
      for (double v : {s.precision, s.recall, s.f1}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      ASSERT_NEAR(s.precision, t.recall, kTol);
      ASSERT_NEAR(s.f1, t.f1, kTol);
      if (static_cast<std::size_t>(n) > std::min(a.size(), b.size())) ASSERT_EQ(s.f1, 0.0);
    }
    const RougeScore l = rouge_l(a, b);
    const RougeScore m = rouge_l(b, a);
    ASSERT_GE(l.f1, 0.0);
    ASSERT_LE(l.f1, 1.0);
    ASSERT_NEAR(l.precision, m.recall, kTol);
    ASSERT_NEAR(l.f1, m.f1, kTol);
  }
}

TEST(RougeProperties, MatchesBruteForceOracle) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 500; ++i) {
    const TokenList a = random_tokens(rng, 8, 3 + static_cast<int>(rng() % 4));
    const TokenList b = random_tokens(rng, 8, 3 + static_cast<int>(rng() % 4));
    ASSERT_EQ(lcs_length(a, b), oracle::lcs_by_subsets(a, b));
    ASSERT_NEAR(rouge_l(a, b).f1, oracle::rouge_l(a, b).f, kTol);
    for (int n = 1; n <= 3; ++n) ASSERT_NEAR(rouge_n(a, b, n).f1, oracle::rouge_n(a, b, n).f, kTol);
  }
}

TEST(ScoreCorpus, Examples) {
  const CorpusReport same = score_corpus({{"il fiume di Roma", "il fiume di Roma"}});
  EXPECT_EQ(same.mean_rouge1, 1.0);
  EXPECT_EQ(same.mean_rouge2, 1.0);
  EXPECT_EQ(same.mean_rougeL, 1.0);
  EXPECT_EQ(same.pair_count, 1u);
  const CorpusReport half = score_corpus({{"alfa beta", "gamma delta"}, {"alfa beta", "alfa beta"}});
  EXPECT_NEAR(half.mean_rouge1, 0.5, kTol);
  EXPECT_NEAR(half.mean_rougeL, 0.5, kTol);
  EXPECT_EQ(code_of([] { score_corpus({}); }), ErrorCode::kEmptyCorpus);
}

TEST(ScoreCorpus, PinnedTwentyPairFixture) {
  const auto pairs = testing::load_rouge_pairs();
  ASSERT_EQ(pairs.size(), 20u);
  const CorpusReport got = score_corpus(pairs);
  const CorpusReport want = testing::expected_means("pairs20");
  EXPECT_NEAR(got.mean_rouge1, want.mean_rouge1, kTol);
  EXPECT_NEAR(got.mean_rouge2, want.mean_rouge2, kTol);
  EXPECT_NEAR(got.mean_rougeL, want.mean_rougeL, kTol);
  EXPECT_EQ(got.pair_count, 20u);
}

TEST(CompareCluesets, IdentityDisjointAndFixture) {
  const std::vector<KeyedClue> a{{"k1", "il fiume di Roma"}, {"k2", "vulcano siciliano"}};
  const std::vector<KeyedClue> b{{"k2", "vulcano siciliano"}, {"k1", "il fiume di Roma"}};
  const CorpusReport same = compare_cluesets(a, b);
  EXPECT_EQ(same.mean_rouge1, 1.0);
  EXPECT_EQ(same.mean_rougeL, 1.0);
  const CorpusReport disjoint = compare_cluesets(a, {{"k1", "alfa beta"}, {"k2", "gamma"}});
  EXPECT_EQ(disjoint.mean_rouge1, 0.0);
  EXPECT_EQ(disjoint.mean_rouge2, 0.0);
  EXPECT_EQ(disjoint.mean_rougeL, 0.0);

  const auto [set_a, set_b] = testing::load_two_models();
  const CorpusReport got = compare_cluesets(set_a, set_b);
  const CorpusReport want = testing::expected_means("two_models");
  EXPECT_NEAR(got.mean_rouge1, want.mean_rouge1, kTol);
  EXPECT_NEAR(got.mean_rouge2, want.mean_rouge2, kTol);
  EXPECT_NEAR(got.mean_rougeL, want.mean_rougeL, kTol);
}

TEST(CompareCluesets, KeyMismatch) {
  EXPECT_EQ(code_of([] { compare_cluesets({{"k1", "x"}}, {{"k2", "x"}}); }), ErrorCode::kKeyMismatch);
  EXPECT_EQ(code_of([] { compare_cluesets({{"k1", "x"}, {"k1", "y"}}, {{"k1", "x"}, {"k2", "y"}}); }),
            ErrorCode::kKeyMismatch);
  EXPECT_EQ(code_of([] { compare_cluesets({{"k1", "x"}}, {{"k1", "x"}, {"k2", "y"}}); }), ErrorCode::kKeyMismatch);
  EXPECT_EQ(code_of([] { compare_cluesets({}, {}); }), ErrorCode::kEmptyCorpus);
}

TEST(Report, FormattingAndJson) {
  CorpusReport r{0.5, 0.25, 0.125, 4};
  const auto j = to_json(r);
  EXPECT_EQ(j.at("mean_rouge1"), 0.5);
  EXPECT_EQ(j.at("pair_count"), 4);
  const std::string row = format_report_row("test", r);
  EXPECT_NE(row.find("0.500"), std::string::npos);
  EXPECT_NE(row.find("0.125"), std::string::npos);
  EXPECT_NE(format_report_header().find("ROUGE-L"), std::string::npos);
}

}  // namespace
}  // namespace cruciverba
