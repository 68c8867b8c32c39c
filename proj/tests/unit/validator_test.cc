#include "cruciverba/validator.h"

#include <gtest/gtest.h>

#include <random>

#include "clue_fixtures.h"
#include "cruciverba/error.h"
#include "cruciverba/util.h"

namespace cruciverba {
namespace {

TEST(Lexicon, BuiltinSets) {
  const auto& lex = ItalianLexicon::builtin();
  for (const char* a : {"il", "lo", "la", "i", "gli", "le", "l'"}) EXPECT_TRUE(lex.definite_articles.contains(a)) << a;
  for (const char* c : {"è", "sono", "era", "erano", "fu", "furono"}) EXPECT_TRUE(lex.copula_forms.contains(c)) << c;
  for (const char* d : {"un", "uno", "una", "un'", "questo", "quel"}) EXPECT_TRUE(lex.determiner_set.contains(d)) << d;
  for (const auto& a : lex.definite_articles) EXPECT_TRUE(lex.determiner_set.contains(a)) << a;
  EXPECT_FALSE(lex.version.empty());
}

TEST(Lexicon, ShippedAssetMatchesBuiltin) {
  const auto lex = ItalianLexicon::parse(
      read_file(std::filesystem::path(CRUCIVERBA_TEST_DATA_DIR) / "../../assets/lexicon/it_lexicon_v1.txt"));
  EXPECT_EQ(lex.definite_articles, ItalianLexicon::builtin().definite_articles);
  EXPECT_EQ(lex.copula_forms, ItalianLexicon::builtin().copula_forms);
  EXPECT_EQ(lex.determiner_set, ItalianLexicon::builtin().determiner_set);
}

TEST(Lexicon, ParseRejectsGarbage) {
  EXPECT_THROW(ItalianLexicon::parse("[nonsense]\nfoo\n"), Error);
}

TEST(ClassifyStructure, CanonicalExamples) {
  for (const auto& c : testing::structure_cases()) {
    EXPECT_EQ(classify_structure(c.clue), c.expected) << c.clue;
  }
}

TEST(ClassifyStructure, IndefiniteIsUnknown) {
  EXPECT_EQ(classify_structure("Un animale domestico"), std::nullopt);
  EXPECT_EQ(classify_structure("Questa città"), std::nullopt);
  EXPECT_EQ(to_string(classify_structure("Una città")), "unknown");
}

TEST(ClassifyStructure, ElisionAndCase) {
  EXPECT_EQ(classify_structure("L'isola più grande del Mediterraneo"), ClueStyle::kDefiniteDeterminerPhrase);
  EXPECT_EQ(classify_structure("L’isola più grande"), ClueStyle::kDefiniteDeterminerPhrase);
  EXPECT_EQ(classify_structure("GLI abitanti di Roma"), ClueStyle::kDefiniteDeterminerPhrase);
  EXPECT_EQ(classify_structure("Un'isola greca"), std::nullopt);
  EXPECT_EQ(classify_structure("  «Sono i popoli nomadi»"), ClueStyle::kCopularSentence);
  EXPECT_EQ(classify_structure("E\xCC\x80 una salsa"), ClueStyle::kCopularSentence);
  EXPECT_EQ(classify_structure("Fu la capitale dell'impero"), ClueStyle::kCopularSentence);
}

TEST(ClassifyStructure, TotalAndDeterministic) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> words = {"il", "un", "è", "casa", "l'", "gli", "rosso", ",", "12", "", " "};
  for (int i = 0; i < 500; ++i) {
    std::string clue;
    for (int k = 0; k < static_cast<int>(rng() % 5); ++k) clue += words[rng() % words.size()] + " ";
    EXPECT_EQ(classify_structure(clue), classify_structure(clue));
  }
  EXPECT_EQ(classify_structure(""), std::nullopt);
}

TEST(AnswerLeak, Examples) {
  EXPECT_TRUE(contains_answer_leak("Terrier di proporzioni minuscole, cacciatore eccezionale", "Patterdale Terrier"));
  EXPECT_FALSE(
      contains_answer_leak("È il sesto album in studio del gruppo rock inglese The Who", "Quadrophenia"));
  EXPECT_TRUE(contains_answer_leak("Roma", "Roma"));
}

TEST(AnswerLeak, VariationsAndFolding) {
  EXPECT_TRUE(contains_answer_leak("La città di Romà", "Roma"));
  EXPECT_TRUE(contains_answer_leak("Gli uzbeki abitano l'UZBEKISTAN", "Uzbekistan"));
  EXPECT_TRUE(contains_answer_leak("Ha per capitale Tashkant", "Tashkent"));
  EXPECT_TRUE(contains_answer_leak("Famosi i suoi terriers", "Patterdale Terrier"));
  EXPECT_FALSE(contains_answer_leak("Gruppo rock inglese", "The Who"));
  EXPECT_FALSE(contains_answer_leak("Il fiume di Parigi", "Senna"));
}

TEST(AnswerLeak, SubstringSoundness) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> answers = {"Roma", "South Ribble", "Via della seta", "città", "Oz", "Uzbekistan"};
  const std::vector<std::string> filler = {"la", "capitale", "di", "un", "paese", "antico", "con", "è", "—", ","};
  for (int i = 0; i < 1000; ++i) {
    const std::string& answer = answers[rng() % answers.size()];
    std::string clue;
    const int before = static_cast<int>(rng() % 4);
    const int after = static_cast<int>(rng() % 4);
    for (int k = 0; k < before; ++k) clue += filler[rng() % filler.size()] + " ";
    clue += (rng() % 2) ? answer : std::string("«") + answer + "»";
    for (int k = 0; k < after; ++k) clue += " " + filler[rng() % filler.size()];
    ASSERT_TRUE(contains_answer_leak(clue, answer)) << clue;
  }
}

TEST(Validate, CopularExample) {
  const auto& c = testing::structure_cases()[2];
  const ValidationReport ok = validate(c.clue, c.answer, ClueStyle::kCopularSentence);
  EXPECT_TRUE(ok.passed());
  EXPECT_TRUE(ok.style_matches_request);
  EXPECT_TRUE(ok.issues.empty());
  const ValidationReport mismatch = validate(c.clue, c.answer, ClueStyle::kBareNounPhrase);
  EXPECT_FALSE(mismatch.style_matches_request);
  EXPECT_FALSE(mismatch.passed());
  EXPECT_EQ(mismatch.issues, std::vector<IssueCode>{IssueCode::kStyleMismatch});
}

TEST(Validate, RatedExamples) {
  for (const auto& c : testing::rated_cases()) {
    const ValidationReport r = validate(c.clue, c.answer, ClueStyle::kUnrestricted);
    EXPECT_EQ(r.detected_style, c.detected) << c.clue;
    EXPECT_EQ(r.answer_leak, c.leak) << c.clue;
    EXPECT_EQ(r.passed(), c.passes_unrestricted) << c.clue;
    EXPECT_EQ(r.length_ok, c.length_ok) << c.clue;
    EXPECT_TRUE(r.style_matches_request);
  }
  const auto& e = testing::rated_cases().back();
  const ValidationReport r = validate(e.clue, e.answer, ClueStyle::kUnrestricted);
  EXPECT_EQ(r.issues, std::vector<IssueCode>{IssueCode::kAnswerLeak});
}

TEST(Validate, LeakNeverPasses) {
  for (ClueStyle s : kAllClueStyles) {
    EXPECT_FALSE(validate("Roma, la capitale", "Roma", s).passed());
    EXPECT_FALSE(validate("La città di Roma", "Roma", s).passed());
  }
}

TEST(Validate, LengthWarnings) {
  const ValidationReport tiny = validate("Capitale", "Roma", ClueStyle::kUnrestricted);
  EXPECT_FALSE(tiny.length_ok);
  EXPECT_TRUE(tiny.passed());
  EXPECT_EQ(tiny.issues, std::vector<IssueCode>{IssueCode::kTooShort});
  std::string long_clue = "Città";
  for (int i = 0; i < 60; ++i) long_clue += " antica";
  const ValidationReport big = validate(long_clue, "Roma", ClueStyle::kUnrestricted);
  EXPECT_EQ(big.token_count, 61);
  EXPECT_EQ(big.issues, std::vector<IssueCode>{IssueCode::kTooLong});
}

TEST(Validate, JsonRoundTrip) {
  for (const auto& c : testing::rated_cases()) {
    for (ClueStyle s : kAllClueStyles) {
      const ValidationReport r = validate(c.clue, c.answer, s);
      EXPECT_EQ(validation_from_json(to_json(r)), r);
    }
  }
  const ValidationReport unknown = validate("Un cane", "Fido", ClueStyle::kBareNounPhrase);
  EXPECT_EQ(to_json(unknown).at("detected_style"), "unknown");
  EXPECT_EQ(validation_from_json(to_json(unknown)), unknown);
}

TEST(RatingCodebook, FiveOrderedLevels) {
  const auto& book = rating_codebook();
  ASSERT_EQ(book.size(), 5u);
  EXPECT_EQ(book.front().code, 'A');
  EXPECT_EQ(book.back().code, 'E');
  for (std::size_t i = 0; i < book.size(); ++i) {
    EXPECT_EQ(book[i].code, static_cast<char>('A' + i));
    EXPECT_FALSE(book[i].description.empty());
  }
  EXPECT_EQ(&rating_codebook(), &book);
  EXPECT_TRUE(is_valid_rating('C'));
  EXPECT_FALSE(is_valid_rating('F'));
  EXPECT_FALSE(is_valid_rating('a'));
}

}  // namespace
}  // namespace cruciverba
