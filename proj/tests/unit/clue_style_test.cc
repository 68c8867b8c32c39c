#include "cruciverba/clue_style.h"

#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "cruciverba/error.h"
#include "test_support.h"

namespace cruciverba {
namespace {

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
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

TEST(ClueStyle, SlugsRoundTrip) {
  EXPECT_EQ(kAllClueStyles.size(), 4u);
  for (ClueStyle s : kAllClueStyles) EXPECT_EQ(parse_clue_style(to_string(s)), s);
  EXPECT_EQ(to_string(ClueStyle::kBareNounPhrase), "bare_np");
  EXPECT_FALSE(parse_clue_style("fill_in"));
}

TEST(StyleDescriptor, Content) {
  const std::string dp(style_descriptor(ClueStyle::kDefiniteDeterminerPhrase));
  EXPECT_NE(dp.find("articolo determinativo"), std::string::npos);
  const std::string free_form(style_descriptor(ClueStyle::kUnrestricted));
  EXPECT_NE(free_form.find("Non è richiesta alcuna struttura"), std::string::npos);
  const std::string cop(style_descriptor(ClueStyle::kCopularSentence));
  EXPECT_NE(cop.find("verbo essere"), std::string::npos);
  EXPECT_NE(cop.find("soggetto sottinteso"), std::string::npos);
  const std::string np(style_descriptor(ClueStyle::kBareNounPhrase));
  EXPECT_NE(np.find("senza determinante"), std::string::npos);
}

TEST(RenderPrompt, UnrestrictedGolden) {
  const std::string golden = read_file(testing::data_dir() / "golden/prompt_unrestricted.txt");
  EXPECT_EQ(render_prompt("X", "Roma", 3, ClueStyle::kUnrestricted), golden);
}

TEST(RenderPrompt, CopularEmbedsExemplar) {
  const std::string out = render_prompt("X", "Roma", 3, ClueStyle::kCopularSentence);
  EXPECT_NE(out.find(kCopularExemplar), std::string::npos);
  for (ClueStyle s : kAllClueStyles) {
    EXPECT_EQ(PromptLibrary::builtin().get(s).includes_exemplar, s == ClueStyle::kCopularSentence);
    if (s != ClueStyle::kCopularSentence) {
      EXPECT_EQ(render_prompt("X", "Roma", 3, s).find(kCopularExemplar), std::string::npos);
    }
  }
}

TEST(RenderPrompt, Deterministic) {
  for (ClueStyle s : kAllClueStyles) {
    EXPECT_EQ(render_prompt("Testo di prova.", "Roma", 3, s), render_prompt("Testo di prova.", "Roma", 3, s));
  }
}

TEST(RenderPrompt, ContextAndKeywordExactlyOnce) {
  std::mt19937_64 rng(11);
  const std::string letters = "qwxyzkj";
  auto word = [&](int len) {
    std::string w;
    for (int i = 0; i < len; ++i) w += letters[rng() % letters.size()];
    return w;
  };
  for (int i = 0; i < 200; ++i) {
    const std::string keyword = "Kw" + word(4);
    std::string context = "Ctx";
    for (int k = 0; k < 1 + static_cast<int>(rng() % 30); ++k) context += " " + word(1 + static_cast<int>(rng() % 8));
    for (ClueStyle s : kAllClueStyles) {
      const std::string out = render_prompt(context, keyword, 1 + static_cast<int>(rng() % 20), s);
      ASSERT_EQ(occurrences(out, context), 1u);
      ASSERT_EQ(occurrences(out, keyword), 1u);
    }
  }
}

TEST(RenderPrompt, Errors) {
  EXPECT_EQ(code_of([] { render_prompt("", "Roma", 3, ClueStyle::kUnrestricted); }), ErrorCode::kEmptyContext);
  EXPECT_EQ(code_of([] { render_prompt("  \n", "Roma", 3, ClueStyle::kUnrestricted); }), ErrorCode::kEmptyContext);
  EXPECT_EQ(code_of([] { render_prompt("X", "R2-D2", 3, ClueStyle::kUnrestricted); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { render_prompt("X", "Roma", 0, ClueStyle::kUnrestricted); }), ErrorCode::kInvalidArgument);
}

TEST(PromptTemplate, PlaceholderAccounting) {
  EXPECT_NO_THROW(PromptLibrary::make_template(ClueStyle::kUnrestricted, "{context} {keyword} {n_clues}"));
  EXPECT_EQ(code_of([] { PromptLibrary::make_template(ClueStyle::kUnrestricted, "{context} {keyword}"); }),
            ErrorCode::kMissingPlaceholder);
  EXPECT_EQ(code_of([] {
              PromptLibrary::make_template(ClueStyle::kUnrestricted, "{context} {context} {keyword} {n_clues}");
            }),
            ErrorCode::kMissingPlaceholder);
  const auto t = PromptLibrary::make_template(ClueStyle::kBareNounPhrase, "{structure}|{context}{keyword}{n_clues}");
  EXPECT_EQ(t.template_text.rfind(style_descriptor(ClueStyle::kBareNounPhrase), 0), 0u);
}

TEST(PromptLibrary, LoadFromDirectory) {
  testing::TempDir dir;
  for (ClueStyle s : kAllClueStyles) {
    write_file_atomic(dir / (std::string(to_string(s)) + ".txt"),
                      std::string(to_string(s)) + ": {keyword} / {n_clues} / {context}");
  }
  const PromptLibrary lib = PromptLibrary::load(dir.path());
  EXPECT_EQ(lib.render("ctx", "Roma", 2, ClueStyle::kCopularSentence), "copular: Roma / 2 / ctx");
  std::filesystem::remove(dir / "copular.txt");
  EXPECT_EQ(code_of([&] { PromptLibrary::load(dir.path()); }), ErrorCode::kIoError);
}

TEST(PromptLibrary, ShippedAssetsMatchBuiltin) {
  const PromptLibrary lib = PromptLibrary::load(std::filesystem::path(CRUCIVERBA_TEST_DATA_DIR) / "../../assets/prompts/v1");
  for (ClueStyle s : kAllClueStyles) {
    EXPECT_EQ(lib.get(s).template_text, PromptLibrary::builtin().get(s).template_text);
  }
}

TEST(ParseClueList, Examples) {
  EXPECT_EQ(parse_clue_list("1. A\n2. B\n3. C", 3), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(parse_clue_list("- solo una riga", 3), std::vector<std::string>{"solo una riga"});
  EXPECT_EQ(code_of([] { parse_clue_list("", 3); }), ErrorCode::kUnparseableResponse);
  EXPECT_EQ(code_of([] { parse_clue_list("  \n---\n", 3); }), ErrorCode::kUnparseableResponse);
}

TEST(ParseClueList, StripsQuotesPreambleAndExtras) {
  const std::string raw =
      "Ecco le definizioni richieste:\n\n1) «Stato dell'Asia centrale»\n2. \"Paese del cotone\"\n(3) **Terra di "
      "Samarcanda**\n4. In più\n";
  EXPECT_EQ(parse_clue_list(raw, 3),
            (std::vector<std::string>{"Stato dell'Asia centrale", "Paese del cotone", "Terra di Samarcanda"}));
}

TEST(ParseClueList, UnmarkedLinesWhenNoMarkers) {
  EXPECT_EQ(parse_clue_list("Prima\nSeconda\n", 5), (std::vector<std::string>{"Prima", "Seconda"}));
}

TEST(ParseClueList, NeverReturnsListMarkers) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> markers = {"1. ", "2) ", "- ", "* ", "• ", "(4) ", "10: "};
  const std::regex leading(R"(^\s*(?:[-*+•–—·]\s|\(?\d{1,3}[.):-]))");
  for (int i = 0; i < 300; ++i) {
    std::string raw;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) {
      raw += markers[rng() % markers.size()];
      if (rng() % 3 == 0) raw += markers[rng() % markers.size()];
      raw += "voce " + std::to_string(rng() % 1000) + "\n";
    }
    for (const auto& clue : parse_clue_list(raw, 20)) {
      ASSERT_FALSE(std::regex_search(clue, leading)) << clue;
    }
  }
}

TEST(ParseClueList, RoundTripsNumberedLists) {
  for (int k = 1; k <= 20; ++k) {
    std::vector<std::string> items;
    std::string raw;
    for (int i = 1; i <= k; ++i) {
      items.push_back("Definizione numero " + std::to_string(i * 7) + " del capoluogo");
      raw += std::to_string(i) + ". " + items.back() + "\n";
    }
    EXPECT_EQ(parse_clue_list(raw, k), items);
    EXPECT_EQ(parse_clue_list(raw, 20), items);
  }
}

}  // namespace
}  // namespace cruciverba
