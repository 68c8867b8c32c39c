#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cruciverba {

enum class ClueStyle { kUnrestricted, kBareNounPhrase, kDefiniteDeterminerPhrase, kCopularSentence };

inline constexpr std::array<ClueStyle, 4> kAllClueStyles = {
    ClueStyle::kUnrestricted, ClueStyle::kBareNounPhrase, ClueStyle::kDefiniteDeterminerPhrase,
    ClueStyle::kCopularSentence};

// Stable slugs used in files, JSON and the CLI: "unrestricted", "bare_np",
// "definite_dp", "copular".
std::string_view to_string(ClueStyle style);
std::optional<ClueStyle> parse_clue_style(std::string_view slug);

// Italian instruction fragment describing the structure a clue must have.
std::string_view style_descriptor(ClueStyle style);

// The worked example embedded in the copular prompt.
inline constexpr std::string_view kCopularExemplar = "è una salsa piccante tipica della Tunisia";

struct PromptTemplate {
  ClueStyle style = ClueStyle::kUnrestricted;
  std::string template_text;
  bool includes_exemplar = false;
};

// The four prompt templates. Template files may contain a {structure}
// placeholder, expanded to style_descriptor() at load time; after that each
// of {context}, {keyword} and {n_clues} must occur exactly once.
class PromptLibrary {
 public:
  // Templates compiled in from assets/prompts/v1.
  static const PromptLibrary& builtin();
  // Reads <dir>/<slug>.txt for every style. Throws MissingPlaceholder or IoError.
  static PromptLibrary load(const std::filesystem::path& dir);
  static PromptTemplate make_template(ClueStyle style, std::string_view raw_text);

  const PromptTemplate& get(ClueStyle style) const;

  // Errors: EmptyContext, InvalidArgument (keyword fails filter_keyword or n_clues < 1).
  std::string render(std::string_view context, std::string_view keyword, int n_clues, ClueStyle style) const;

 private:
  std::array<PromptTemplate, 4> templates_;
};

inline constexpr std::string_view kPromptSetVersion = "v1";
inline constexpr int kDefaultClueCount = 3;

std::string render_prompt(std::string_view context, std::string_view keyword, int n_clues, ClueStyle style);

// Extracts up to expected_n clues from a numbered or bulleted list. When any
// line carries a list marker only marked lines are taken, so a preamble such
// as "Ecco le definizioni:" is ignored. Throws UnparseableResponse when
// nothing can be extracted from non-blank output.
std::vector<std::string> parse_clue_list(std::string_view raw_llm_output, int expected_n);

}  // namespace cruciverba
