#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cruciverba/clue_style.h"

namespace cruciverba {

struct ItalianLexicon {
  std::string version;
  std::set<std::string> definite_articles;
  std::set<std::string> copula_forms;
  // Every determiner, articles included.
  std::set<std::string> determiner_set;

  static const ItalianLexicon& builtin();
  // Parses the plain-text lexicon format of assets/lexicon. Throws SchemaError.
  static ItalianLexicon parse(std::string_view text);
};

// nullopt means Unknown.
using DetectedStyle = std::optional<ClueStyle>;

std::string_view to_string(const DetectedStyle& s);

// First-token cascade on the lowercased clue: copula -> copular sentence;
// definite article (or an "l'" prefix) -> definite DP; anything that is not a
// determiner -> bare NP; otherwise Unknown.
DetectedStyle classify_structure(std::string_view clue, const ItalianLexicon& lex = ItalianLexicon::builtin());

// Lowercase, accents folded, every non-alphanumeric character replaced by a
// space, whitespace collapsed.
std::string normalize_for_leak(std::string_view s);

// True when the normalized answer occurs in the normalized clue, or an answer
// word of at least 4 characters equals a clue token or is one edit away.
bool contains_answer_leak(std::string_view clue, std::string_view answer);

enum class IssueCode { kAnswerLeak, kStyleMismatch, kStyleUnknown, kTooShort, kTooLong };

std::string_view to_string(IssueCode code);

inline constexpr int kMinClueTokens = 4;
inline constexpr int kMaxClueTokens = 55;

struct ValidationReport {
  DetectedStyle detected_style;
  ClueStyle requested_style = ClueStyle::kUnrestricted;
  bool style_matches_request = false;
  bool answer_leak = false;
  bool length_ok = false;
  int token_count = 0;
  std::vector<IssueCode> issues;

  // Length problems are warnings; a leak or a style mismatch fails.
  bool passed() const { return !answer_leak && style_matches_request; }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

nlohmann::json to_json(const ValidationReport& r);
ValidationReport validation_from_json(const nlohmann::json& j);

ValidationReport validate(std::string_view clue, std::string_view answer, ClueStyle requested,
                          const ItalianLexicon& lex = ItalianLexicon::builtin());

struct RatingLevel {
  char code;
  std::string_view description;
};

// A (best) through E.
const std::vector<RatingLevel>& rating_codebook();
bool is_valid_rating(char code);

}  // namespace cruciverba
