#include "cruciverba/validator.h"

#include <sstream>

#include "cruciverba/embedded_assets.h"
#include "cruciverba/error.h"
#include "cruciverba/rouge.h"
#include "cruciverba/text.h"

namespace cruciverba {

using nlohmann::json;

namespace {

std::string normalize_apostrophes(std::string s) {
  for (std::string_view curly : {"’", "‘", "`"}) {
    for (auto pos = s.find(curly); pos != std::string::npos; pos = s.find(curly, pos)) s.replace(pos, curly.size(), "'");
  }
  return s;
}

// Strips leading and trailing punctuation, keeping a trailing apostrophe.
std::string bare_token(std::string_view token) {
  std::u32string cps = text::decode(token);
  std::size_t b = 0;
  std::size_t e = cps.size();
  auto word_char = [](char32_t c) { return text::is_letter(c) || text::is_digit(c) || text::is_mark(c); };
  while (b < e && !word_char(cps[b])) ++b;
  while (e > b && !word_char(cps[e - 1]) && cps[e - 1] != U'\'') --e;
  return text::encode(std::u32string_view(cps).substr(b, e - b));
}

bool matches_with_elision(const std::string& token, const std::set<std::string>& forms) {
  if (forms.contains(token)) return true;
  for (const auto& f : forms) {
    if (!f.empty() && f.back() == '\'' && token.size() > f.size() && token.compare(0, f.size(), f) == 0) return true;
  }
  return false;
}

bool within_one_edit(const std::u32string& a, const std::u32string& b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  if (la > lb + 1 || lb > la + 1) return false;
  if (la == lb) {
    int diff = 0;
    for (std::size_t i = 0; i < la; ++i) diff += a[i] != b[i];
    return diff <= 1;
  }
  const std::u32string& shorter = la < lb ? a : b;
  const std::u32string& longer = la < lb ? b : a;
  std::size_t i = 0;
  while (i < shorter.size() && shorter[i] == longer[i]) ++i;
  return shorter.compare(i, std::u32string::npos, longer, i + 1, std::u32string::npos) == 0;
}

}  // namespace

const ItalianLexicon& ItalianLexicon::builtin() {
  static const ItalianLexicon lex = parse(assets::kItalianLexicon);
  return lex;
}

ItalianLexicon ItalianLexicon::parse(std::string_view source) {
  ItalianLexicon lex;
  std::istringstream in{std::string(source)};
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    if (section.empty()) {
      const auto eq = line.find('=');
      if (eq != std::string::npos && text::trim(line.substr(0, eq)) == "version") {
        lex.version = text::trim(line.substr(eq + 1));
        continue;
      }
      throw Error(ErrorCode::kSchemaError, "lexicon line " + std::to_string(line_no) + " outside a section");
    }
    std::set<std::string>* target = nullptr;
    if (section == "definite_articles") {
      target = &lex.definite_articles;
    } else if (section == "copula_forms") {
      target = &lex.copula_forms;
    } else if (section == "determiners") {
      target = &lex.determiner_set;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown lexicon section [" + section + "]");
    }
    for (const auto& w : text::split_whitespace(line)) target->insert(normalize_apostrophes(text::to_lower(text::nfc(w))));
  }
  lex.determiner_set.insert(lex.definite_articles.begin(), lex.definite_articles.end());
  if (lex.definite_articles.empty() || lex.copula_forms.empty()) {
    throw Error(ErrorCode::kSchemaError, "lexicon lacks articles or copula forms");
  }
  return lex;
}

std::string_view to_string(const DetectedStyle& s) { return s ? to_string(*s) : std::string_view("unknown"); }

DetectedStyle classify_structure(std::string_view clue, const ItalianLexicon& lex) {
  const std::string norm = normalize_apostrophes(text::normalize_whitespace(text::to_lower(text::nfc(clue))));
  const auto tokens = text::split_whitespace(norm);
  std::string first;
  for (const auto& t : tokens) {
    first = bare_token(t);
    if (!first.empty()) break;
  }
  if (first.empty()) return std::nullopt;
  if (lex.copula_forms.contains(first)) return ClueStyle::kCopularSentence;
  if (matches_with_elision(first, lex.definite_articles)) return ClueStyle::kDefiniteDeterminerPhrase;
  if (matches_with_elision(first, lex.determiner_set)) return std::nullopt;
  return ClueStyle::kBareNounPhrase;
}

std::string normalize_for_leak(std::string_view s) {
  std::u32string cps = text::decode(text::fold_accents(text::to_lower(text::nfc(s))));
  for (char32_t& c : cps) {
    if (!text::is_letter(c) && !text::is_digit(c)) c = U' ';
  }
  return text::normalize_whitespace(text::encode(cps));
}

bool contains_answer_leak(std::string_view clue, std::string_view answer) {
  const std::string a = normalize_for_leak(answer);
  if (a.empty()) return false;
  const std::string c = normalize_for_leak(clue);
  if (c.find(a) != std::string::npos) return true;
  std::vector<std::u32string> clue_tokens;
  for (const auto& t : text::split_whitespace(c)) clue_tokens.push_back(text::decode(t));
  for (const auto& w : text::split_whitespace(a)) {
    const std::u32string word = text::decode(w);
    if (word.size() < 4) continue;
    for (const auto& t : clue_tokens) {
      if (within_one_edit(word, t)) return true;
    }
  }
  return false;
}

std::string_view to_string(IssueCode code) {
  switch (code) {
    case IssueCode::kAnswerLeak: return "AnswerLeak";
    case IssueCode::kStyleMismatch: return "StyleMismatch";
    case IssueCode::kStyleUnknown: return "StyleUnknown";
    case IssueCode::kTooShort: return "TooShort";
    case IssueCode::kTooLong: return "TooLong";
  }
  return "Unknown";
}

ValidationReport validate(std::string_view clue, std::string_view answer, ClueStyle requested,
                          const ItalianLexicon& lex) {
  ValidationReport r;
  r.requested_style = requested;
  r.detected_style = classify_structure(clue, lex);
  r.style_matches_request = requested == ClueStyle::kUnrestricted || r.detected_style == requested;
  r.answer_leak = contains_answer_leak(clue, answer);
  r.token_count = static_cast<int>(tokenize(clue).size());
  r.length_ok = r.token_count >= kMinClueTokens && r.token_count <= kMaxClueTokens;

  if (r.answer_leak) r.issues.push_back(IssueCode::kAnswerLeak);
  if (!r.detected_style) r.issues.push_back(IssueCode::kStyleUnknown);
  if (!r.style_matches_request) r.issues.push_back(IssueCode::kStyleMismatch);
  if (r.token_count < kMinClueTokens) r.issues.push_back(IssueCode::kTooShort);
  if (r.token_count > kMaxClueTokens) r.issues.push_back(IssueCode::kTooLong);
  return r;
}

json to_json(const ValidationReport& r) {
  json issues = json::array();
  for (auto i : r.issues) issues.push_back(to_string(i));
  return json{{"detected_style", to_string(r.detected_style)},
              {"requested_style", to_string(r.requested_style)},
              {"style_matches_request", r.style_matches_request},
              {"answer_leak", r.answer_leak},
              {"length_ok", r.length_ok},
              {"token_count", r.token_count},
              {"issues", issues},
              {"passed", r.passed()}};
}

ValidationReport validation_from_json(const json& j) {
  try {
    ValidationReport r;
    const std::string detected = j.at("detected_style").get<std::string>();
    if (detected != "unknown") {
      r.detected_style = parse_clue_style(detected);
      if (!r.detected_style) throw Error(ErrorCode::kSchemaError, "unknown detected_style '" + detected + "'");
    }
    const std::string requested = j.at("requested_style").get<std::string>();
    const auto req = parse_clue_style(requested);
    if (!req) throw Error(ErrorCode::kSchemaError, "unknown requested_style '" + requested + "'");
    r.requested_style = *req;
    r.style_matches_request = j.at("style_matches_request").get<bool>();
    r.answer_leak = j.at("answer_leak").get<bool>();
    r.length_ok = j.at("length_ok").get<bool>();
    r.token_count = j.value("token_count", 0);
    const json issues = j.contains("issues") ? j.at("issues") : json::array();
    for (const auto& i : issues) {
      const std::string s = i.get<std::string>();
      bool known = false;
      for (auto code : {IssueCode::kAnswerLeak, IssueCode::kStyleMismatch, IssueCode::kStyleUnknown,
                        IssueCode::kTooShort, IssueCode::kTooLong}) {
        if (to_string(code) == s) {
          r.issues.push_back(code);
          known = true;
        }
      }
      if (!known) throw Error(ErrorCode::kSchemaError, "unknown issue code '" + s + "'");
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("validation report: ") + e.what());
  }
}

const std::vector<RatingLevel>& rating_codebook() {
  static const std::vector<RatingLevel> kCodebook = {
      {'A', "La definizione è coerente e valida: corrisponde correttamente al contesto, alla soluzione e alla "
            "struttura richiesta."},
      {'B', "La definizione è nel complesso accettabile, ma presenta lievi imperfezioni dovute soprattutto a una "
            "formulazione o a una struttura non ottimali."},
      {'C', "La definizione si riferisce direttamente alla soluzione, ma ha un legame vago con il contesto oppure "
            "riporta informazioni corrette espresse in modo inadeguato."},
      {'D', "La definizione si riferisce strettamente al contesto e non basta a identificare la soluzione."},
      {'E', "La definizione è inaccettabile: è sgrammaticata, contiene la soluzione o una sua variante, oppure non "
            "identifica il referente della soluzione."},
  };
  return kCodebook;
}

bool is_valid_rating(char code) { return code >= 'A' && code <= 'E'; }

}  // namespace cruciverba
