#include "cruciverba/clue_style.h"

#include <array>
#include <cctype>
#include <utility>
#include <sstream>

#include "cruciverba/curation.h"
#include "cruciverba/embedded_assets.h"
#include "cruciverba/error.h"
#include "cruciverba/text.h"
#include "cruciverba/util.h"

namespace cruciverba {
namespace {

constexpr std::string_view kContext = "{context}";
constexpr std::string_view kKeyword = "{keyword}";
constexpr std::string_view kCount = "{n_clues}";
constexpr std::string_view kStructure = "{structure}";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::size_t index_of(ClueStyle style) { return static_cast<std::size_t>(style); }

// Length in bytes of a list marker at the start of `s`, or 0.
std::size_t marker_length(std::string_view s) {
  for (std::string_view bullet : {"- ", "* ", "+ ", "• ", "– ", "— ", "· "}) {
    if (s.substr(0, bullet.size()) == bullet) return bullet.size();
  }
  std::size_t i = 0;
  const bool paren = !s.empty() && s[0] == '(';
  if (paren) ++i;
  const std::size_t digits_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == digits_begin || i - digits_begin > 3) return 0;
  if (i >= s.size()) return 0;
  if (paren) return s[i] == ')' ? i + 1 : 0;
  if (s[i] == '.' || s[i] == ')' || s[i] == ':' || s[i] == '-') return i + 1;
  return 0;
}

bool strip_quotes(std::string& s) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kPairs = {{
      {"\"", "\""}, {"«", "»"}, {"“", "”"}, {"„", "“"}, {"'", "'"}, {"**", "**"}}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
        s.compare(s.size() - close.size(), close.size(), close) == 0) {
      s = s.substr(open.size(), s.size() - open.size() - close.size());
      return true;
    }
  }
  return false;
}

bool has_alnum(std::string_view s) {
  for (char32_t c : text::decode(s)) {
    if (text::is_letter(c) || text::is_digit(c)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(ClueStyle style) {
  switch (style) {
    case ClueStyle::kUnrestricted: return "unrestricted";
    case ClueStyle::kBareNounPhrase: return "bare_np";
    case ClueStyle::kDefiniteDeterminerPhrase: return "definite_dp";
    case ClueStyle::kCopularSentence: return "copular";
  }
  return "unrestricted";
}

std::optional<ClueStyle> parse_clue_style(std::string_view slug) {
  for (ClueStyle s : kAllClueStyles) {
    if (to_string(s) == slug) return s;
  }
  return std::nullopt;
}

std::string_view style_descriptor(ClueStyle style) {
  switch (style) {
    case ClueStyle::kUnrestricted:
      return "Non è richiesta alcuna struttura sintattica particolare: la forma di ciascuna definizione è libera.";
    case ClueStyle::kBareNounPhrase:
      return "Ogni definizione deve essere un sintagma nominale senza determinante: deve iniziare direttamente con un "
             "nome o un aggettivo, senza alcun articolo (né determinativo né indeterminativo) e senza verbo, e può "
             "essere modificata da aggettivi, complementi preposizionali o frasi relative.";
    case ClueStyle::kDefiniteDeterminerPhrase:
      return "Ogni definizione deve essere un sintagma nominale introdotto da un articolo determinativo (il, lo, la, i, "
             "gli, le, l'), eventualmente modificato da aggettivi, complementi preposizionali o frasi relative.";
    case ClueStyle::kCopularSentence:
      return "Ogni definizione deve essere una frase copulare con soggetto sottinteso: deve iniziare con una forma del "
             "verbo essere (per esempio «è», «sono», «era», «fu») seguita dal predicato, senza esprimere il soggetto, "
             "che corrisponde alla soluzione.";
  }
  return "";
}

PromptTemplate PromptLibrary::make_template(ClueStyle style, std::string_view raw_text) {
  std::string body(raw_text);
  for (auto pos = body.find(kStructure); pos != std::string::npos; pos = body.find(kStructure, pos)) {
    body.replace(pos, kStructure.size(), style_descriptor(style));
  }
  for (std::string_view ph : {kContext, kKeyword, kCount}) {
    const auto n = count_occurrences(body, ph);
    if (n != 1) {
      throw Error(ErrorCode::kMissingPlaceholder, std::string(to_string(style)) + " template has " + std::to_string(n) +
                                                      " occurrences of " + std::string(ph) + ", expected 1");
    }
  }
  return PromptTemplate{style, std::move(body), style == ClueStyle::kCopularSentence};
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    l.templates_[index_of(ClueStyle::kUnrestricted)] =
        make_template(ClueStyle::kUnrestricted, assets::kPromptUnrestricted);
    l.templates_[index_of(ClueStyle::kBareNounPhrase)] = make_template(ClueStyle::kBareNounPhrase, assets::kPromptBareNp);
    l.templates_[index_of(ClueStyle::kDefiniteDeterminerPhrase)] =
        make_template(ClueStyle::kDefiniteDeterminerPhrase, assets::kPromptDefiniteDp);
    l.templates_[index_of(ClueStyle::kCopularSentence)] =
        make_template(ClueStyle::kCopularSentence, assets::kPromptCopular);
    return l;
  }();
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary l;
  for (ClueStyle s : kAllClueStyles) {
    const auto path = dir / (std::string(to_string(s)) + ".txt");
    l.templates_[index_of(s)] = make_template(s, read_file(path));
  }
  return l;
}

const PromptTemplate& PromptLibrary::get(ClueStyle style) const { return templates_[index_of(style)]; }

std::string PromptLibrary::render(std::string_view context, std::string_view keyword, int n_clues,
                                  ClueStyle style) const {
  if (text::trim(context).empty()) throw Error(ErrorCode::kEmptyContext, "context is empty");
  if (!filter_keyword(keyword)) {
    throw Error(ErrorCode::kInvalidArgument, "keyword '" + std::string(keyword) + "' fails the keyword filter");
  }
  if (n_clues < 1) throw Error(ErrorCode::kInvalidArgument, "n_clues must be at least 1");

  const std::string& tpl = get(style).template_text;
  const std::string count = std::to_string(n_clues);
  std::string out;
  out.reserve(tpl.size() + context.size() + keyword.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    const std::string_view rest = std::string_view(tpl).substr(i);
    if (rest.substr(0, kContext.size()) == kContext) {
      out += context;
      i += kContext.size();
    } else if (rest.substr(0, kKeyword.size()) == kKeyword) {
      out += keyword;
      i += kKeyword.size();
    } else if (rest.substr(0, kCount.size()) == kCount) {
      out += count;
      i += kCount.size();
    } else {
      out.push_back(tpl[i++]);
    }
  }
  return out;
}

std::string render_prompt(std::string_view context, std::string_view keyword, int n_clues, ClueStyle style) {
  return PromptLibrary::builtin().render(context, keyword, n_clues, style);
}

std::vector<std::string> parse_clue_list(std::string_view raw_llm_output, int expected_n) {
  struct Line {
    std::string text;
    bool marked;
  };
  std::vector<Line> lines;
  std::istringstream in{std::string(raw_llm_output)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string s = text::trim(raw);
    bool marked = false;
    for (;;) {
      bool changed = false;
      if (const auto m = marker_length(s); m > 0) {
        s = text::trim(std::string_view(s).substr(m));
        marked = true;
        changed = true;
      }
      if (strip_quotes(s)) {
        s = text::trim(s);
        changed = true;
      }
      if (!changed) break;
    }
    if (!has_alnum(s)) continue;
    lines.push_back(Line{text::normalize_whitespace(s), marked});
  }
  bool any_marked = false;
  for (const auto& l : lines) any_marked = any_marked || l.marked;

  std::vector<std::string> out;
  for (auto& l : lines) {
    if (static_cast<int>(out.size()) >= expected_n) break;
    if (any_marked && !l.marked) continue;
    out.push_back(std::move(l.text));
  }
  if (out.empty()) throw Error(ErrorCode::kUnparseableResponse, "no clues found in model output");
  return out;
}

}  // namespace cruciverba
