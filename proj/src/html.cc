#include "cruciverba/html.h"

#include <array>
#include <cctype>
#include <unordered_map>

#include "cruciverba/error.h"
#include "cruciverba/text.h"

namespace cruciverba::html {
namespace {

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> kEntities = {
      {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},    {"apos", U'\''},
      {"nbsp", 0xA0},    {"ndash", 0x2013},  {"mdash", 0x2014},  {"laquo", 0xAB},   {"raquo", 0xBB},
      {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D}, {"hellip", 0x2026},
      {"agrave", 0xE0},  {"egrave", 0xE8},   {"eacute", 0xE9},   {"igrave", 0xEC},  {"ograve", 0xF2},
      {"ugrave", 0xF9},  {"Agrave", 0xC0},   {"Egrave", 0xC8},   {"Eacute", 0xC9},  {"Igrave", 0xCC},
      {"Ograve", 0xD2},  {"Ugrave", 0xD9},   {"ccedil", 0xE7},   {"middot", 0xB7},  {"deg", 0xB0},
      {"times", 0xD7},   {"shy", 0xAD},      {"zwj", 0x200D},    {"zwnj", 0x200C},  {"thinsp", 0x2009},
  };
  return kEntities;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Scanner {
 public:
  explicit Scanner(std::string_view html) : s_(html) {}

  std::vector<Token> run() {
    std::string pending_text;
    auto flush_text = [&] {
      if (!pending_text.empty()) {
        tokens_.push_back(Token{Token::Kind::kText, {}, {}, false, decode_entities(pending_text)});
        pending_text.clear();
      }
    };
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c != '<') {
        pending_text.push_back(c);
        ++pos_;
        continue;
      }
      if (starts_with("<!--")) {
        flush_text();
        const auto end = s_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) fail("unterminated comment");
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<!") || starts_with("<?")) {
        flush_text();
        const auto end = s_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated declaration");
        pos_ = end + 1;
        continue;
      }
      const bool closing = pos_ + 1 < s_.size() && s_[pos_ + 1] == '/';
      const std::size_t name_begin = pos_ + (closing ? 2 : 1);
      if (name_begin >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[name_begin]))) {
        pending_text.push_back(c);
        ++pos_;
        continue;
      }
      flush_text();
      read_tag(closing, name_begin);
    }
    flush_text();
    return std::move(tokens_);
  }

 private:
  bool starts_with(std::string_view prefix) const { return s_.substr(pos_, prefix.size()) == prefix; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParseFailure, what + " at byte " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void read_tag(bool closing, std::size_t name_begin) {
    std::size_t p = name_begin;
    while (p < s_.size() && is_name_char(s_[p])) ++p;
    Token tok{closing ? Token::Kind::kEndTag : Token::Kind::kStartTag, lower_ascii(s_.substr(name_begin, p - name_begin)),
              {}, false, {}};
    pos_ = p;
    for (;;) {
      skip_space();
      if (pos_ >= s_.size()) fail("unterminated tag <" + tok.name);
      if (s_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (starts_with("/>")) {
        tok.self_closing = true;
        pos_ += 2;
        break;
      }
      std::size_t attr_begin = pos_;
      while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '=' &&
             s_[pos_] != '>' && !starts_with("/>")) {
        ++pos_;
      }
      if (pos_ == attr_begin) {
        ++pos_;  // stray character such as a lone '/'
        continue;
      }
      std::string attr = lower_ascii(s_.substr(attr_begin, pos_ - attr_begin));
      skip_space();
      std::string value;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ >= s_.size()) fail("unterminated tag <" + tok.name);
        const char q = s_[pos_];
        if (q == '"' || q == '\'') {
          const auto end = s_.find(q, pos_ + 1);
          if (end == std::string_view::npos) fail("unterminated attribute value in <" + tok.name);
          value = decode_entities(s_.substr(pos_ + 1, end - pos_ - 1));
          pos_ = end + 1;
        } else {
          std::size_t v = pos_;
          while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '>') ++pos_;
          value = decode_entities(s_.substr(v, pos_ - v));
        }
      }
      tok.attributes.emplace(std::move(attr), std::move(value));
    }
    const bool raw_text = !closing && (tok.name == "script" || tok.name == "style") && !tok.self_closing;
    const std::string name = tok.name;
    tokens_.push_back(std::move(tok));
    if (raw_text) {
      const std::string close = "</" + name;
      std::size_t p = pos_;
      for (;;) {
        p = s_.find("</", p);
        if (p == std::string_view::npos) fail("unterminated <" + name + "> element");
        if (lower_ascii(s_.substr(p, close.size())) == close) break;
        p += 2;
      }
      const auto end = s_.find('>', p);
      if (end == std::string_view::npos) fail("unterminated tag </" + name);
      tokens_.push_back(Token{Token::Kind::kEndTag, name, {}, false, {}});
      pos_ = end + 1;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view html) { return Scanner(html).run(); }

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    if (!name.empty() && name[0] == '#') {
      try {
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        const std::string digits(name.substr(hex ? 2 : 1));
        if (!digits.empty()) cp = static_cast<char32_t>(std::stoul(digits, nullptr, hex ? 16 : 10));
      } catch (const std::exception&) {
        cp = 0;
      }
    } else {
      auto it = named_entities().find(name);
      if (it != named_entities().end()) cp = it->second;
    }
    if (cp == 0 || cp > 0x10FFFF) {
      out.push_back(s[i++]);
      continue;
    }
    out += text::encode(std::u32string(1, cp));
    i = semi + 1;
  }
  return out;
}

bool is_void_element(std::string_view name) {
  static constexpr std::array<std::string_view, 14> kVoid = {"area", "base", "br",   "col",   "embed",  "hr",    "img",
                                                             "input", "link", "meta", "param", "source", "track", "wbr"};
  for (auto v : kVoid) {
    if (v == name) return true;
  }
  return false;
}

}  // namespace cruciverba::html
