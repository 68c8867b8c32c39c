#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cruciverba::html {

struct Token {
  enum class Kind { kStartTag, kEndTag, kText };
  Kind kind;
  std::string name;  // lowercase tag name; empty for text
  std::map<std::string, std::string> attributes;
  bool self_closing = false;
  std::string text;  // entity-decoded, for kText
};

// Tolerant tokenizer. Comments, doctypes and processing instructions are
// dropped; the bodies of <script> and <style> are skipped. A '<' that does
// not start a tag is kept as text. Throws ParseFailure for a tag or comment
// left unterminated at end of input.
std::vector<Token> tokenize(std::string_view html);

std::string decode_entities(std::string_view s);

bool is_void_element(std::string_view name);

}  // namespace cruciverba::html
