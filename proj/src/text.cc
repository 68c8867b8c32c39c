#include "cruciverba/text.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "cruciverba/error.h"

namespace cruciverba::text {
namespace {

icu::UnicodeString to_icu(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string from_icu(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidConfig, "ICU NFC normalizer unavailable");
  return *n;
}

const icu::Normalizer2& nfd_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidConfig, "ICU NFD normalizer unavailable");
  return *n;
}

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t c : codepoints) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
    }
  }
  return out;
}

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc_instance().normalize(to_icu(utf8), status);
  if (U_FAILURE(status)) return std::string(utf8);
  return from_icu(out);
}

std::string to_lower(std::string_view utf8) {
  icu::UnicodeString u = to_icu(utf8);
  u.toLower(icu::Locale::getItalian());
  return from_icu(u);
}

std::string to_upper(std::string_view utf8) {
  icu::UnicodeString u = to_icu(utf8);
  u.toUpper(icu::Locale::getItalian());
  return from_icu(u);
}

std::string fold_accents(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString decomposed = nfd_instance().normalize(to_icu(utf8), status);
  if (U_FAILURE(status)) return std::string(utf8);
  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) stripped.append(c);
    i += U16_LENGTH(c);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString composed = nfc_instance().normalize(stripped, status);
  return from_icu(U_FAILURE(status) ? stripped : composed);
}

bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

bool is_mark(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & U_GC_M_MASK) != 0;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string normalize_whitespace(std::string_view utf8) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : decode(utf8)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return encode(out);
}

std::string trim(std::string_view utf8) {
  std::u32string cps = decode(utf8);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && is_space(cps[begin])) ++begin;
  while (end > begin && is_space(cps[end - 1])) --end;
  return encode(std::u32string_view(cps).substr(begin, end - begin));
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  std::vector<std::string> out;
  std::u32string current;
  for (char32_t c : decode(utf8)) {
    if (is_space(c)) {
      if (!current.empty()) out.push_back(encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(encode(current));
  return out;
}

std::size_t length(std::string_view utf8) { return decode(utf8).size(); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace cruciverba::text
