#include "cruciverba/curation.h"

#include <algorithm>

#include "cruciverba/error.h"
#include "cruciverba/text.h"

namespace cruciverba {

void CurationConfig::validate() const {
  if (min_words <= 0 || max_words <= 0 || keyword_min_chars <= 0 || keyword_max_chars <= 0 || keyword_max_words <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "curation bounds must be positive");
  }
  if (min_words >= max_words) throw Error(ErrorCode::kInvalidConfig, "min_words must be below max_words");
  if (keyword_min_chars > keyword_max_chars) {
    throw Error(ErrorCode::kInvalidConfig, "keyword_min_chars must not exceed keyword_max_chars");
  }
}

std::string_view to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::kTooShort: return "TooShort";
    case RejectionReason::kTooLong: return "TooLong";
    case RejectionReason::kNoValidKeyword: return "NoValidKeyword";
  }
  return "Unknown";
}

bool filter_keyword(std::string_view keyword, const CurationConfig& cfg) {
  const std::u32string cps = text::decode(text::nfc(text::trim(keyword)));
  const auto len = static_cast<int>(cps.size());
  if (len < cfg.keyword_min_chars || len > cfg.keyword_max_chars) return false;
  int words = 1;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (c == U' ') {
      // Trimmed, so a space is never first or last; it must not be doubled.
      if (cps[i - 1] == U' ') return false;
      ++words;
    } else if (!text::is_letter(c)) {
      return false;
    }
  }
  return words <= cfg.keyword_max_words;
}

CurationVerdict filter_article(const ArticleRecord& article, const CurationConfig& cfg) {
  CurationVerdict v;
  v.word_count = static_cast<int>(text::split_whitespace(article.intro_text).size());
  if (v.word_count < cfg.min_words) v.reasons.push_back(RejectionReason::kTooShort);
  if (v.word_count > cfg.max_words) v.reasons.push_back(RejectionReason::kTooLong);
  for (const auto& kw : article.bold_keywords) {
    if (filter_keyword(kw, cfg)) v.keywords.push_back(text::trim(kw));
  }
  if (v.keywords.empty()) v.reasons.push_back(RejectionReason::kNoValidKeyword);
  v.accepted = v.reasons.empty();
  return v;
}

std::vector<ArticleRecord> rank_articles(std::vector<ArticleRecord> pool) {
  std::stable_sort(pool.begin(), pool.end(), [](const ArticleRecord& a, const ArticleRecord& b) {
    if (a.view_count != b.view_count) return a.view_count > b.view_count;
    return a.title < b.title;
  });
  return pool;
}

}  // namespace cruciverba
