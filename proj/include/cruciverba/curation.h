#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cruciverba/wiki.h"

namespace cruciverba {

struct CurationConfig {
  int min_words = 50;
  int max_words = 1200;
  int keyword_min_chars = 3;
  int keyword_max_chars = 20;
  int keyword_max_words = 2;

  // Throws InvalidConfig when min_words >= max_words, the character bounds
  // are inverted, or any field is not positive.
  void validate() const;
};

enum class RejectionReason { kTooShort, kTooLong, kNoValidKeyword };

std::string_view to_string(RejectionReason r);

struct CurationVerdict {
  bool accepted = false;
  std::vector<RejectionReason> reasons;
  // Keywords that survived filter_keyword, in input order.
  std::vector<std::string> keywords;
  int word_count = 0;
};

// True iff the trimmed keyword has between keyword_min_chars and
// keyword_max_chars characters, consists of letters separated by single
// spaces, and has at most keyword_max_words words.
bool filter_keyword(std::string_view keyword, const CurationConfig& cfg = {});

// Words are whitespace-separated tokens. Fewer than min_words rejects
// (so exactly min_words is accepted); more than max_words rejects.
CurationVerdict filter_article(const ArticleRecord& article, const CurationConfig& cfg = {});

// Descending view_count; ties by title.
std::vector<ArticleRecord> rank_articles(std::vector<ArticleRecord> pool);

}  // namespace cruciverba
