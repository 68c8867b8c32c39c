#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cruciverba/http.h"
#include "cruciverba/util.h"

namespace cruciverba {

struct RawArticle {
  std::string title;
  std::string html;
  std::chrono::system_clock::time_point fetched_at;
  std::string source_url;

  friend bool operator==(const RawArticle&, const RawArticle&) = default;
};

struct ArticleRecord {
  std::string title;
  std::string intro_text;
  std::vector<std::string> bold_keywords;
  uint64_t view_count = 0;
  bool view_count_available = false;
  std::string summary;
  std::vector<std::string> categories;
  std::string url;
  // Free-form pass-through fields with no computed value.
  std::optional<std::string> relevance;
  std::vector<std::string> headlines;
  std::vector<std::string> related_terms;

  friend bool operator==(const ArticleRecord&, const ArticleRecord&) = default;
};

nlohmann::json to_json(const ArticleRecord& a);
ArticleRecord article_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RawArticle& a);
RawArticle raw_article_from_json(const nlohmann::json& j);

// Plain text of the paragraphs before the first section heading, with
// citation markers removed and whitespace collapsed. Tables (infoboxes),
// reference superscripts, scripts and styles are skipped.
std::string extract_intro(const RawArticle& raw);

// Bold (<b>/<strong>) text inside the intro paragraphs, trimmed and
// deduplicated in order of first appearance.
std::vector<std::string> extract_bold_keywords(const RawArticle& raw);

std::string strip_citation_markers(std::string_view text);

struct WikiEndpoint {
  std::string api_base = "https://it.wikipedia.org";
  std::string pageviews_base = "https://wikimedia.org/api/rest_v1";
  std::string project = "it.wikipedia.org";
  // Inclusive monthly range summed for view counts (YYYYMMDD).
  std::string pageviews_start = "20240101";
  std::string pageviews_end = "20241231";
  std::string user_agent = "cruciverba/0.1 (educational crossword builder)";

  // CRUCIVERBA_WIKI_BASE and CRUCIVERBA_PAGEVIEWS_BASE override the defaults.
  static WikiEndpoint from_env();

  std::string parse_url(const std::string& title) const;
  std::string query_url(const std::string& title) const;
  std::string pageviews_url(const std::string& title) const;
};

// One file per key under a content-addressed directory (sha256 of the key,
// sharded by its first two hex digits). Writes are atomic.
class ArticleCache {
 public:
  explicit ArticleCache(std::filesystem::path dir);

  std::optional<RawArticle> load_article(const std::string& title) const;
  void store_article(const std::string& title, const RawArticle& raw);

  std::optional<std::string> load_blob(const std::string& key) const;
  void store_blob(const std::string& key, const std::string& content);

  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

class WikiClient {
 public:
  WikiClient(std::shared_ptr<http::Transport> transport, std::shared_ptr<ArticleCache> cache, WikiEndpoint endpoint,
             http::RetryPolicy retry = {}, Clock clock = system_clock());

  // Cached copy when present; otherwise an action=parse request whose HTML is
  // stored in the cache. Errors: NotFound, Network, RateLimited.
  RawArticle fetch_article(const std::string& title);

  // Assembles the record. View counts degrade to 0 (flagged unavailable) and
  // categories/summary to empty defaults when their endpoints fail.
  ArticleRecord extract_metadata(const RawArticle& raw);

 private:
  std::optional<std::string> get_cached(const std::string& url);

  std::shared_ptr<http::Transport> transport_;
  std::shared_ptr<ArticleCache> cache_;
  WikiEndpoint endpoint_;
  http::RetryPolicy retry_;
  Clock clock_;
};

// Record for educator-pasted text: no bold keywords, no metadata.
ArticleRecord article_from_text(const std::string& title, const std::string& text);

}  // namespace cruciverba
