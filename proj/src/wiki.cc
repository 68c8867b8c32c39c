#include "cruciverba/wiki.h"

#include <cstdlib>
#include <regex>
#include <unordered_set>

#include "cruciverba/error.h"
#include "cruciverba/html.h"
#include "cruciverba/text.h"

namespace cruciverba {

using nlohmann::json;

namespace {

bool is_heading(const std::string& name) {
  return name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6';
}

bool breaks_paragraph(const std::string& name) {
  return name == "div" || name == "table" || name == "ul" || name == "ol" || name == "dl" ||
         name == "blockquote" || name == "figure" || is_heading(name);
}

bool has_class(const html::Token& tok, std::string_view cls) {
  auto it = tok.attributes.find("class");
  if (it == tok.attributes.end()) return false;
  for (const auto& c : text::split_whitespace(it->second)) {
    if (c == cls) return true;
  }
  return false;
}

bool is_excluded(const html::Token& tok) {
  if (tok.name == "sup" && has_class(tok, "reference")) return true;
  if (tok.name == "span" && (has_class(tok, "mw-editsection") || has_class(tok, "noprint"))) return true;
  if (tok.name == "script" || tok.name == "style") return true;
  auto style = tok.attributes.find("style");
  return style != tok.attributes.end() && style->second.find("display:none") != std::string::npos;
}

std::string clean(std::string_view s) { return text::normalize_whitespace(strip_citation_markers(s)); }

struct IntroParse {
  std::string text;
  std::vector<std::string> bold;
};

IntroParse parse_intro(const RawArticle& raw) {
  const auto tokens = html::tokenize(raw.html);
  std::string intro;
  std::vector<std::string> bold;
  std::unordered_set<std::string> seen_bold;

  bool in_paragraph = false;
  int table_depth = 0;
  std::string excluded_tag;
  int excluded_depth = 0;
  int bold_depth = 0;
  std::string bold_buffer;

  auto finish_bold = [&] {
    std::string kw = clean(bold_buffer);
    bold_buffer.clear();
    if (!kw.empty() && seen_bold.insert(kw).second) bold.push_back(std::move(kw));
  };

  for (const auto& tok : tokens) {
    if (excluded_depth > 0) {
      if (tok.name == excluded_tag && !html::is_void_element(tok.name) && !tok.self_closing) {
        excluded_depth += tok.kind == html::Token::Kind::kStartTag ? 1 : -1;
      }
      continue;
    }
    const bool capturing = in_paragraph && table_depth == 0;
    switch (tok.kind) {
      case html::Token::Kind::kStartTag:
        if (is_heading(tok.name)) return IntroParse{clean(intro), std::move(bold)};
        if (is_excluded(tok) && !tok.self_closing && !html::is_void_element(tok.name)) {
          excluded_tag = tok.name;
          excluded_depth = 1;
          break;
        }
        if (tok.name == "table") ++table_depth;
        if (breaks_paragraph(tok.name)) {
          in_paragraph = false;
        } else if (tok.name == "p") {
          in_paragraph = true;
          intro += ' ';
        } else if (tok.name == "br" && capturing) {
          intro += ' ';
          if (bold_depth > 0) bold_buffer += ' ';
        } else if ((tok.name == "b" || tok.name == "strong") && capturing && !tok.self_closing) {
          ++bold_depth;
        }
        break;
      case html::Token::Kind::kEndTag:
        if (tok.name == "table" && table_depth > 0) --table_depth;
        if (tok.name == "p") {
          in_paragraph = false;
          intro += ' ';
        }
        if ((tok.name == "b" || tok.name == "strong") && bold_depth > 0) {
          if (--bold_depth == 0) finish_bold();
        }
        break;
      case html::Token::Kind::kText:
        if (capturing) {
          intro += tok.text;
          if (bold_depth > 0) bold_buffer += tok.text;
        }
        break;
    }
    if (!in_paragraph && bold_depth > 0) {
      bold_depth = 0;
      finish_bold();
    }
  }
  if (bold_depth > 0) finish_bold();
  return IntroParse{clean(intro), std::move(bold)};
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key) && j[key].is_array()) {
    for (const auto& v : j[key]) out.push_back(v.get<std::string>());
  }
  return out;
}

std::string wiki_title_path(const std::string& title) {
  std::string t = title;
  for (char& c : t) {
    if (c == ' ') c = '_';
  }
  return http::percent_encode(t);
}

const char* env_or_null(const char* name) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? v : nullptr;
}

}  // namespace

std::string strip_citation_markers(std::string_view text) {
  static const std::regex kMarker(R"(\[\s*(?:\d+|nota\s+\d+|N\s*\d+|[a-z]|citazione necessaria|senza fonte)\s*\])",
                                  std::regex::icase);
  return std::regex_replace(std::string(text), kMarker, "");
}

std::string extract_intro(const RawArticle& raw) { return parse_intro(raw).text; }

std::vector<std::string> extract_bold_keywords(const RawArticle& raw) { return parse_intro(raw).bold; }

json to_json(const ArticleRecord& a) {
  json j{{"title", a.title},
         {"intro_text", a.intro_text},
         {"bold_keywords", a.bold_keywords},
         {"view_count", a.view_count},
         {"view_count_available", a.view_count_available},
         {"summary", a.summary},
         {"categories", a.categories},
         {"url", a.url},
         {"headlines", a.headlines},
         {"related_terms", a.related_terms}};
  j["relevance"] = a.relevance ? json(*a.relevance) : json(nullptr);
  return j;
}

ArticleRecord article_from_json(const json& j) {
  try {
    ArticleRecord a;
    a.title = j.at("title").get<std::string>();
    a.intro_text = j.value("intro_text", "");
    a.bold_keywords = string_list(j, "bold_keywords");
    a.view_count = j.value("view_count", uint64_t{0});
    a.view_count_available = j.value("view_count_available", false);
    a.summary = j.value("summary", "");
    a.categories = string_list(j, "categories");
    a.url = j.value("url", "");
    if (j.contains("relevance") && j["relevance"].is_string()) a.relevance = j["relevance"].get<std::string>();
    a.headlines = string_list(j, "headlines");
    a.related_terms = string_list(j, "related_terms");
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("article record: ") + e.what());
  }
}

json to_json(const RawArticle& a) {
  return json{{"title", a.title}, {"html", a.html}, {"fetched_at", format_utc(a.fetched_at)}, {"source_url", a.source_url}};
}

RawArticle raw_article_from_json(const json& j) {
  try {
    return RawArticle{j.at("title").get<std::string>(), j.at("html").get<std::string>(),
                      parse_utc(j.at("fetched_at").get<std::string>()), j.value("source_url", "")};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("raw article: ") + e.what());
  }
}

WikiEndpoint WikiEndpoint::from_env() {
  WikiEndpoint e;
  if (const char* v = env_or_null("CRUCIVERBA_WIKI_BASE")) e.api_base = v;
  if (const char* v = env_or_null("CRUCIVERBA_PAGEVIEWS_BASE")) e.pageviews_base = v;
  return e;
}

std::string WikiEndpoint::parse_url(const std::string& title) const {
  return api_base + "/w/api.php?action=parse&format=json&formatversion=2&prop=text&redirects=1&disableeditsection=1&page=" +
         http::percent_encode(title);
}

std::string WikiEndpoint::query_url(const std::string& title) const {
  return api_base +
         "/w/api.php?action=query&format=json&formatversion=2&prop=categories%7Cdescription%7Cinfo&inprop=url"
         "&clshow=%21hidden&cllimit=max&redirects=1&titles=" +
         http::percent_encode(title);
}

std::string WikiEndpoint::pageviews_url(const std::string& title) const {
  return pageviews_base + "/metrics/pageviews/per-article/" + project + "/all-access/user/" + wiki_title_path(title) +
         "/monthly/" + pageviews_start + "/" + pageviews_end;
}

ArticleCache::ArticleCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ArticleCache::path_for(const std::string& key) const {
  const std::string h = sha256_hex(key);
  return dir_ / h.substr(0, 2) / (h + ".json");
}

std::optional<RawArticle> ArticleCache::load_article(const std::string& title) const {
  auto blob = load_blob("article:" + title);
  if (!blob) return std::nullopt;
  return raw_article_from_json(json::parse(*blob));
}

void ArticleCache::store_article(const std::string& title, const RawArticle& raw) {
  store_blob("article:" + title, to_json(raw).dump(2) + "\n");
}

std::optional<std::string> ArticleCache::load_blob(const std::string& key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return read_file(path);
}

void ArticleCache::store_blob(const std::string& key, const std::string& content) {
  write_file_atomic(path_for(key), content);
}

WikiClient::WikiClient(std::shared_ptr<http::Transport> transport, std::shared_ptr<ArticleCache> cache,
                       WikiEndpoint endpoint, http::RetryPolicy retry, Clock clock)
    : transport_(std::move(transport)),
      cache_(std::move(cache)),
      endpoint_(std::move(endpoint)),
      retry_(std::move(retry)),
      clock_(std::move(clock)) {}

RawArticle WikiClient::fetch_article(const std::string& title) {
  const std::string trimmed = text::trim(title);
  if (trimmed.empty()) throw Error(ErrorCode::kNotFound, "invalid-title: empty title");
  if (cache_) {
    if (auto hit = cache_->load_article(trimmed)) return *hit;
  }
  if (!transport_) throw Error(ErrorCode::kNetwork, "no transport configured and '" + trimmed + "' is not cached");

  http::Request req;
  req.url = endpoint_.parse_url(trimmed);
  req.headers["User-Agent"] = endpoint_.user_agent;
  req.headers["Accept"] = "application/json";
  const auto outcome = http::send_with_retry(*transport_, req, retry_);
  const auto& res = outcome.response;
  if (res.status == 429) throw Error(ErrorCode::kRateLimited, "retry budget exhausted for '" + trimmed + "'");
  if (res.status == 404) throw Error(ErrorCode::kNotFound, "'" + trimmed + "' does not exist");
  if (res.status != 200) {
    throw Error(ErrorCode::kNetwork, "HTTP " + std::to_string(res.status) + " fetching '" + trimmed + "'");
  }
  json doc = json::parse(res.body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kParseFailure, "non-JSON parse response for '" + trimmed + "'");
  if (doc.contains("error")) {
    const std::string code = doc["error"].value("code", "");
    if (code == "missingtitle" || code == "invalidtitle" || code == "nosuchpageid") {
      throw Error(ErrorCode::kNotFound, "'" + trimmed + "': " + code);
    }
    throw Error(ErrorCode::kNetwork, "API error '" + code + "' for '" + trimmed + "'");
  }
  const json parse = doc.contains("parse") ? doc.at("parse") : json::object();
  RawArticle raw;
  raw.title = parse.value("title", trimmed);
  const json text_node = parse.contains("text") ? parse.at("text") : json("");
  raw.html = text_node.is_string() ? text_node.get<std::string>() : text_node.value("*", "");
  if (raw.html.empty()) throw Error(ErrorCode::kNotFound, "'" + trimmed + "' has no content");
  // Whole seconds, the precision the cache keeps.
  raw.fetched_at = std::chrono::floor<std::chrono::seconds>(clock_());
  raw.source_url = req.url;
  if (cache_) cache_->store_article(trimmed, raw);
  return raw;
}

std::optional<std::string> WikiClient::get_cached(const std::string& url) {
  if (cache_) {
    if (auto hit = cache_->load_blob("get:" + url)) return hit;
  }
  if (!transport_) return std::nullopt;
  http::Request req;
  req.url = url;
  req.headers["User-Agent"] = endpoint_.user_agent;
  req.headers["Accept"] = "application/json";
  try {
    const auto outcome = http::send_with_retry(*transport_, req, retry_);
    if (outcome.response.status != 200) return std::nullopt;
    if (cache_) cache_->store_blob("get:" + url, outcome.response.body);
    return outcome.response.body;
  } catch (const Error&) {
    return std::nullopt;
  }
}

ArticleRecord WikiClient::extract_metadata(const RawArticle& raw) {
  const IntroParse intro = parse_intro(raw);
  ArticleRecord rec;
  rec.title = raw.title;
  rec.intro_text = intro.text;
  rec.bold_keywords = intro.bold;
  rec.url = "https://" + endpoint_.project + "/wiki/" + wiki_title_path(raw.title);

  if (auto body = get_cached(endpoint_.pageviews_url(raw.title))) {
    json doc = json::parse(*body, nullptr, false);
    if (!doc.is_discarded() && doc.contains("items") && doc["items"].is_array()) {
      uint64_t total = 0;
      for (const auto& item : doc["items"]) total += item.value("views", uint64_t{0});
      rec.view_count = total;
      rec.view_count_available = true;
    }
  }

  if (auto body = get_cached(endpoint_.query_url(raw.title))) {
    json doc = json::parse(*body, nullptr, false);
    const json* page = nullptr;
    if (!doc.is_discarded() && doc.contains("query") && doc["query"].contains("pages") &&
        doc["query"]["pages"].is_array() && !doc["query"]["pages"].empty()) {
      page = &doc["query"]["pages"][0];
    }
    if (page != nullptr) {
      if (page->contains("categories") && (*page)["categories"].is_array()) {
        for (const auto& c : (*page)["categories"]) {
          std::string name = c.value("title", "");
          for (std::string_view prefix : {"Categoria:", "Category:"}) {
            if (name.rfind(prefix, 0) == 0) name = name.substr(prefix.size());
          }
          if (!name.empty()) rec.categories.push_back(name);
        }
      }
      rec.summary = page->value("description", "");
      const std::string full = page->value("fullurl", "");
      if (!full.empty()) rec.url = full;
    }
  }

  if (rec.summary.empty()) {
    // First sentence of the intro.
    const auto stop = rec.intro_text.find(". ");
    rec.summary = stop == std::string::npos ? rec.intro_text : rec.intro_text.substr(0, stop + 1);
  }
  return rec;
}

ArticleRecord article_from_text(const std::string& title, const std::string& text) {
  ArticleRecord a;
  a.title = title;
  a.intro_text = text::normalize_whitespace(text);
  return a;
}

}  // namespace cruciverba
