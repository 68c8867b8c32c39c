#include "cruciverba/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <functional>
#include <map>

#include "cruciverba/error.h"

namespace cruciverba {

namespace pt = boost::property_tree;

AppConfig default_config() {
  AppConfig cfg;
  cfg.gateway = GatewayConfig::from_env();
  cfg.wiki = WikiEndpoint::from_env();
  return cfg;
}

namespace {

template <typename T>
T parse_value(const std::string& section, const std::string& key, const std::string& raw) {
  try {
    return pt::ptree(raw).get_value<T>();
  } catch (const pt::ptree_error&) {
    throw Error(ErrorCode::kInvalidConfig, section + "." + key + ": cannot parse \"" + raw + "\"");
  }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw Error(ErrorCode::kInvalidConfig, section + "." + key + ": expected a boolean, got \"" + raw + "\"");
}

using Setter = std::function<void(AppConfig&, const std::string&)>;

template <typename T>
Setter set(T AppConfig::*group, auto member, const char* section, const char* key) {
  return [=](AppConfig& cfg, const std::string& raw) {
    using V = std::remove_reference_t<decltype((cfg.*group).*member)>;
    if constexpr (std::is_same_v<V, bool>) {
      (cfg.*group).*member = parse_bool(section, key, raw);
    } else if constexpr (std::is_same_v<V, std::filesystem::path>) {
      (cfg.*group).*member = raw;
    } else {
      (cfg.*group).*member = parse_value<V>(section, key, raw);
    }
  };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"curation",
       {{"min_words", set(&AppConfig::curation, &CurationConfig::min_words, "curation", "min_words")},
        {"max_words", set(&AppConfig::curation, &CurationConfig::max_words, "curation", "max_words")},
        {"keyword_min_chars", set(&AppConfig::curation, &CurationConfig::keyword_min_chars, "curation", "keyword_min_chars")},
        {"keyword_max_chars", set(&AppConfig::curation, &CurationConfig::keyword_max_chars, "curation", "keyword_max_chars")},
        {"keyword_max_words", set(&AppConfig::curation, &CurationConfig::keyword_max_words, "curation", "keyword_max_words")}}},
      {"grid",
       {{"max_width", set(&AppConfig::grid, &GridConfig::max_width, "grid", "max_width")},
        {"max_height", set(&AppConfig::grid, &GridConfig::max_height, "grid", "max_height")},
        {"node_budget", set(&AppConfig::grid, &GridConfig::node_budget, "grid", "node_budget")},
        {"seed", set(&AppConfig::grid, &GridConfig::seed, "grid", "seed")}}},
      {"llm",
       {{"model", set(&AppConfig::generation, &GenerationParams::model_id, "llm", "model")},
        {"temperature", set(&AppConfig::generation, &GenerationParams::temperature, "llm", "temperature")},
        {"top_p", set(&AppConfig::generation, &GenerationParams::top_p, "llm", "top_p")},
        {"top_k", set(&AppConfig::generation, &GenerationParams::top_k, "llm", "top_k")},
        {"max_tokens", set(&AppConfig::generation, &GenerationParams::max_tokens, "llm", "max_tokens")},
        {"base_url", set(&AppConfig::gateway, &GatewayConfig::base_url, "llm", "base_url")},
        {"requires_auth", set(&AppConfig::gateway, &GatewayConfig::requires_auth, "llm", "requires_auth")},
        {"supports_top_k", set(&AppConfig::gateway, &GatewayConfig::supports_top_k, "llm", "supports_top_k")},
        {"max_in_flight", set(&AppConfig::gateway, &GatewayConfig::max_in_flight, "llm", "max_in_flight")},
        {"max_attempts",
         [](AppConfig& cfg, const std::string& raw) {
           cfg.gateway.retry.max_attempts = parse_value<int>("llm", "max_attempts", raw);
         }},
        {"retry_base_ms",
         [](AppConfig& cfg, const std::string& raw) {
           cfg.gateway.retry.base_delay = std::chrono::milliseconds(parse_value<int64_t>("llm", "retry_base_ms", raw));
         }}}},
      {"wiki",
       {{"api_base", set(&AppConfig::wiki, &WikiEndpoint::api_base, "wiki", "api_base")},
        {"pageviews_base", set(&AppConfig::wiki, &WikiEndpoint::pageviews_base, "wiki", "pageviews_base")},
        {"project", set(&AppConfig::wiki, &WikiEndpoint::project, "wiki", "project")},
        {"pageviews_start", set(&AppConfig::wiki, &WikiEndpoint::pageviews_start, "wiki", "pageviews_start")},
        {"pageviews_end", set(&AppConfig::wiki, &WikiEndpoint::pageviews_end, "wiki", "pageviews_end")},
        {"user_agent", set(&AppConfig::wiki, &WikiEndpoint::user_agent, "wiki", "user_agent")}}},
      {"paths",
       {{"data_dir", set(&AppConfig::paths, &PathsConfig::data_dir, "paths", "data_dir")},
        {"cache_dir", set(&AppConfig::paths, &PathsConfig::cache_dir, "paths", "cache_dir")},
        {"transcripts", set(&AppConfig::paths, &PathsConfig::transcripts, "paths", "transcripts")}}}};
  return table;
}

}  // namespace

AppConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  AppConfig cfg = default_config();
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    auto sec = table.find(section);
    if (sec == table.end()) throw Error(ErrorCode::kInvalidConfig, "unknown section [" + section + "]");
    if (!body.data().empty()) throw Error(ErrorCode::kInvalidConfig, "key \"" + section + "\" outside a section");
    for (const auto& [key, value] : body) {
      auto setter = sec->second.find(key);
      if (setter == sec->second.end()) throw Error(ErrorCode::kInvalidConfig, "unknown key " + section + "." + key);
      setter->second(cfg, value.data());
    }
  }
  cfg.curation.validate();
  cfg.generation.validate();
  if (cfg.grid.max_width < 2 || cfg.grid.max_height < 2 || cfg.grid.node_budget == 0) {
    throw Error(ErrorCode::kInvalidConfig, "grid bounds must be at least 2 and the node budget positive");
  }
  if (cfg.gateway.max_in_flight < 1 || cfg.gateway.retry.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "llm.max_in_flight and llm.max_attempts must be positive");
  }
  return cfg;
}

}  // namespace cruciverba
