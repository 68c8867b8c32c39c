#pragma once

#include <filesystem>
#include <string>

#include "cruciverba/curation.h"
#include "cruciverba/grid.h"
#include "cruciverba/llm.h"
#include "cruciverba/wiki.h"

namespace cruciverba {

struct PathsConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path cache_dir = "cache";
  // Generation transcript log. Empty means <data_dir>/transcripts.jsonl.
  std::filesystem::path transcripts;
};

struct AppConfig {
  CurationConfig curation;
  GridConfig grid;
  GenerationParams generation;
  GatewayConfig gateway;
  WikiEndpoint wiki;
  PathsConfig paths;
};

// Defaults, then environment overrides (endpoints and the API key).
AppConfig default_config();

// INI file with [curation], [grid], [llm], [wiki] and [paths] sections,
// applied over default_config(). Unknown sections or keys and unparsable
// values throw InvalidConfig. The API key is read from the environment only.
AppConfig load_config(const std::filesystem::path& path);

}  // namespace cruciverba
