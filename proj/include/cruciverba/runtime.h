#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>

#include "cruciverba/config.h"
#include "cruciverba/http.h"
#include "cruciverba/llm.h"
#include "cruciverba/util.h"
#include "cruciverba/wiki.h"

namespace cruciverba {

// Clock value used in replay mode so that outputs are byte-stable.
inline constexpr std::string_view kReplayTimestamp = "2025-01-15T09:00:00Z";

struct RuntimeOptions {
  AppConfig config = default_config();
  // Serve every request from pinned fixtures; no network, fixed clock, no
  // retry sleeps and no API key needed.
  std::optional<std::filesystem::path> replay_dir;
  // Forward to the network and write each exchange as a fixture.
  std::optional<std::filesystem::path> record_dir;
};

struct Runtime {
  std::shared_ptr<http::Transport> transport;
  Clock clock;
  std::shared_ptr<ArticleCache> cache;
  std::shared_ptr<WikiClient> wiki;
  std::shared_ptr<TranscriptStore> transcripts;
  std::shared_ptr<LlmGateway> gateway;
};

// Throws InvalidArgument when both replay and record are requested.
Runtime make_runtime(const RuntimeOptions& options);

}  // namespace cruciverba
