#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cruciverba/clue_style.h"
#include "cruciverba/curation.h"
#include "cruciverba/dataset.h"
#include "cruciverba/error.h"
#include "cruciverba/grid.h"
#include "cruciverba/llm.h"
#include "cruciverba/util.h"
#include "cruciverba/wiki.h"

namespace httplib {
class Server;
}

namespace cruciverba {

// An Error with structured detail for the API response body.
class ApiError : public Error {
 public:
  ApiError(ErrorCode code, const std::string& message, nlohmann::json details)
      : Error(code, message), details_(std::move(details)) {}
  const nlohmann::json& details() const { return details_; }

 private:
  nlohmann::json details_;
};

enum class DecisionState { kAccepted, kRejected, kEdited };

std::string_view to_string(DecisionState s);

struct Decision {
  DecisionState state = DecisionState::kAccepted;
  std::string edited_text;  // kEdited only
};

struct Session {
  std::string id;
  std::string source;  // "text" or "title"
  ArticleRecord article;
  CurationVerdict curation;
  std::set<ClueStyle> selected_styles;
  std::vector<std::string> clue_ids;
  std::map<std::string, Decision> decisions;
  std::optional<std::string> puzzle_id;
  std::chrono::system_clock::time_point created_at;
};

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

struct ServiceDeps {
  std::shared_ptr<DatasetStore> store;
  // Null disables title sessions.
  std::shared_ptr<WikiClient> wiki;
  std::shared_ptr<LlmGateway> gateway;
  std::filesystem::path state_dir;  // sessions/ and puzzles/ live here
  CurationConfig curation;
  GridConfig grid;
  GenerationParams generation;
  const PromptLibrary* prompts = &PromptLibrary::builtin();
  Clock clock = system_clock();
};

// Pipeline orchestration behind the /v1 API. Every method persists its state
// change before returning. Operations on one session are serialized.
class Service {
 public:
  explicit Service(ServiceDeps deps);

  // {"text": ..., "title"?: ...} for pasted text (curation bypassed) or
  // {"title": ...} to ingest and curate a Wikipedia article.
  nlohmann::json create_session(const nlohmann::json& body);
  // {"keyword", "styles": [...], "n"}.
  nlohmann::json generate(const std::string& session_id, const nlohmann::json& body);
  // {"action": "accept"|"reject"|"edit", "text"?}.
  nlohmann::json decide(const std::string& clue_id, const nlohmann::json& body);
  // {"rating": "A".."E"}.
  nlohmann::json rate(const std::string& clue_id, const nlohmann::json& body);
  // Optional {"seed", "max_width", "max_height"}.
  nlohmann::json build_puzzle(const std::string& session_id, const nlohmann::json& body);

  struct Rendered {
    std::string content_type;
    std::string body;
  };
  Rendered get_puzzle(const std::string& puzzle_id, const std::string& format) const;
  nlohmann::json get_session(const std::string& session_id) const;
  nlohmann::json get_clue(const std::string& clue_id) const;
  static nlohmann::json codebook();

 private:
  std::filesystem::path session_path(const std::string& id) const;
  std::filesystem::path puzzle_path(const std::string& id) const;
  Session load_session(const std::string& id) const;
  void save_session(const Session& s);
  std::shared_ptr<std::mutex> session_lock(const std::string& id);
  std::string owner_of(const std::string& clue_id) const;
  nlohmann::json clue_view(const ClueRecord& r, const Session& s) const;
  nlohmann::json session_view(const Session& s) const;
  std::string next_id(char prefix, uint64_t& counter);

  ServiceDeps deps_;
  mutable std::mutex mutex_;  // guards the maps and counters below
  std::map<std::string, std::shared_ptr<std::mutex>> session_locks_;
  std::map<std::string, std::string> clue_owner_;
  uint64_t next_session_ = 1;
  uint64_t next_puzzle_ = 1;
};

// HTTP status for a failure: 404 NotFound, 502 for gateway failures, 500 for
// IoError, 400 otherwise.
int http_status(ErrorCode code);

// Registers the /v1 routes. Error bodies are
// {"error": {"code", "message", "details"?}}.
void register_routes(httplib::Server& server, Service& service);

}  // namespace cruciverba
