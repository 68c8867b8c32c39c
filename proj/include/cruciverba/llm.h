#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "cruciverba/clue_record.h"
#include "cruciverba/clue_style.h"
#include "cruciverba/http.h"
#include "cruciverba/util.h"
#include "cruciverba/wiki.h"

namespace cruciverba {

// Defaults are the inference settings used for the fine-tuned clue models.
struct GenerationParams {
  double temperature = 0.1;
  double top_p = 0.95;
  int top_k = 50;
  int max_tokens = 512;
  std::string model_id = "gpt-4o";

  void validate() const;
  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

nlohmann::json to_json(const GenerationParams& p);
GenerationParams generation_params_from_json(const nlohmann::json& j);

struct GenerationTranscript {
  std::string request_id;
  std::string prompt;
  std::string raw_response;
  GenerationParams params;
  int64_t latency_ms = 0;
  std::string endpoint;
  std::chrono::system_clock::time_point timestamp;
  int retries = 0;

  friend bool operator==(const GenerationTranscript&, const GenerationTranscript&) = default;
};

// Append-only JSONL log. Every request is logged as an "intent" line before
// it is sent and as a "response" line when it completes, so a response never
// exists without its request. Writes are serialized and flushed per line.
class TranscriptStore {
 public:
  // An empty path keeps the log in memory only.
  explicit TranscriptStore(std::filesystem::path path = {});

  void log_intent(const std::string& request_id, const std::string& endpoint, const std::string& prompt,
                  const GenerationParams& params, std::chrono::system_clock::time_point at);
  void log_response(const GenerationTranscript& t);
  void log_failure(const std::string& request_id, const std::string& reason);

  std::vector<nlohmann::json> lines() const;

 private:
  void append(const nlohmann::json& line);

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::vector<nlohmann::json> memory_;
};

struct GatewayConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  bool requires_auth = true;
  // Sends top_k only to endpoints that accept it (self-hosted servers do,
  // the hosted chat API does not).
  bool supports_top_k = false;
  int max_in_flight = 2;
  http::RetryPolicy retry{3, std::chrono::milliseconds(500), true, 0, http::real_sleeper()};

  // CRUCIVERBA_LLM_BASE, CRUCIVERBA_LLM_API_KEY, CRUCIVERBA_LLM_SUPPORTS_TOP_K.
  static GatewayConfig from_env();
};

// Client for chat-completions compatible endpoints.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<http::Transport> transport, GatewayConfig config,
             std::shared_ptr<TranscriptStore> transcripts, Clock clock = system_clock());

  // Errors: InvalidArgument (empty prompt), AuthFailure (401/403 or missing
  // key; never retried), RateLimited (429 after retries), UpstreamError (5xx
  // after retries), Timeout, MalformedResponse.
  GenerationTranscript generate(const std::string& prompt, const GenerationParams& params);

  std::string request_body(const std::string& prompt, const GenerationParams& params) const;
  const GatewayConfig& config() const { return config_; }

 private:
  std::shared_ptr<http::Transport> transport_;
  GatewayConfig config_;
  std::shared_ptr<TranscriptStore> transcripts_;
  Clock clock_;
};

struct ClueDrafts {
  std::vector<ClueRecord> drafts;  // unvalidated, unrated, no id
  int requested = 0;
  bool shortfall = false;
  GenerationTranscript transcript;
};

// render_prompt -> generate -> parse_clue_list. The keyword must be one of the
// article's bold keywords or pass filter_keyword; an empty context fails with
// EmptyContext before any request is made.
ClueDrafts generate_clues(LlmGateway& gateway, const ArticleRecord& article, const std::string& keyword,
                          ClueStyle style, int n, const GenerationParams& params,
                          const PromptLibrary& prompts = PromptLibrary::builtin());

}  // namespace cruciverba
