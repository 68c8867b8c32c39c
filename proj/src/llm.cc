#include "cruciverba/llm.h"

#include <cstdlib>

#include "cruciverba/error.h"
#include "cruciverba/text.h"

namespace cruciverba {

using nlohmann::json;

void GenerationParams::validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "top_p must be in (0, 1]");
  if (top_k < 1) throw Error(ErrorCode::kInvalidConfig, "top_k must be positive");
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidConfig, "max_tokens must be positive");
  if (model_id.empty()) throw Error(ErrorCode::kInvalidConfig, "model_id is empty");
}

json to_json(const GenerationParams& p) {
  return json{{"temperature", p.temperature},
              {"top_p", p.top_p},
              {"top_k", p.top_k},
              {"max_tokens", p.max_tokens},
              {"model_id", p.model_id}};
}

GenerationParams generation_params_from_json(const json& j) {
  GenerationParams p;
  p.temperature = j.value("temperature", p.temperature);
  p.top_p = j.value("top_p", p.top_p);
  p.top_k = j.value("top_k", p.top_k);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  p.model_id = j.value("model_id", p.model_id);
  return p;
}

TranscriptStore::TranscriptStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!path_.empty() && path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void TranscriptStore::append(const json& line) {
  std::lock_guard lock(mutex_);
  memory_.push_back(line);
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path_.string());
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path_.string());
}

void TranscriptStore::log_intent(const std::string& request_id, const std::string& endpoint, const std::string& prompt,
                                 const GenerationParams& params, std::chrono::system_clock::time_point at) {
  append(json{{"kind", "intent"},
              {"request_id", request_id},
              {"endpoint", endpoint},
              {"prompt", prompt},
              {"params", to_json(params)},
              {"timestamp", format_utc(at)}});
}

void TranscriptStore::log_response(const GenerationTranscript& t) {
  append(json{{"kind", "response"},
              {"request_id", t.request_id},
              {"raw_response", t.raw_response},
              {"latency_ms", t.latency_ms},
              {"retries", t.retries},
              {"timestamp", format_utc(t.timestamp)}});
}

void TranscriptStore::log_failure(const std::string& request_id, const std::string& reason) {
  append(json{{"kind", "failure"}, {"request_id", request_id}, {"reason", reason}});
}

std::vector<json> TranscriptStore::lines() const {
  std::lock_guard lock(mutex_);
  return memory_;
}

GatewayConfig GatewayConfig::from_env() {
  GatewayConfig c;
  if (const char* v = std::getenv("CRUCIVERBA_LLM_BASE"); v != nullptr && *v != '\0') c.base_url = v;
  if (const char* v = std::getenv("CRUCIVERBA_LLM_API_KEY"); v != nullptr) c.api_key = v;
  if (const char* v = std::getenv("CRUCIVERBA_LLM_SUPPORTS_TOP_K"); v != nullptr) {
    c.supports_top_k = std::string(v) == "1" || std::string(v) == "true";
  }
  return c;
}

LlmGateway::LlmGateway(std::shared_ptr<http::Transport> transport, GatewayConfig config,
                       std::shared_ptr<TranscriptStore> transcripts, Clock clock)
    : config_(std::move(config)), transcripts_(std::move(transcripts)), clock_(std::move(clock)) {
  if (!transcripts_) transcripts_ = std::make_shared<TranscriptStore>();
  transport_ = config_.max_in_flight > 0
                   ? std::make_shared<http::BoundedTransport>(std::move(transport), config_.max_in_flight)
                   : std::move(transport);
}

std::string LlmGateway::request_body(const std::string& prompt, const GenerationParams& params) const {
  json body{{"model", params.model_id},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", params.temperature},
            {"top_p", params.top_p},
            {"max_tokens", params.max_tokens}};
  if (config_.supports_top_k) body["top_k"] = params.top_k;
  return body.dump();
}

GenerationTranscript LlmGateway::generate(const std::string& prompt, const GenerationParams& params) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt is empty");
  params.validate();
  if (config_.requires_auth && config_.api_key.empty()) {
    throw Error(ErrorCode::kAuthFailure, "no API key configured for " + config_.base_url);
  }

  http::Request req;
  req.method = "POST";
  req.url = config_.base_url + "/chat/completions";
  req.headers["Content-Type"] = "application/json";
  if (!config_.api_key.empty()) req.headers["Authorization"] = "Bearer " + config_.api_key;
  req.body = request_body(prompt, params);

  GenerationTranscript t;
  t.request_id = sha256_hex(req.body).substr(0, 16);
  t.prompt = prompt;
  t.params = params;
  t.endpoint = req.url;
  t.timestamp = clock_();
  transcripts_->log_intent(t.request_id, t.endpoint, prompt, params, t.timestamp);

  http::RetryOutcome outcome;
  try {
    outcome = http::send_with_retry(*transport_, req, config_.retry);
  } catch (const Error& e) {
    transcripts_->log_failure(t.request_id, e.what());
    throw;
  }
  const auto finished = clock_();
  t.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(finished - t.timestamp).count();
  t.retries = outcome.retries;

  const auto fail = [&](ErrorCode code, const std::string& msg) {
    transcripts_->log_failure(t.request_id, std::string(to_string(code)) + ": " + msg);
    throw Error(code, msg);
  };
  const int status = outcome.response.status;
  if (status == 401 || status == 403) fail(ErrorCode::kAuthFailure, "endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
  if (status == 429) fail(ErrorCode::kRateLimited, "rate limited after " + std::to_string(t.retries) + " retries");
  if (status == 408 || status == 504) fail(ErrorCode::kTimeout, "endpoint timed out (HTTP " + std::to_string(status) + ")");
  if (status >= 500) fail(ErrorCode::kUpstreamError, "HTTP " + std::to_string(status) + " after retries");
  if (status != 200) fail(ErrorCode::kInvalidArgument, "HTTP " + std::to_string(status) + ": " + outcome.response.body);

  json doc = json::parse(outcome.response.body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    fail(ErrorCode::kMalformedResponse, "response has no choices");
  }
  const json& choice = doc["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    fail(ErrorCode::kMalformedResponse, "first choice has no message content");
  }
  t.raw_response = choice["message"]["content"].get<std::string>();
  transcripts_->log_response(t);
  return t;
}

ClueDrafts generate_clues(LlmGateway& gateway, const ArticleRecord& article, const std::string& keyword,
                          ClueStyle style, int n, const GenerationParams& params, const PromptLibrary& prompts) {
  const std::string prompt = prompts.render(article.intro_text, keyword, n, style);
  ClueDrafts out;
  out.requested = n;
  out.transcript = gateway.generate(prompt, params);
  const auto clues = parse_clue_list(out.transcript.raw_response, n);
  out.shortfall = static_cast<int>(clues.size()) < n;
  for (const auto& clue : clues) {
    ClueRecord r;
    r.title = article.title;
    r.url = article.url;
    r.category = article.categories.empty() ? std::string() : article.categories.front();
    r.context = article.intro_text;
    r.keyword = text::trim(keyword);
    r.style = style;
    r.clue = clue;
    r.model_id = params.model_id;
    r.validation.requested_style = style;
    r.created_at = out.transcript.timestamp;
    out.drafts.push_back(std::move(r));
  }
  return out;
}

}  // namespace cruciverba
