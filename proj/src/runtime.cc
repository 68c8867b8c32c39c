#include "cruciverba/runtime.h"

#include "cruciverba/error.h"

namespace cruciverba {

Runtime make_runtime(const RuntimeOptions& options) {
  if (options.replay_dir && options.record_dir) {
    throw Error(ErrorCode::kInvalidArgument, "--replay and --record are mutually exclusive");
  }
  const AppConfig& cfg = options.config;
  Runtime rt;
  GatewayConfig gateway = cfg.gateway;
  http::RetryPolicy wiki_retry;
  if (options.replay_dir) {
    rt.transport = std::make_shared<http::ReplayTransport>(*options.replay_dir);
    rt.clock = fixed_clock(parse_utc(kReplayTimestamp));
    const http::Sleeper no_sleep = [](std::chrono::milliseconds) {};
    gateway.retry.sleep = no_sleep;
    wiki_retry.sleep = no_sleep;
    if (gateway.api_key.empty()) gateway.requires_auth = false;
  } else {
    rt.transport = std::make_shared<http::HttplibTransport>();
    if (options.record_dir) rt.transport = std::make_shared<http::RecordingTransport>(rt.transport, *options.record_dir);
    rt.clock = system_clock();
  }
  rt.cache = std::make_shared<ArticleCache>(cfg.paths.cache_dir);
  rt.wiki = std::make_shared<WikiClient>(rt.transport, rt.cache, cfg.wiki, wiki_retry, rt.clock);
  rt.transcripts = std::make_shared<TranscriptStore>(
      cfg.paths.transcripts.empty() ? cfg.paths.data_dir / "transcripts.jsonl" : cfg.paths.transcripts);
  rt.gateway = std::make_shared<LlmGateway>(rt.transport, gateway, rt.transcripts, rt.clock);
  return rt;
}

}  // namespace cruciverba
