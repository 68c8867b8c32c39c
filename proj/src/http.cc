#include "cruciverba/http.h"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <thread>

#include "cruciverba/error.h"
#include "cruciverba/util.h"

namespace cruciverba::http {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](char x, char y) { return std::tolower(static_cast<unsigned char>(x)) ==
                                                std::tolower(static_cast<unsigned char>(y)); });
}

}  // namespace

using nlohmann::json;

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  const bool default_port = (scheme == "https" && port == 443) || (scheme == "http" && port == 80);
  if (!default_port) out += ":" + std::to_string(port);
  return out;
}

Url parse_url(const std::string& url) {
  Url out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "not an absolute URL: " + url);
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported scheme in " + url);
  }
  const auto authority_begin = scheme_end + 3;
  const auto path_begin = url.find('/', authority_begin);
  std::string authority = url.substr(authority_begin, path_begin == std::string::npos ? std::string::npos
                                                                                       : path_begin - authority_begin);
  out.path_and_query = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad port in " + url);
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty()) throw Error(ErrorCode::kInvalidArgument, "missing host in " + url);
  return out;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

Response HttplibTransport::send(const Request& request) {
  const Url url = parse_url(request.url);
  httplib::Client client(url.origin());
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (iequals(k, "Content-Type")) {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }

  httplib::Result result;
  if (request.method == "GET") {
    result = client.Get(url.path_and_query, headers);
  } else if (request.method == "POST") {
    result = client.Post(url.path_and_query, headers, request.body, content_type);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unsupported method " + request.method);
  }

  if (!result) {
    const auto err = result.error();
    const std::string what = httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Error(ErrorCode::kTimeout, request.url + ": " + what);
    }
    throw Error(ErrorCode::kNetwork, request.url + ": " + what);
  }
  Response out;
  out.status = result->status;
  out.body = result->body;
  for (const auto& [k, v] : result->headers) out.headers[k] = v;
  return out;
}

BoundedTransport::BoundedTransport(std::shared_ptr<Transport> inner, int max_in_flight_per_host)
    : inner_(std::move(inner)), limit_(max_in_flight_per_host) {
  if (limit_ < 1) throw Error(ErrorCode::kInvalidConfig, "in-flight limit must be positive");
}

BoundedTransport::Slot& BoundedTransport::slot_for(const std::string& host) {
  std::lock_guard lock(slots_mutex_);
  auto& slot = slots_[host];
  if (!slot) slot = std::make_unique<Slot>();
  return *slot;
}

Response BoundedTransport::send(const Request& request) {
  Slot& slot = slot_for(parse_url(request.url).host);
  {
    std::unique_lock lock(slot.mutex);
    slot.cv.wait(lock, [&] { return slot.in_flight < limit_; });
    ++slot.in_flight;
  }
  struct Release {
    Slot& slot;
    ~Release() {
      {
        std::lock_guard lock(slot.mutex);
        --slot.in_flight;
      }
      slot.cv.notify_one();
    }
  } release{slot};
  return inner_->send(request);
}

namespace {

std::string path_of(const Request& request) {
  try {
    return parse_url(request.url).path_and_query;
  } catch (const Error&) {
    return request.url;
  }
}

std::string key_from(const std::string& method, const std::string& path, const std::string& body) {
  return sha256_hex(method + " " + path + "\n" + body);
}

}  // namespace

std::string fixture_key(const Request& request) { return key_from(request.method, path_of(request), request.body); }

ReplayTransport::ReplayTransport(const std::filesystem::path& fixture_dir) {
  if (!std::filesystem::is_directory(fixture_dir)) {
    throw Error(ErrorCode::kIoError, "replay fixture directory not found: " + fixture_dir.string());
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(fixture_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    json doc;
    try {
      doc = json::parse(read_file(entry.path()));
      const json& req = doc.at("request");
      const json& res = doc.at("response");
      // Request bodies may be stored as JSON objects for readability; the key
      // is computed over their compact serialization.
      const json body_node = req.contains("body") ? req.at("body") : json("");
      const std::string body = body_node.is_string() ? body_node.get<std::string>() : body_node.dump();
      Response response;
      response.status = res.at("status").get<int>();
      const json res_body = res.contains("body") ? res.at("body") : json("");
      response.body = res_body.is_string() ? res_body.get<std::string>() : res_body.dump();
      if (res.contains("headers")) {
        for (const auto& [k, v] : res.at("headers").items()) response.headers[k] = v.get<std::string>();
      }
      fixtures_[key_from(req.contains("method") ? req.at("method").get<std::string>() : "GET", req.at("path").get<std::string>(), body)] = std::move(response);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaError, "bad fixture " + entry.path().string() + ": " + e.what());
    }
  }
}

Response ReplayTransport::send(const Request& request) {
  auto it = fixtures_.find(fixture_key(request));
  if (it == fixtures_.end()) {
    throw Error(ErrorCode::kFixtureMissing, request.method + " " + path_of(request) + " has no recorded fixture");
  }
  return it->second;
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {}

Response RecordingTransport::send(const Request& request) {
  Response response = inner_->send(request);
  json req{{"method", request.method}, {"path", path_of(request)}};
  // Keep JSON bodies structured so recorded prompts stay diffable.
  json parsed = json::parse(request.body, nullptr, false);
  if (!request.body.empty() && !parsed.is_discarded() && parsed.dump() == request.body) {
    req["body"] = parsed;
  } else {
    req["body"] = request.body;
  }
  json res{{"status", response.status}, {"body", response.body}, {"headers", json::object()}};
  json parsed_body = json::parse(response.body, nullptr, false);
  if (!parsed_body.is_discarded() && parsed_body.is_structured()) res["body"] = parsed_body;
  for (const char* h : {"Content-Type", "Retry-After"}) {
    auto it = response.headers.find(h);
    if (it != response.headers.end()) res["headers"][h] = it->second;
  }
  const json doc{{"request", req}, {"response", res}};
  write_file_atomic(dir_ / (fixture_key(request).substr(0, 16) + ".json"), doc.dump(2) + "\n");
  return response;
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {

bool retryable(int status) { return status == 429 || (status >= 500 && status <= 599); }

std::chrono::milliseconds retry_after(const Response& response) {
  for (const auto& [k, v] : response.headers) {
    if (iequals(k, "Retry-After")) {
      try {
        return std::chrono::seconds(std::stol(v));
      } catch (const std::exception&) {
        return std::chrono::milliseconds(-1);
      }
    }
  }
  return std::chrono::milliseconds(-1);
}

}  // namespace

RetryOutcome send_with_retry(Transport& transport, const Request& request, const RetryPolicy& policy) {
  if (policy.max_attempts < 1) throw Error(ErrorCode::kInvalidConfig, "max_attempts must be >= 1");
  std::mt19937_64 rng(policy.jitter_seed ^ sha256_prefix64(request.url));
  RetryOutcome outcome;
  for (int attempt = 1;; ++attempt) {
    const bool last = attempt == policy.max_attempts;
    std::chrono::milliseconds delay = policy.base_delay * (1LL << (attempt - 1));
    if (policy.jitter && delay.count() > 1) {
      const auto half = delay.count() / 2;
      delay = std::chrono::milliseconds(half + static_cast<long long>(rng() % static_cast<uint64_t>(half + 1)));
    }
    try {
      outcome.response = transport.send(request);
    } catch (const Error& e) {
      if (last || (e.code() != ErrorCode::kNetwork && e.code() != ErrorCode::kTimeout)) throw;
      ++outcome.retries;
      policy.sleep(delay);
      continue;
    }
    if (!retryable(outcome.response.status) || last) return outcome;
    const auto hinted = retry_after(outcome.response);
    ++outcome.retries;
    policy.sleep(hinted.count() >= 0 ? hinted : delay);
  }
}

}  // namespace cruciverba::http
