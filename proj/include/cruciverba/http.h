#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>

namespace cruciverba::http {

struct Request {
  std::string method = "GET";
  std::string url;  // absolute: scheme://host[:port]/path?query
  std::map<std::string, std::string> headers;
  std::string body;
};

struct Response {
  int status = 0;
  std::map<std::string, std::string> headers;
  std::string body;
};

// Transports throw cruciverba::Error with kNetwork or kTimeout on transport
// failure; any HTTP status is returned as a Response.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response send(const Request& request) = 0;
};

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path_and_query;

  std::string origin() const;
};

Url parse_url(const std::string& url);
std::string percent_encode(std::string_view s);

// cpp-httplib backed client; HTTPS through OpenSSL.
class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  Response send(const Request& request) override;

 private:
  std::chrono::seconds timeout_;
};

// Caps the number of in-flight requests per host.
class BoundedTransport final : public Transport {
 public:
  BoundedTransport(std::shared_ptr<Transport> inner, int max_in_flight_per_host);
  Response send(const Request& request) override;

 private:
  struct Slot {
    std::mutex mutex;
    std::condition_variable cv;
    int in_flight = 0;
  };
  Slot& slot_for(const std::string& host);

  std::shared_ptr<Transport> inner_;
  int limit_;
  std::mutex slots_mutex_;
  std::unordered_map<std::string, std::unique_ptr<Slot>> slots_;
};

// Fixture key: method, path+query and body. The host is excluded so fixtures
// replay regardless of the configured base URL.
std::string fixture_key(const Request& request);

// Serves responses from a directory of JSON fixtures. Each file holds
// {"request": {"method", "path", "body"}, "response": {"status", "headers", "body"}};
// file names are free-form and the lookup key is recomputed from "request".
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(const std::filesystem::path& fixture_dir);
  Response send(const Request& request) override;
  std::size_t fixture_count() const { return fixtures_.size(); }

 private:
  std::map<std::string, Response> fixtures_;
};

// Forwards to `inner` and writes every exchange as a replay fixture.
class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path fixture_dir);
  Response send(const Request& request) override;

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{500};
  bool jitter = false;
  uint64_t jitter_seed = 0;
  Sleeper sleep = real_sleeper();
};

struct RetryOutcome {
  Response response;
  int retries = 0;
};

// Retries on 429, 5xx and transport failures with exponential backoff,
// honoring Retry-After (seconds). Returns the last response when attempts
// run out; rethrows the last transport error if no response was ever received.
RetryOutcome send_with_retry(Transport& transport, const Request& request, const RetryPolicy& policy);

}  // namespace cruciverba::http
