#include "timeset/client.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "timeset/rng.hpp"

namespace timeset {

const char* to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Http: return "http";
    case BackendKind::Replay: return "replay";
    case BackendKind::Oracle: return "oracle";
    case BackendKind::StubFixed: return "stub-fixed";
  }
  return "oracle";
}

BackendKind backend_kind_from_string(const std::string& name) {
  if (name == "http") return BackendKind::Http;
  if (name == "replay") return BackendKind::Replay;
  if (name == "oracle") return BackendKind::Oracle;
  if (name == "stub-fixed") return BackendKind::StubFixed;
  fail(ErrorKind::ConfigError, "not a backend kind: " + name);
}

namespace {

std::string canonical_params(const GenerationRequest& request) {
  char temperature[32];
  std::snprintf(temperature, sizeof(temperature), "%.6g", request.temperature);
  std::string canon = request.decoding;
  canon += '\x1f';
  canon += std::to_string(request.max_new_tokens);
  canon += '\x1f';
  canon += temperature;
  for (const auto& stop : request.stop) {
    canon += '\x1e';
    canon += stop;
  }
  return canon;
}

void validate_request(const GenerationRequest& request) {
  if (request.prompt.empty()) {
    fail(ErrorKind::Permanent, request.id + ": empty prompt");
  }
  if (request.max_new_tokens <= 0) {
    fail(ErrorKind::Permanent, request.id + ": max_new_tokens must be positive");
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

}  // namespace

std::string cache_key(const GenerationRequest& request) {
  return to_hex(fnv1a64_mix(fnv1a64(request.prompt), canonical_params(request)));
}

std::string prompt_hash(const std::string& prompt) {
  return to_hex(fnv1a64(prompt));
}

namespace {

class StubFixedBackend : public Backend {
 public:
  explicit StubFixedBackend(std::string completion)
      : completion_(std::move(completion)) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    validate_request(request);
    return {request.id, completion_, 0.0, id(), false};
  }

  std::string id() const override { return "stub-fixed"; }

 private:
  std::string completion_;
};

class OracleBackend : public Backend {
 public:
  explicit OracleBackend(std::map<std::string, std::string> answers)
      : answers_(std::move(answers)) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    validate_request(request);
    auto it = answers_.find(request.id);
    if (it == answers_.end()) {
      fail(ErrorKind::Permanent, "oracle has no answer for request " + request.id);
    }
    return {request.id, it->second, 0.0, id(), false};
  }

  std::string id() const override { return "oracle"; }

 private:
  std::map<std::string, std::string> answers_;
};

struct CacheFile {
  static std::map<std::string, std::string> read(const std::filesystem::path& path) {
    std::map<std::string, std::string> entries;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto row = nlohmann::json::parse(line, nullptr, false);
      if (row.is_discarded() || !row.contains("key") || !row.contains("completion")) {
        fail(ErrorKind::FormatError, "bad cache line in " + path.string());
      }
      entries[row["key"].get<std::string>()] = row["completion"].get<std::string>();
    }
    return entries;
  }
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(const std::filesystem::path& path)
      : path_(path), entries_(CacheFile::read(path)) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    validate_request(request);
    const auto key = cache_key(request);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      fail(ErrorKind::CacheMiss, "no cached completion for " + request.id + " in " +
                                     path_.string());
    }
    return {request.id, it->second, 0.0, id(), true};
  }

  std::string id() const override { return "replay"; }

 private:
  std::filesystem::path path_;
  std::map<std::string, std::string> entries_;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
      fail(ErrorKind::ConfigError, "http endpoint needs scheme://host: " +
                                       config_.endpoint);
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = config_.endpoint;
      path_ = "/v1/completions";
    } else {
      base_ = config_.endpoint.substr(0, path_start);
      path_ = config_.endpoint.substr(path_start);
    }
  }

  GenerationResponse generate(const GenerationRequest& request) override {
    validate_request(request);
    const auto start = std::chrono::steady_clock::now();

    nlohmann::json body;
    body["model"] = config_.model;
    body["prompt"] = request.prompt;
    body["max_tokens"] = request.max_new_tokens;
    body["temperature"] = request.temperature;
    if (!request.stop.empty()) body["stop"] = request.stop;

    httplib::Headers headers;
    if (!config_.auth_env.empty()) {
      if (const char* token = std::getenv(config_.auth_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }

    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      if (attempt > 1) {
        const double delay =
            config_.retry.backoff_base_s * static_cast<double>(1 << (attempt - 2));
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
      httplib::Client client(base_);
      client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
      client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));

      auto res = client.Post(path_, headers, body.dump(), "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;  // connection-level problem, retry
      }
      if (res->status >= 500) {
        last_error = "server returned " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        fail(ErrorKind::Permanent, request.id + ": server returned " +
                                       std::to_string(res->status) + " " + res->body);
      }
      return {request.id, extract_completion(request, res->body), elapsed_ms(start),
              id(), false};
    }
    fail(ErrorKind::Transient, request.id + ": " + std::to_string(
                                   config_.retry.max_attempts) +
                                   " attempts failed, last error: " + last_error);
  }

  std::string id() const override { return "http:" + base_; }

 private:
  static std::string extract_completion(const GenerationRequest& request,
                                        const std::string& body) {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded()) {
      fail(ErrorKind::Permanent, request.id + ": response is not JSON");
    }
    if (parsed.contains("choices") && parsed["choices"].is_array() &&
        !parsed["choices"].empty()) {
      const auto& first = parsed["choices"][0];
      if (first.contains("text")) return first["text"].get<std::string>();
      if (first.contains("message") && first["message"].contains("content")) {
        return first["message"]["content"].get<std::string>();
      }
    }
    if (parsed.contains("completion")) return parsed["completion"].get<std::string>();
    fail(ErrorKind::Permanent, request.id + ": no completion in response body");
  }

  BackendConfig config_;
  std::string base_;
  std::string path_;
};

class CachingBackend : public Backend {
 public:
  CachingBackend(std::unique_ptr<Backend> inner, const std::filesystem::path& path)
      : inner_(std::move(inner)), path_(path) {
    if (std::filesystem::exists(path_)) entries_ = CacheFile::read(path_);
  }

  GenerationResponse generate(const GenerationRequest& request) override {
    const auto key = cache_key(request);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        return {request.id, it->second, 0.0, inner_->id(), true};
      }
    }
    auto response = inner_->generate(request);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (entries_.emplace(key, response.completion).second) {
        append_entry(key, request, response.completion);
      }
    }
    return response;
  }

  std::string id() const override { return inner_->id(); }

 private:
  void append_entry(const std::string& key, const GenerationRequest& request,
                    const std::string& completion) {
    nlohmann::json row;
    row["key"] = key;
    row["prompt_hash"] = prompt_hash(request.prompt);
    row["completion"] = completion;
    row["params"] = {{"decoding", request.decoding},
                     {"max_tokens", request.max_new_tokens},
                     {"temperature", request.temperature},
                     {"stop", request.stop}};
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    row["timestamp"] = stamp;
    std::ofstream out(path_, std::ios::app);
    out << row.dump() << "\n";
  }

  std::unique_ptr<Backend> inner_;
  std::filesystem::path path_;
  std::map<std::string, std::string> entries_;
  std::mutex mutex_;
};

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  switch (config.kind) {
    case BackendKind::Http:
      if (config.endpoint.empty()) {
        fail(ErrorKind::ConfigError, "http backend requires an endpoint");
      }
      return std::make_unique<HttpBackend>(config);
    case BackendKind::Replay:
      if (config.cache_path.empty()) {
        fail(ErrorKind::ConfigError, "replay backend requires a cache path");
      }
      return std::make_unique<ReplayBackend>(config.cache_path);
    case BackendKind::Oracle:
      fail(ErrorKind::ConfigError,
           "oracle backends are built from instances; use make_oracle_backend");
    case BackendKind::StubFixed:
      return std::make_unique<StubFixedBackend>(config.fixed_completion);
  }
  fail(ErrorKind::ConfigError, "unhandled backend kind");
}

std::unique_ptr<Backend> make_oracle_backend(
    std::map<std::string, std::string> answers_by_request_id) {
  return std::make_unique<OracleBackend>(std::move(answers_by_request_id));
}

std::unique_ptr<Backend> make_caching_backend(std::unique_ptr<Backend> inner,
                                              const std::filesystem::path& cache_path) {
  return std::make_unique<CachingBackend>(std::move(inner), cache_path);
}

BatchResult generate_batch(Backend& backend,
                           const std::vector<GenerationRequest>& requests,
                           int max_in_flight) {
  {
    std::set<std::string> ids;
    for (const auto& request : requests) {
      if (!ids.insert(request.id).second) {
        fail(ErrorKind::ConfigError, "duplicate request id " + request.id);
      }
    }
  }
  if (max_in_flight < 1) max_in_flight = 1;

  std::vector<std::optional<GenerationResponse>> slots(requests.size());
  std::vector<std::optional<BatchFailure>> failures(requests.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        slots[i] = backend.generate(requests[i]);
      } catch (const TimesetError& e) {
        failures[i] = BatchFailure{requests[i].id, e.kind(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = BatchFailure{requests[i].id, ErrorKind::Permanent, e.what()};
      }
    }
  };

  const int n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), requests.size());
  std::vector<std::thread> threads;
  for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  BatchResult result;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (slots[i]) {
      result.responses.push_back(std::move(*slots[i]));
    } else if (failures[i]) {
      result.failures.push_back(std::move(*failures[i]));
    }
  }
  return result;
}

}  // namespace timeset
