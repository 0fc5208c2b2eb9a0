#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "timeset/errors.hpp"

namespace timeset {

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_base_s = 0.25;  // doubles per attempt
};

enum class BackendKind { Http, Replay, Oracle, StubFixed };

const char* to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& name);

struct BackendConfig {
  BackendKind kind = BackendKind::Oracle;
  std::string endpoint;     // http: e.g. http://127.0.0.1:8080/v1/completions
  std::string model;        // http: model field of the request body
  std::string auth_env;     // name of the env var holding a bearer token
  int max_in_flight = 4;
  RetryPolicy retry;
  double timeout_s = 30.0;
  std::string cache_path;         // replay source / read-through cache file
  std::string fixed_completion;   // stub-fixed
};

struct GenerationRequest {
  std::string id;
  std::string prompt;
  int max_new_tokens = 128;
  std::string decoding = "greedy";
  double temperature = 0.0;
  std::vector<std::string> stop;
};

struct GenerationResponse {
  std::string id;
  std::string completion;
  double latency_ms = 0.0;
  std::string backend_id;
  bool cache_hit = false;
};

// Stable content hash of (prompt, decoding params); identical across runs
// and platforms.
std::string cache_key(const GenerationRequest& request);
std::string prompt_hash(const std::string& prompt);

class Backend {
 public:
  virtual ~Backend() = default;
  // Throws TimesetError with kind Transient (retries exhausted), Permanent,
  // Timeout, or CacheMiss.
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
  virtual std::string id() const = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Answers each request by its id, for deterministic end-to-end testing.
std::unique_ptr<Backend> make_oracle_backend(
    std::map<std::string, std::string> answers_by_request_id);

// Read-through cache: hits skip the inner backend; misses are appended to the
// JSON-lines cache file {key, prompt_hash, completion, params, timestamp}.
std::unique_ptr<Backend> make_caching_backend(std::unique_ptr<Backend> inner,
                                              const std::filesystem::path& cache_path);

struct BatchFailure {
  std::string id;
  ErrorKind kind = ErrorKind::Permanent;
  std::string message;
};

struct BatchResult {
  std::vector<GenerationResponse> responses;  // successes, in input order
  std::vector<BatchFailure> failures;         // in input order
};

// Bounded-parallel dispatch with deterministic result ordering; at most
// max_in_flight requests are outstanding at any moment.
BatchResult generate_batch(Backend& backend,
                           const std::vector<GenerationRequest>& requests,
                           int max_in_flight);

}  // namespace timeset
