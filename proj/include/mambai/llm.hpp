#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mambai::llm {

struct LlmRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 256;
  std::chrono::seconds timeout{60};
};

struct LlmResponse {
  std::string raw_text;
  std::string model;
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
};

enum class GatewayErrorKind { transport, protocol, request, config, empty_translation };

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  GatewayErrorKind kind() const { return kind_; }

 private:
  GatewayErrorKind kind_;
};

class Gateway {
 public:
  virtual ~Gateway() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

struct GatewayConfig {
  std::string base_url;  // e.g. http://localhost:8080 or https://api.openai.com
  std::string api_key;
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  double jitter_fraction = 0.2;
  int max_in_flight = 4;
  // The template's system sentence ships inside the user message by
  // default; set true to move the first prompt line into a system message.
  bool split_system_message = false;

  /// Reads LLM_BASE_URL / LLM_API_KEY from the environment.
  static GatewayConfig from_env();
};

/// OpenAI-compatible /v1/chat/completions client with exponential backoff
/// on 429/5xx/connection errors and a bounded number of in-flight requests.
class HttpGateway final : public Gateway {
 public:
  explicit HttpGateway(GatewayConfig config);
  ~HttpGateway() override;
  LlmResponse complete(const LlmRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Normalizes raw model output into a bare hypothesis: trims, strips a
/// leading "Mambai:" label, peels enclosing straight/curly quote pairs,
/// and collapses newline runs to single spaces. Idempotent.
/// Throws GatewayError{empty_translation} when nothing is left.
std::string parse_translation(const std::string& raw_text);

std::string sha256_hex(const std::string& data);

/// Cache key for a completion: SHA-256 over model, prompt and temperature.
std::string completion_cache_key(const std::string& model, const std::string& prompt,
                                 double temperature);

/// Append-only JSONL store of completions keyed by completion_cache_key.
/// Safe for concurrent use from multiple threads of one process.
class ResponseCache {
 public:
  /// Loads existing entries; the file is created lazily on first put.
  explicit ResponseCache(std::string path);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& model, const std::string& prompt,
           const std::string& response);
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

}  // namespace mambai::llm
