#include "mambai/llm.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mambai/text.hpp"

using nlohmann::json;

namespace mambai::llm {

GatewayConfig GatewayConfig::from_env() {
  GatewayConfig cfg;
  if (const char* url = std::getenv("LLM_BASE_URL")) cfg.base_url = url;
  if (const char* key = std::getenv("LLM_API_KEY")) cfg.api_key = key;
  return cfg;
}

struct HttpGateway::Impl {
  GatewayConfig config;
  std::mutex mutex;
  std::condition_variable cv;
  int in_flight = 0;
  std::mt19937_64 jitter_rng{std::random_device{}()};

  double jitter() {
    std::uniform_real_distribution<double> dist(-config.jitter_fraction, config.jitter_fraction);
    std::lock_guard<std::mutex> lock(mutex);
    return dist(jitter_rng);
  }
};

HttpGateway::HttpGateway(GatewayConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  if (impl_->config.base_url.empty())
    throw GatewayError(GatewayErrorKind::config, "gateway: no endpoint URL configured");
}

HttpGateway::~HttpGateway() = default;

namespace {

json build_chat_body(const LlmRequest& request, bool split_system) {
  json messages = json::array();
  if (split_system) {
    const auto nl = request.prompt.find('\n');
    const std::string head = request.prompt.substr(0, nl);
    const std::string rest = nl == std::string::npos ? "" : request.prompt.substr(nl + 1);
    messages.push_back({{"role", "system"}, {"content", head}});
    messages.push_back({{"role", "user"}, {"content", text::trim(rest)}});
  } else {
    messages.push_back({{"role", "user"}, {"content", request.prompt}});
  }
  return json{{"model", request.model},
              {"messages", messages},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

LlmResponse HttpGateway::complete(const LlmRequest& request) {
  if (request.prompt.empty())
    throw GatewayError(GatewayErrorKind::request, "gateway: empty prompt");
  if (request.temperature < 0.0 || request.temperature > 2.0)
    throw GatewayError(GatewayErrorKind::request, "gateway: temperature out of [0,2]");

  auto& cfg = impl_->config;
  {
    std::unique_lock<std::mutex> lock(impl_->mutex);
    impl_->cv.wait(lock, [&] { return impl_->in_flight < cfg.max_in_flight; });
    ++impl_->in_flight;
  }
  struct SlotRelease {
    Impl* impl;
    ~SlotRelease() {
      {
        std::lock_guard<std::mutex> lock(impl->mutex);
        --impl->in_flight;
      }
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  const std::string body = build_chat_body(request, cfg.split_system_message).dump();
  const auto start = std::chrono::steady_clock::now();

  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    httplib::Client client(cfg.base_url);
    client.set_connection_timeout(static_cast<time_t>(request.timeout.count()), 0);
    client.set_read_timeout(static_cast<time_t>(request.timeout.count()), 0);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
    if (res && res->status == 200) {
      std::string content;
      try {
        json parsed = json::parse(res->body);
        content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const std::exception& e) {
        throw GatewayError(GatewayErrorKind::protocol,
                           std::string("gateway: malformed completion response: ") + e.what());
      }
      LlmResponse response;
      response.raw_text = std::move(content);
      response.model = request.model;
      response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      response.attempt_count = attempt;
      return response;
    }

    if (res && !retryable_status(res->status)) {
      throw GatewayError(GatewayErrorKind::request,
                         "gateway: HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    last_status = res ? res->status : 0;
    last_error = res ? ("HTTP " + std::to_string(res->status))
                     : ("connection error: " + httplib::to_string(res.error()));

    if (attempt < cfg.max_attempts) {
      double backoff_ms = static_cast<double>(cfg.backoff_base.count()) *
                          std::pow(cfg.backoff_factor, attempt - 1) * (1.0 + impl_->jitter());
      if (backoff_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(backoff_ms)));
    }
  }
  throw GatewayError(GatewayErrorKind::transport,
                     "gateway: retries exhausted after " + std::to_string(cfg.max_attempts) +
                         " attempts (last: " + last_error + ", status " +
                         std::to_string(last_status) + ")");
}

std::string parse_translation(const std::string& raw_text) {
  const std::string kLabel = "Mambai:";
  const std::vector<std::pair<std::string, std::string>> quote_pairs = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};

  // trim, drop the label, peel enclosing quote pairs, to a fixed point
  std::string s = raw_text;
  for (;;) {
    const std::string before = s;
    s = text::trim(s);
    if (s.rfind(kLabel, 0) == 0) s = text::trim(s.substr(kLabel.size()));
    for (const auto& [open, close] : quote_pairs) {
      if (s.size() >= open.size() + close.size() && s.rfind(open, 0) == 0 &&
          s.compare(s.size() - close.size(), close.size(), close) == 0) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
        break;
      }
    }
    if (s == before) break;
  }

  std::string collapsed;
  bool in_newline = false;
  for (char c : s) {
    if (c == '\n' || c == '\r') {
      in_newline = true;
      continue;
    }
    if (in_newline) {
      collapsed += ' ';
      in_newline = false;
    }
    collapsed += c;
  }
  collapsed = text::trim(collapsed);
  if (collapsed.empty())
    throw GatewayError(GatewayErrorKind::empty_translation, "empty translation after cleanup");
  return collapsed;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string completion_cache_key(const std::string& model, const std::string& prompt,
                                 double temperature) {
  std::ostringstream key;
  key << model << '\x1f' << prompt << '\x1f' << temperature;
  return sha256_hex(key.str());
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const std::exception&) {
      // tolerate a torn trailing line from an interrupted run
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& model,
                        const std::string& prompt, const std::string& response) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (entries_.count(key)) return;
  entries_[key] = response;
  json j = {{"key", key}, {"model", model}, {"prompt_sha", sha256_hex(prompt)}, {"response", response}};
  std::ofstream out(path_, std::ios::app);
  out << j.dump() << "\n";
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

}  // namespace mambai::llm
