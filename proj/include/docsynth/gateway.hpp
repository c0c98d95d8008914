#pragma once

#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace docsynth {

struct ChatRequest {
  std::string system_text;  // optional
  std::string user_text;    // required non-empty
  double temperature = 0.7;
  int max_output_tokens = 2048;
  std::string tag;  // replay key prefix, free form
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct ChatResult {
  std::string text;
  TokenUsage usage;
  int attempts = 1;
  bool from_replay = false;
};

enum class GatewayMode { live, record, replay };

GatewayMode gateway_mode_from_string(const std::string& s);
const char* to_string(GatewayMode m);

struct GatewayConfig {
  std::string endpoint;  // full URL, e.g. http://host:port/v1/chat/completions
  std::string model;
  int max_retries = 3;   // retries beyond the first attempt
  int max_inflight = 4;
  GatewayMode mode = GatewayMode::replay;
  std::filesystem::path replay_store;
  int retry_backoff_ms = 200;
  std::string api_key_env = "DOCSYNTH_API_KEY";
  double temperature = 0.7;  // defaults picked up by the pipelines
  int max_output_tokens = 2048;
};

// Thread-safe chat-completion client. In replay mode complete() is a pure
// function of the request: responses come from the store, never the
// network, and a miss fails loudly.
class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig config);

  ChatResult complete(const ChatRequest& req);

  TokenUsage total_usage() const;
  long long total_calls() const;

  const GatewayConfig& config() const { return config_; }

  // (tag, prompt-hash) key; template edits invalidate stale fixtures.
  static std::string replay_key(const ChatRequest& req);

 private:
  ChatResult complete_live(const ChatRequest& req);
  ChatResult complete_replay(const ChatRequest& req);
  void persist(const ChatRequest& req, const ChatResult& result);

  GatewayConfig config_;
  mutable std::mutex mu_;
  std::condition_variable slot_free_;
  int inflight_ = 0;
  TokenUsage usage_;
  long long calls_ = 0;
};

// One triple-backtick block: `label` is the fence-line word ("json",
// "csv", ... , empty for a bare fence), `body` the enclosed text.
struct FencedBlock {
  std::string label;
  std::string body;
};

std::vector<FencedBlock> scan_fenced_blocks(const std::string& llm_text);

// First fenced block opening with ```json (or a bare ```) that parses as
// JSON. Throws Error "no json fence found" / "fence not valid JSON".
nlohmann::json extract_json_fence(const std::string& llm_text);

std::string wrap_json_fence(const nlohmann::json& value);

}  // namespace docsynth
