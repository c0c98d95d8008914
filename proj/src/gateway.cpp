#include "docsynth/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

GatewayMode gateway_mode_from_string(const std::string& s) {
  if (s == "live") return GatewayMode::live;
  if (s == "record") return GatewayMode::record;
  if (s == "replay") return GatewayMode::replay;
  throw ConfigError("unknown gateway mode: " + s);
}

const char* to_string(GatewayMode m) {
  switch (m) {
    case GatewayMode::live: return "live";
    case GatewayMode::record: return "record";
    case GatewayMode::replay: return "replay";
  }
  return "replay";
}

LlmGateway::LlmGateway(GatewayConfig config) : config_(std::move(config)) {
  if (config_.max_inflight < 1) throw ConfigError("max_inflight must be positive");
  if (config_.mode == GatewayMode::replay &&
      !std::filesystem::is_directory(config_.replay_store))
    throw ConfigError("replay mode requires an existing store: " +
                      config_.replay_store.string());
}

std::string LlmGateway::replay_key(const ChatRequest& req) {
  std::string tag;
  for (char c : req.tag)
    tag += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
               ? c
               : '_';
  if (tag.empty()) tag = "untagged";
  return tag + "-" + text::sha256_hex(req.user_text).substr(0, 16);
}

ChatResult LlmGateway::complete(const ChatRequest& req) {
  if (req.user_text.empty()) throw GatewayError("empty user_text");
  ChatResult result;
  switch (config_.mode) {
    case GatewayMode::replay:
      result = complete_replay(req);
      break;
    case GatewayMode::record:
      result = complete_live(req);
      persist(req, result);
      break;
    case GatewayMode::live:
      result = complete_live(req);
      break;
  }
  std::lock_guard<std::mutex> lock(mu_);
  usage_.prompt_tokens += result.usage.prompt_tokens;
  usage_.completion_tokens += result.usage.completion_tokens;
  ++calls_;
  return result;
}

ChatResult LlmGateway::complete_replay(const ChatRequest& req) {
  const std::string key = replay_key(req);
  const auto path = config_.replay_store / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GatewayError("replay miss: " + key);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw GatewayError("corrupt replay entry " + key + ": " + e.what());
  }
  ChatResult result;
  result.text = j.at("response").at("text").get<std::string>();
  result.usage.prompt_tokens = j["response"].value("prompt_tokens", 0LL);
  result.usage.completion_tokens = j["response"].value("completion_tokens", 0LL);
  result.from_replay = true;
  return result;
}

void LlmGateway::persist(const ChatRequest& req, const ChatResult& result) {
  std::filesystem::create_directories(config_.replay_store);
  ordered_json j{
      {"request",
       ordered_json{{"tag", req.tag},
                    {"model", config_.model},
                    {"temperature", req.temperature},
                    {"max_output_tokens", req.max_output_tokens},
                    {"system_text", req.system_text},
                    {"user_text", req.user_text}}},
      {"response",
       ordered_json{{"text", result.text},
                    {"prompt_tokens", result.usage.prompt_tokens},
                    {"completion_tokens", result.usage.completion_tokens}}}};
  const auto path = config_.replay_store / (replay_key(req) + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GatewayError("cannot write replay entry: " + path.string());
  out << j.dump(2) << "\n";
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must be a full URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ChatResult LlmGateway::complete_live(const ChatRequest& req) {
  {
    std::unique_lock<std::mutex> lock(mu_);
    slot_free_.wait(lock, [&] { return inflight_ < config_.max_inflight; });
    ++inflight_;
  }
  struct SlotRelease {
    LlmGateway* gw;
    ~SlotRelease() {
      {
        std::lock_guard<std::mutex> lock(gw->mu_);
        --gw->inflight_;
      }
      gw->slot_free_.notify_one();
    }
  } release{this};

  ParsedUrl url = parse_url(config_.endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  json messages = json::array();
  if (!req.system_text.empty())
    messages.push_back({{"role", "system"}, {"content", req.system_text}});
  messages.push_back({{"role", "user"}, {"content", req.user_text}});
  json body{{"model", config_.model},
            {"messages", messages},
            {"temperature", req.temperature},
            {"max_tokens", req.max_output_tokens}};

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      json j;
      try {
        j = json::parse(res->body);
        ChatResult result;
        result.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
          result.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
          result.usage.completion_tokens = j["usage"].value("completion_tokens", 0LL);
        }
        result.attempts = attempt;
        return result;
      } catch (const json::exception& e) {
        last_error = std::string("malformed response body: ") + e.what();
      }
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "http " + std::to_string(res->status);
    } else {
      throw GatewayError("http " + std::to_string(res->status) + ": " + res->body);
    }
    if (attempt <= config_.max_retries && config_.retry_backoff_ms > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
  }
  throw GatewayError("retries exhausted after " +
                     std::to_string(config_.max_retries + 1) + " attempts: " +
                     last_error);
}

TokenUsage LlmGateway::total_usage() const {
  std::lock_guard<std::mutex> lock(mu_);
  return usage_;
}

long long LlmGateway::total_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

namespace {

bool is_label_word(const std::string& s) {
  if (s.empty() || s.size() > 16) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '+' && c != '-')
      return false;
  return true;
}

}  // namespace

std::vector<FencedBlock> scan_fenced_blocks(const std::string& s) {
  std::vector<FencedBlock> fences;
  size_t pos = 0;
  while (true) {
    size_t open = s.find("```", pos);
    if (open == std::string::npos) break;
    size_t close = s.find("```", open + 3);
    if (close == std::string::npos) break;
    std::string content = s.substr(open + 3, close - open - 3);
    FencedBlock f;
    size_t nl = content.find('\n');
    if (nl == std::string::npos) {
      // single-line fence; an optional leading "json " style label
      size_t sp = content.find(' ');
      if (sp != std::string::npos && is_label_word(content.substr(0, sp))) {
        f.label = content.substr(0, sp);
        f.body = content.substr(sp + 1);
      } else {
        f.body = content;
      }
    } else {
      std::string first_line = text::trim(content.substr(0, nl));
      if (first_line.empty() || is_label_word(first_line)) {
        f.label = first_line;
        f.body = content.substr(nl + 1);
      } else {
        f.body = content;
      }
    }
    fences.push_back(std::move(f));
    pos = close + 3;
  }
  return fences;
}

json extract_json_fence(const std::string& llm_text) {
  auto fences = scan_fenced_blocks(llm_text);
  if (fences.empty()) throw Error("no json fence found in response");
  std::string first_bad;
  for (const auto& f : fences) {
    if (!f.label.empty() && text::to_lower_ascii(f.label) != "json") continue;
    try {
      return json::parse(f.body);
    } catch (const json::exception&) {
      if (first_bad.empty()) first_bad = f.body.substr(0, 120);
    }
  }
  if (first_bad.empty()) throw Error("no json fence found in response");
  throw Error("fence not valid JSON: " + first_bad);
}

std::string wrap_json_fence(const json& value) {
  return "```json\n" + value.dump() + "\n```";
}

}  // namespace docsynth
