#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/rng.hpp"

using namespace docsynth;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_store(const std::string& name) {
  auto dir = fs::temp_directory_path() / "docsynth_gateway_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Minimal chat-completions stub with scriptable failures.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};  // respond 429 to this many requests
  std::atomic<int> inflight{0};
  std::atomic<int> max_inflight_seen{0};

  StubServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      int now = ++inflight;
      int seen = max_inflight_seen.load();
      while (now > seen && !max_inflight_seen.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      int n = ++hits;
      if (n <= fail_first.load()) {
        res.status = 429;
        res.set_content("slow down", "text/plain");
      } else {
        json body = json::parse(req.body);
        json reply{
            {"choices",
             {{{"message",
                {{"content", "echo: " + body["messages"].back()["content"]
                                             .get<std::string>()}}}}}},
            {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
        res.set_content(reply.dump(), "application/json");
      }
      --inflight;
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  }
};

GatewayConfig live_config(const StubServer& stub) {
  GatewayConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.model = "stub-model";
  cfg.mode = GatewayMode::live;
  cfg.max_retries = 3;
  cfg.retry_backoff_ms = 1;
  return cfg;
}

}  // namespace

TEST_CASE("replay returns the stored response with zero network calls") {
  auto store = temp_store("replay_hit");
  ChatRequest req;
  req.tag = "unit";
  req.user_text = "prompt body";
  std::string key = LlmGateway::replay_key(req);
  std::ofstream(store / (key + ".json"))
      << R"({"response":{"text":"stored answer","prompt_tokens":3,"completion_tokens":2}})";

  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  cfg.endpoint = "http://127.0.0.1:1/nowhere";  // would fail if contacted
  LlmGateway gw(cfg);
  auto res = gw.complete(req);
  CHECK(res.text == "stored answer");
  CHECK(res.from_replay);
  CHECK(gw.total_usage().prompt_tokens == 3);

  // pure function of the request
  CHECK(gw.complete(req).text == res.text);
}

TEST_CASE("replay miss fails loudly, naming the key") {
  auto store = temp_store("replay_miss");
  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  LlmGateway gw(cfg);
  ChatRequest req;
  req.tag = "unit";
  req.user_text = "never recorded";
  CHECK_THROWS_WITH_AS(gw.complete(req),
                       doctest::Contains(LlmGateway::replay_key(req).c_str()),
                       GatewayError);
}

TEST_CASE("replay mode requires an existing store") {
  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = "/nonexistent/store/path";
  CHECK_THROWS_AS(LlmGateway{cfg}, ConfigError);
}

TEST_CASE("live mode retries through 429s; attempts counter tracks tries") {
  StubServer stub;
  stub.fail_first = 2;
  LlmGateway gw(live_config(stub));
  ChatRequest req;
  req.tag = "retry";
  req.user_text = "hello";
  auto res = gw.complete(req);
  CHECK(res.attempts == 3);
  CHECK(res.text == "echo: hello");
  CHECK(stub.hits.load() == 3);
}

TEST_CASE("retries exhausted raises") {
  StubServer stub;
  stub.fail_first = 1000;
  auto cfg = live_config(stub);
  cfg.max_retries = 2;
  LlmGateway gw(cfg);
  ChatRequest req;
  req.tag = "doomed";
  req.user_text = "hello";
  CHECK_THROWS_WITH_AS(gw.complete(req), doctest::Contains("retries exhausted"),
                       GatewayError);
  CHECK(stub.hits.load() == 3);  // 1 try + 2 retries
}

TEST_CASE("max_inflight bounds concurrent requests") {
  StubServer stub;
  auto cfg = live_config(stub);
  cfg.max_inflight = 2;
  LlmGateway gw(cfg);
  std::vector<std::thread> workers;
  for (int i = 0; i < 8; ++i)
    workers.emplace_back([&gw, i] {
      ChatRequest req;
      req.tag = "load";
      req.user_text = "msg " + std::to_string(i);
      gw.complete(req);
    });
  for (auto& w : workers) w.join();
  CHECK(stub.hits.load() == 8);
  CHECK(stub.max_inflight_seen.load() <= 2);
}

TEST_CASE("record mode persists, then replay serves it offline") {
  StubServer stub;
  auto store = temp_store("record");
  auto cfg = live_config(stub);
  cfg.mode = GatewayMode::record;
  cfg.replay_store = store;
  ChatRequest req;
  req.tag = "rec";
  req.user_text = "persist me";
  {
    LlmGateway gw(cfg);
    CHECK(gw.complete(req).text == "echo: persist me");
  }
  GatewayConfig replay_cfg;
  replay_cfg.mode = GatewayMode::replay;
  replay_cfg.replay_store = store;
  LlmGateway gw(replay_cfg);
  auto res = gw.complete(req);
  CHECK(res.text == "echo: persist me");
  CHECK(res.from_replay);
}

TEST_CASE("empty user_text rejected") {
  auto store = temp_store("empty_req");
  GatewayConfig cfg;
  cfg.mode = GatewayMode::replay;
  cfg.replay_store = store;
  LlmGateway gw(cfg);
  CHECK_THROWS_AS(gw.complete(ChatRequest{}), GatewayError);
}

TEST_CASE("extract_json_fence: labeled single-line fence") {
  auto v = extract_json_fence("x ```json {\"a\":1}``` y");
  CHECK(v == json{{"a", 1}});
}

TEST_CASE("extract_json_fence: scan until first valid fence") {
  std::string text =
      "draft:\n```json\n{broken\n```\nfinal:\n```json\n{\"ok\":true}\n```\n";
  CHECK(extract_json_fence(text) == json{{"ok", true}});
}

TEST_CASE("extract_json_fence: no fence at all") {
  CHECK_THROWS_WITH_AS(extract_json_fence("no fences here"),
                       doctest::Contains("no json fence"), Error);
}

TEST_CASE("extract_json_fence: fences exist but none parse") {
  CHECK_THROWS_WITH_AS(extract_json_fence("```json\n{nope\n```"),
                       doctest::Contains("fence not valid JSON"), Error);
}

TEST_CASE("wrap then extract is the identity on json values") {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    json v{{"n", rng.uniform_int(-5, 5)},
           {"s", "字符串" + std::to_string(i)},
           {"arr", {1, 2.5, "x"}},
           {"nested", {{"flag", i % 2 == 0}}}};
    CHECK(extract_json_fence(wrap_json_fence(v)) == v);
  }
}

TEST_CASE("bare fence parses as json too") {
  CHECK(extract_json_fence("```\n[1,2,3]\n```") == json::array({1, 2, 3}));
}
