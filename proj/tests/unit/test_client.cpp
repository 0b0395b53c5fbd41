#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "scriptmind/client.hpp"
#include "scriptmind/error.hpp"
#include "test_support.hpp"

using namespace scriptmind;
namespace t = scriptmind::testing;

namespace {

class Scripted final : public ChatTransport {
 public:
  explicit Scripted(std::vector<ChatReply> replies) : replies_(std::move(replies)) {}
  ChatReply send(const ModelEndpoint&, const std::vector<ChatMessage>&) override {
    const auto i = calls++;
    return replies_[std::min<std::size_t>(i, replies_.size() - 1)];
  }
  std::size_t calls = 0;

 private:
  std::vector<ChatReply> replies_;
};

class Counting final : public ChatTransport {
 public:
  ChatReply send(const ModelEndpoint&, const std::vector<ChatMessage>& m) override {
    const int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    --active;
    return {200, m.back().content, {}};
  }
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
};

ModelEndpoint endpoint(std::string url = "mock://test") {
  ModelEndpoint ep;
  ep.base_url = std::move(url);
  ep.retry = {3, 0.5};
  return ep;
}

std::vector<ChatMessage> msg(std::string text) { return {{"user", std::move(text)}}; }

Errc query_error(ModelClient& c) {
  try {
    c.query(msg("x"));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scriptmind::Error");
  return Errc::InvalidArgument;
}

// Minimal chat-completions server. `handler` returns (status, content).
struct FakeServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  std::atomic<int> hits{0};

  explicit FakeServer(std::function<std::pair<int, std::string>(const httplib::Request&, int)> handler) {
    server.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      const int now = ++active;
      int seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      const auto [status, content] = handler(req, hits++);
      --active;
      res.status = status;
      if (status == 200) {
        t::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
        res.set_content(body.dump(), "application/json");
      } else {
        res.set_content(content, "text/plain");
      }
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

}  // namespace

TEST_CASE("endpoint validation") {
  auto ep = endpoint();
  CHECK_NOTHROW(ep.validate());
  ep.max_in_flight = 0;
  CHECK_THROWS_AS(ep.validate(), Error);
  ep = endpoint("");
  CHECK_THROWS_AS(ep.validate(), Error);
  ep = endpoint();
  ep.retry.max_attempts = 0;
  CHECK_THROWS_AS(ModelClient(ep, std::make_shared<Scripted>(std::vector<ChatReply>{{200, "x", {}}})), Error);
  CHECK_THROWS_AS(make_transport(endpoint("ftp://nope")), Error);
}

TEST_CASE("retry contract") {
  std::vector<std::chrono::milliseconds> sleeps;
  auto sleeper = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

  SUBCASE("fixed reply") {
    auto tr = std::make_shared<Scripted>(std::vector<ChatReply>{{200, R"({"label":"non_scam"})", {}}});
    ModelClient c(endpoint(), tr, sleeper);
    const auto r = c.query(msg("x"));
    CHECK(r.text == R"({"label":"non_scam"})");
    CHECK(r.attempts == 1);
    CHECK(sleeps.empty());
  }
  SUBCASE("two failures then success") {
    auto tr = std::make_shared<Scripted>(std::vector<ChatReply>{{503, {}, "busy"}, {0, {}, "reset"}, {200, "ok", {}}});
    ModelClient c(endpoint(), tr, sleeper);
    const auto r = c.query(msg("x"));
    CHECK(r.text == "ok");
    CHECK(r.attempts == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0].count() == 500);
    CHECK(sleeps[1].count() == 1000);
  }
  SUBCASE("exhausted") {
    auto tr = std::make_shared<Scripted>(std::vector<ChatReply>{{429, {}, "slow down"}});
    ModelClient c(endpoint(), tr, sleeper);
    CHECK(query_error(c) == Errc::RetriesExhausted);
    CHECK(tr->calls == 3);
  }
  SUBCASE("auth fails at once") {
    auto tr = std::make_shared<Scripted>(std::vector<ChatReply>{{401, {}, "no"}});
    ModelClient c(endpoint(), tr, sleeper);
    CHECK(query_error(c) == Errc::AuthError);
    CHECK(tr->calls == 1);
  }
  SUBCASE("client errors are not retried") {
    auto tr = std::make_shared<Scripted>(std::vector<ChatReply>{{400, {}, "bad"}});
    ModelClient c(endpoint(), tr, sleeper);
    CHECK(query_error(c) == Errc::TransportError);
    CHECK(tr->calls == 1);
  }
  SUBCASE("single attempt timeout") {
    auto ep = endpoint();
    ep.retry.max_attempts = 1;
    ModelClient c(ep, std::make_shared<Scripted>(std::vector<ChatReply>{{-1, {}, "timeout"}}), sleeper);
    CHECK(query_error(c) == Errc::Timeout);
  }
}

TEST_CASE("in-flight bound") {
  auto tr = std::make_shared<Counting>();
  auto ep = endpoint();
  ep.max_in_flight = 8;
  ModelClient c(ep, tr);
  std::atomic<int> done{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 20; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < 100; i += 20) {
          if (c.query(msg(std::to_string(i))).text == std::to_string(i)) ++done;
        }
      });
    }
  }
  CHECK(done == 100);
  CHECK(tr->peak <= 8);
  CHECK(tr->peak >= 2);
}

TEST_CASE("http transport") {
  SUBCASE("round trip with bearer token") {
    ::setenv("SCRIPTMIND_TEST_TOKEN", "sekrit", 1);
    std::string seen_auth;
    std::string seen_body;
    FakeServer srv([&](const httplib::Request& req, int) {
      seen_auth = req.get_header_value("Authorization");
      seen_body = req.body;
      return std::pair{200, std::string(R"({"label":"non_scam"})")};
    });
    auto ep = endpoint(srv.url());
    ep.model_name = "tiny";
    ep.token_env = "SCRIPTMIND_TEST_TOKEN";
    ModelClient c(ep, make_transport(ep));
    CHECK(c.query(msg("hello")).text == R"({"label":"non_scam"})");
    CHECK(seen_auth == "Bearer sekrit");
    const auto body = t::json::parse(seen_body);
    CHECK(body["model"] == "tiny");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][0]["content"] == "hello");
  }
  SUBCASE("retries 503") {
    FakeServer srv([](const httplib::Request&, int hit) {
      return hit < 2 ? std::pair{503, std::string("busy")} : std::pair{200, std::string("fine")};
    });
    auto ep = endpoint(srv.url());
    ModelClient c(ep, make_transport(ep), [](std::chrono::milliseconds) {});
    const auto r = c.query(msg("x"));
    CHECK(r.text == "fine");
    CHECK(r.attempts == 3);
  }
  SUBCASE("403 is an auth error") {
    FakeServer srv([](const httplib::Request&, int) { return std::pair{403, std::string("forbidden")}; });
    auto ep = endpoint(srv.url());
    ModelClient c(ep, make_transport(ep), [](std::chrono::milliseconds) {});
    CHECK(query_error(c) == Errc::AuthError);
  }
  SUBCASE("connection refused exhausts retries") {
    int port = 0;
    {
      FakeServer srv([](const httplib::Request&, int) { return std::pair{200, std::string()}; });
      port = srv.port;
    }
    auto ep = endpoint("http://127.0.0.1:" + std::to_string(port));
    ep.timeout_s = 1.0;
    ModelClient c(ep, make_transport(ep), [](std::chrono::milliseconds) {});
    CHECK(query_error(c) == Errc::RetriesExhausted);
  }
  SUBCASE("peak concurrency against a live server") {
    FakeServer srv([](const httplib::Request& req, int) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      return std::pair{200, t::json::parse(req.body)["messages"][0]["content"].get<std::string>()};
    });
    auto ep = endpoint(srv.url());
    ep.max_in_flight = 8;
    ModelClient c(ep, make_transport(ep));
    std::atomic<int> ok{0};
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < 16; ++w) {
        pool.emplace_back([&, w] {
          for (int i = w; i < 100; i += 16) ok += c.query(msg(std::to_string(i))).text == std::to_string(i);
        });
      }
    }
    CHECK(ok == 100);
    CHECK(srv.hits == 100);
    CHECK(srv.peak <= 8);
  }
}

TEST_CASE("packaged mocks") {
  ModelEndpoint ep = endpoint("mock://keyword");
  ModelClient kw(ep, make_transport(ep));
  const auto scam = t::json::parse(
      kw.query(msg("I am a prosecutor.\nYour bank account is involved.\n(Follow the rules below.)\nmoney fraud")).text);
  CHECK(scam["label"] == "scam");
  CHECK(scam["next_utterance"] == "Your bank account is involved.");
  const auto benign = t::json::parse(kw.query(msg("Please come to the station.\n(Follow the rules below.)\nbank money")).text);
  CHECK(benign == t::json{{"label", "non_scam"}});

  ep = endpoint("mock://overlap-judge");
  ModelClient judge(ep, make_transport(ep));
  CHECK(judge.query(msg("Prediction: a b\nGround truth: a b")).text == "1.00");
  CHECK(judge.query(msg("Prediction: a b c d\nGround truth: a x")).text == "0.20");
  CHECK(judge.query(msg("nothing to compare")).text == "no comparison found");
}
