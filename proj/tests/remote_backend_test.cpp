#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "facet/errors.hpp"
#include "facet/remote_backend.hpp"

using namespace facet;

namespace {

// Local chat-completion endpoint answering from a handler.
class MockServer {
 public:
  explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  LlmSettings settings() const {
    LlmSettings s;
    s.api_key = "test-key";
    s.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    s.model = "mock-model";
    s.timeout_seconds = 5;
    s.max_retries = 2;
    return s;
  }

  std::atomic<int> hits{0};
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion(const std::string& content) {
  return Json{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

}  // namespace

TEST_SUITE("remote_backend") {
  TEST_CASE("request body") {
    LlmSettings s;
    s.model = "m";
    const Json body = chat_request_body(s, "sys", "usr", true);
    CHECK(body["model"] == "m");
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "usr");
    CHECK(body["response_format"]["type"] == "json_object");
    CHECK_FALSE(chat_request_body(s, "sys", "usr", false).contains("response_format"));
  }

  TEST_CASE("successful completion") {
    MockServer mock([](const httplib::Request&, httplib::Response& res) {
      res.set_content(completion("{\"configurations\": []}"), "application/json");
    });
    RemoteBackend backend(mock.settings());
    CHECK(backend.complete("sys", "usr", true) == "{\"configurations\": []}");
    CHECK(mock.last_auth == "Bearer test-key");
    CHECK(Json::parse(mock.last_body)["model"] == "mock-model");
  }

  TEST_CASE("quota") {
    MockServer mock([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
    RemoteBackend backend(mock.settings());
    CHECK_THROWS_AS(backend.complete("s", "u", true), QuotaExceeded);
    CHECK(mock.hits == 1);
  }

  TEST_CASE("auth failure") {
    MockServer mock([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    RemoteBackend backend(mock.settings());
    CHECK_THROWS_AS(backend.complete("s", "u", true), BackendUnavailable);
    CHECK(mock.hits == 1);
  }

  TEST_CASE("server errors retry up to the limit") {
    MockServer mock([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    RemoteBackend backend(mock.settings());
    CHECK_THROWS_AS(backend.complete("s", "u", true), BackendUnavailable);
    CHECK(mock.hits == 3);
  }

  TEST_CASE("recovers after a transient error") {
    std::atomic<int> calls{0};
    MockServer mock([&](const httplib::Request&, httplib::Response& res) {
      if (calls++ == 0) {
        res.status = 500;
      } else {
        res.set_content(completion("[]"), "application/json");
      }
    });
    RemoteBackend backend(mock.settings());
    CHECK(backend.complete("s", "u", true) == "[]");
    CHECK(mock.hits == 2);
  }

  TEST_CASE("unreadable body") {
    MockServer mock([](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
    RemoteBackend backend(mock.settings());
    CHECK_THROWS_AS(backend.complete("s", "u", true), MalformedResponse);
    CHECK_THROWS_AS(chat_response_content("{\"choices\": []}"), MalformedResponse);
  }

  TEST_CASE("unreachable host and missing key") {
    LlmSettings s;
    s.api_key = "k";
    s.base_url = "http://127.0.0.1:1/v1";
    s.max_retries = 0;
    s.timeout_seconds = 2;
    CHECK_THROWS_AS(RemoteBackend(s).complete("s", "u", true), BackendUnavailable);
    s.api_key.clear();
    CHECK_THROWS_AS(RemoteBackend(s).complete("s", "u", true), BackendUnavailable);
  }
}
