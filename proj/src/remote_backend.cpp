#include "facet/remote_backend.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

#include "facet/errors.hpp"

namespace facet {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

Endpoint split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw BackendUnavailable("invalid base URL \"" + url + "\"");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

}  // namespace

RemoteBackend::RemoteBackend(LlmSettings settings) : settings_(std::move(settings)) {}

Json chat_request_body(const LlmSettings& settings, const std::string& system_prompt,
                       const std::string& user_message, bool json_mode) {
  Json body = {
      {"model", settings.model},
      {"messages", Json::array({{{"role", "system"}, {"content", system_prompt}},
                                {{"role", "user"}, {"content", user_message}}})},
  };
  if (json_mode) body["response_format"] = {{"type", "json_object"}};
  return body;
}

std::string chat_response_content(const std::string& body) {
  const Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw MalformedResponse("completion response is not JSON");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw MalformedResponse("completion response has no choices");
  }
  const Json& message = (*choices)[0].value("message", Json::object());
  const auto content = message.find("content");
  if (content == message.end() || !content->is_string()) {
    throw MalformedResponse("completion response has no message content");
  }
  return content->get<std::string>();
}

std::string RemoteBackend::complete(const std::string& system_prompt, const std::string& user_message,
                                    bool json_mode) {
  if (settings_.api_key.empty()) throw BackendUnavailable("no API key configured (FACET_LLM_API_KEY)");
  const Endpoint endpoint = split_base_url(settings_.base_url);

  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  client.set_write_timeout(settings_.timeout_seconds, 0);
  client.set_bearer_token_auth(settings_.api_key);

  const std::string payload = chat_request_body(settings_, system_prompt, user_message, json_mode).dump();
  std::string last_error;
  for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    auto res = client.Post(endpoint.path + "/chat/completions", payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return chat_response_content(res->body);
    if (res->status == 429) throw QuotaExceeded("backend quota exceeded (HTTP 429)");
    if (res->status == 401 || res->status == 403) {
      throw BackendUnavailable("backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    last_error = "backend returned HTTP " + std::to_string(res->status);
    if (res->status < 500) break;
  }
  throw BackendUnavailable(last_error);
}

}  // namespace facet
