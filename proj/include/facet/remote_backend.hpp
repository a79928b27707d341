#pragma once

// OpenAI-compatible chat-completion client.

#include <string>

#include "facet/sampler.hpp"

namespace facet {

struct LlmSettings {
  std::string api_key;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  int timeout_seconds = 60;
  int max_retries = 2;  // extra attempts after the first, for 5xx and transport errors
};

class RemoteBackend : public SamplerBackend {
 public:
  explicit RemoteBackend(LlmSettings settings);

  /// POST {base_url}/chat/completions. 401/403 and transport failures throw
  /// BackendUnavailable, 429 throws QuotaExceeded, an unreadable body throws
  /// MalformedResponse.
  std::string complete(const std::string& system_prompt, const std::string& user_message, bool json_mode) override;

  const LlmSettings& settings() const { return settings_; }

 private:
  LlmSettings settings_;
};

/// Request body sent by RemoteBackend::complete.
Json chat_request_body(const LlmSettings& settings, const std::string& system_prompt,
                       const std::string& user_message, bool json_mode);

/// choices[0].message.content, or MalformedResponse.
std::string chat_response_content(const std::string& body);

}  // namespace facet
