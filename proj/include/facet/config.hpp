#pragma once

// LLM backend configuration. Precedence: explicit flags, then environment
// (FACET_LLM_API_KEY, FACET_LLM_BASE_URL, FACET_LLM_MODEL), then facet.toml.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "facet/remote_backend.hpp"

namespace facet {

struct LlmOverrides {
  std::optional<std::string> api_key;
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<int> timeout_seconds;
};

/// Reads `key = value` lines, `[section]` headers (keys become
/// "section.key"), `#` comments, basic "..." / '...' strings, integers and
/// booleans. Values are returned as text. Throws Error on malformed lines.
std::map<std::string, std::string> read_flat_toml(std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment lookup; empty variables count as unset.
std::optional<std::string> process_env(const std::string& name);

/// `toml_text` is the content of facet.toml (empty when absent). Keys are
/// read from the [llm] table: api_key, base_url, model, timeout_seconds,
/// max_retries.
LlmSettings resolve_llm_settings(const LlmOverrides& flags, const EnvLookup& env, std::string_view toml_text);

}  // namespace facet
