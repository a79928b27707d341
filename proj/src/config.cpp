#include "facet/config.hpp"

#include <cstdlib>

#include "facet/errors.hpp"

namespace facet {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string parse_basic_string(std::string_view v, std::size_t line_no) {
  std::string out;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const char c = v[i];
    if (c == '"') {
      const auto rest = trim(v.substr(i + 1));
      if (!rest.empty() && rest.front() != '#') {
        throw Error("facet.toml:" + std::to_string(line_no) + ": trailing characters after string");
      }
      return out;
    }
    if (c == '\\' && i + 1 < v.size()) {
      const char n = v[++i];
      switch (n) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default:
          throw Error("facet.toml:" + std::to_string(line_no) + ": unsupported escape \\" + std::string(1, n));
      }
      continue;
    }
    out += c;
  }
  throw Error("facet.toml:" + std::to_string(line_no) + ": unterminated string");
}

int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("facet.toml: " + key + " must be an integer");
}

}  // namespace

std::map<std::string, std::string> read_flat_toml(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("facet.toml:" + std::to_string(line_no) + ": malformed table header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("facet.toml:" + std::to_string(line_no) + ": expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw Error("facet.toml:" + std::to_string(line_no) + ": empty key");
    const auto value = trim(line.substr(eq + 1));
    std::string parsed;
    if (!value.empty() && value.front() == '"') {
      parsed = parse_basic_string(value, line_no);
    } else if (!value.empty() && value.front() == '\'') {
      const auto close = value.find('\'', 1);
      if (close == std::string_view::npos) throw Error("facet.toml:" + std::to_string(line_no) + ": unterminated string");
      parsed = std::string(value.substr(1, close - 1));
    } else {
      parsed = std::string(trim(value.substr(0, value.find('#'))));
      if (parsed.empty()) throw Error("facet.toml:" + std::to_string(line_no) + ": missing value");
    }
    out[section.empty() ? key : section + "." + key] = parsed;
  }
  return out;
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

LlmSettings resolve_llm_settings(const LlmOverrides& flags, const EnvLookup& env, std::string_view toml_text) {
  LlmSettings s;
  const auto file = read_flat_toml(toml_text);
  auto from_file = [&](const char* key) -> std::optional<std::string> {
    auto it = file.find(std::string("llm.") + key);
    if (it == file.end()) return std::nullopt;
    return it->second;
  };

  if (auto v = from_file("api_key")) s.api_key = *v;
  if (auto v = from_file("base_url")) s.base_url = *v;
  if (auto v = from_file("model")) s.model = *v;
  if (auto v = from_file("timeout_seconds")) s.timeout_seconds = parse_int("llm.timeout_seconds", *v);
  if (auto v = from_file("max_retries")) s.max_retries = parse_int("llm.max_retries", *v);

  if (env) {
    if (auto v = env("FACET_LLM_API_KEY")) s.api_key = *v;
    if (auto v = env("FACET_LLM_BASE_URL")) s.base_url = *v;
    if (auto v = env("FACET_LLM_MODEL")) s.model = *v;
  }

  if (flags.api_key) s.api_key = *flags.api_key;
  if (flags.base_url) s.base_url = *flags.base_url;
  if (flags.model) s.model = *flags.model;
  if (flags.timeout_seconds) s.timeout_seconds = *flags.timeout_seconds;
  if (s.timeout_seconds <= 0) throw Error("timeout must be positive");
  if (s.max_retries < 0) throw Error("max_retries must not be negative");
  return s;
}

}  // namespace facet
