#include <doctest.h>

#include "facet/config.hpp"
#include "facet/errors.hpp"

using namespace facet;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

const char* kToml = R"(
# facet settings
[llm]
api_key = "file-key"
base_url = 'https://llm.internal/v1'
model = "file-model"   # trailing comment
timeout_seconds = 30
max_retries = 4
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("flat toml") {
    const auto kv = read_flat_toml("top = 1\n[a]\nx = \"q\\\"uote\"\ny = true\n");
    CHECK(kv.at("top") == "1");
    CHECK(kv.at("a.x") == "q\"uote");
    CHECK(kv.at("a.y") == "true");
    CHECK_THROWS_AS(read_flat_toml("novalue\n"), Error);
    CHECK_THROWS_AS(read_flat_toml("x = \"open\n"), Error);
    CHECK_THROWS_AS(read_flat_toml("[broken\n"), Error);
  }

  TEST_CASE("defaults") {
    const auto s = resolve_llm_settings({}, env_of({}), "");
    CHECK(s.api_key.empty());
    CHECK(s.base_url == "https://api.openai.com/v1");
    CHECK(s.timeout_seconds == 60);
  }

  TEST_CASE("file values") {
    const auto s = resolve_llm_settings({}, env_of({}), kToml);
    CHECK(s.api_key == "file-key");
    CHECK(s.base_url == "https://llm.internal/v1");
    CHECK(s.model == "file-model");
    CHECK(s.timeout_seconds == 30);
    CHECK(s.max_retries == 4);
  }

  TEST_CASE("environment beats file, flags beat environment") {
    const auto env = env_of({{"FACET_LLM_API_KEY", "env-key"}, {"FACET_LLM_MODEL", "env-model"}});
    const auto s = resolve_llm_settings({}, env, kToml);
    CHECK(s.api_key == "env-key");
    CHECK(s.model == "env-model");
    CHECK(s.base_url == "https://llm.internal/v1");

    LlmOverrides flags;
    flags.model = "flag-model";
    flags.timeout_seconds = 5;
    const auto f = resolve_llm_settings(flags, env, kToml);
    CHECK(f.model == "flag-model");
    CHECK(f.api_key == "env-key");
    CHECK(f.timeout_seconds == 5);
  }

  TEST_CASE("bad numbers") {
    CHECK_THROWS_AS(resolve_llm_settings({}, env_of({}), "[llm]\ntimeout_seconds = \"soon\"\n"), Error);
    LlmOverrides flags;
    flags.timeout_seconds = 0;
    CHECK_THROWS_AS(resolve_llm_settings(flags, env_of({}), ""), Error);
  }
}
