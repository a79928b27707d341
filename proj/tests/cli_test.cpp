#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "facet/json_schema.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using facet::validate_json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run facet_cli(const std::string& args, const std::string& env = "") {
  Run r;
  const std::string cmd = env + std::string(FACET_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string card_path() { return facet::test::source_path("fixtures/components/ProductCard.tsx"); }

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("facet-cli-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze table") {
    const auto r = facet_cli("analyze " + card_path());
    CHECK(r.status == 0);
    CHECK(r.out.find("variant") != std::string::npos);
    CHECK(r.out.find("118.1269  High") != std::string::npos);
    CHECK(r.out.find("65.7098  Low") != std::string::npos);
  }

  TEST_CASE("analyze json validates") {
    const auto r = facet_cli("analyze --json " + card_path());
    REQUIRE(r.status == 0);
    CHECK(validate_json(facet::test::response_schema("analyze_response"), facet::Json::parse(r.out)).empty());
  }

  TEST_CASE("generate twice then coverage") {
    const std::string dir = scratch("gen");
    const auto first = facet_cli("generate " + card_path() + " --count 4 --stub --seed 1 --out " + dir);
    CHECK(first.status == 0);
    const std::string json_path = dir + "/ProductCard.variations.json";
    const std::string story_path = dir + "/ProductCard.stories.tsx";
    REQUIRE(fs::exists(json_path));
    REQUIRE(fs::exists(story_path));
    const std::string after_one = facet::test::read_text(json_path);

    // Deterministic: a fresh directory gives the same bytes.
    const std::string again = scratch("gen-again");
    CHECK(facet_cli("generate " + card_path() + " --count 4 --stub --seed 1 --out " + again).status == 0);
    CHECK(facet::test::read_text(again + "/ProductCard.variations.json") == after_one);

    CHECK(facet_cli("generate " + card_path() + " --count 4 --stub --seed 1 --out " + dir).status == 0);
    const auto doc = facet::Json::parse(facet::test::read_text(json_path));
    CHECK(doc["variations"].size() == 8);

    CHECK(facet_cli("coverage " + card_path() + " --stories " + json_path).status == 0);
    CHECK(facet_cli("coverage " + card_path() + " --stories " + story_path).status == 0);
    fs::remove_all(dir);
    fs::remove_all(again);
  }

  TEST_CASE("partial coverage exits 3") {
    const std::string dir = scratch("partial");
    const std::string path = dir + "/one.variations.json";
    std::ofstream(path) << R"({"component": "ProductCard", "source_digest": "", "variations": [
      {"name": "Only", "description": "", "properties": {"title": "Mug", "price": 3}}]})";
    CHECK(facet_cli("coverage " + card_path() + " --stories " + path).status == 3);
    fs::remove_all(dir);
  }

  TEST_CASE("errors exit 1") {
    CHECK(facet_cli("analyze /nonexistent/Card.tsx").status == 1);
    const std::string dir = scratch("bad");
    std::ofstream(dir + "/Bad.tsx") << "export const Bad = () => <div>;";
    CHECK(facet_cli("analyze " + dir + "/Bad.tsx").status == 1);
    CHECK(facet_cli("frobnicate").status == 1);
    CHECK(facet_cli("generate " + card_path() + " --count 0 --stub").status == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("remote backend without credentials fails cleanly") {
    const std::string dir = scratch("nokey");
    const auto r = facet_cli("generate " + card_path() + " --count 1 --out " + dir + " --config " + dir +
                             "/none.toml", "env -u FACET_LLM_API_KEY ");
    CHECK(r.status == 1);
    fs::remove_all(dir);
  }
}
