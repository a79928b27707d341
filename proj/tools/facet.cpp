// facet command-line entry point.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "facet/config.hpp"
#include "facet/coverage.hpp"
#include "facet/errors.hpp"
#include "facet/impact.hpp"
#include "facet/remote_backend.hpp"
#include "facet/service.hpp"
#include "facet/story_io.hpp"
#include "facet/stub_backend.hpp"

namespace fs = std::filesystem;
using namespace facet;

namespace {

constexpr int kExitError = 1;
constexpr int kExitRejected = 2;
constexpr int kExitUncovered = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

void print_impacts(const ComponentAnalysis& a, std::ostream& out) {
  out << a.schema.component_name << "\n";
  out << std::left << std::setw(20) << "property" << std::setw(13) << "kind" << std::right << std::setw(4) << "n"
      << std::setw(8) << "base" << std::setw(12) << "impact" << "  " << std::left << std::setw(8) << "level"
      << "impactful\n";
  for (const auto& s : a.impacts) {
    const PropertySpec* spec = a.schema.find(s.property);
    out << std::left << std::setw(20) << s.property << std::setw(13) << (spec ? to_string(spec->kind) : "")
        << std::right << std::setw(4) << s.n << std::setw(8) << s.base << std::setw(12) << fixed4(s.impact) << "  "
        << std::left << std::setw(8) << to_string(s.level) << (s.impactful ? "yes" : "no") << "\n";
  }
}

void print_coverage(const CoverageReport& report, std::ostream& out) {
  out << std::left << std::setw(24) << "property" << std::right << std::setw(8) << "ratio" << "  missing\n";
  for (const auto& e : report.entries) {
    std::string missing;
    for (const auto& m : e.missing) missing += (missing.empty() ? "" : "; ") + m;
    out << std::left << std::setw(24) << e.property << std::right << std::setw(8) << fixed4(e.ratio) << "  "
        << (missing.empty() ? "-" : missing) << "\n";
  }
  out << "aggregate " << fixed4(report.aggregate) << (report.fully_covered ? " (fully covered)" : "") << "\n";
}

struct LlmFlags {
  std::string api_key;
  std::string base_url;
  std::string model;
  std::string config = "facet.toml";
};

void add_llm_flags(CLI::App* cmd, LlmFlags& f) {
  cmd->add_option("--api-key", f.api_key, "LLM API key (overrides FACET_LLM_API_KEY)");
  cmd->add_option("--base-url", f.base_url, "chat-completion base URL (overrides FACET_LLM_BASE_URL)");
  cmd->add_option("--model", f.model, "model name (overrides FACET_LLM_MODEL)");
  cmd->add_option("--config", f.config, "config file")->capture_default_str();
}

LlmSettings llm_settings(const LlmFlags& f) {
  LlmOverrides o;
  if (!f.api_key.empty()) o.api_key = f.api_key;
  if (!f.base_url.empty()) o.base_url = f.base_url;
  if (!f.model.empty()) o.model = f.model;
  const std::string toml = fs::exists(f.config) ? read_file(f.config) : std::string();
  return resolve_llm_settings(o, process_env, toml);
}

std::vector<VariationConfig> load_stories(const std::string& path, const ComponentSchema& schema) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(path + ": invalid JSON");
    if (doc.value("component", schema.component_name) != schema.component_name) {
      throw Error(path + ": variations belong to " + doc.value("component", std::string()));
    }
    return variations_from_json(doc);
  }
  ExtractedStories stories = extract_from_story_source(text, path);
  for (const auto& w : stories.warnings) std::cerr << "warning: " << w << "\n";
  if (!stories.component.empty() && stories.component != schema.component_name) {
    throw Error(path + ": stories belong to " + stories.component);
  }
  return stories.variations;
}

void on_signal(int) { stop_serving(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space exploration for React components"};
  app.require_subcommand(1);

  std::string file;
  bool as_json = false;

  auto* analyze = app.add_subcommand("analyze", "score every property of a component");
  analyze->add_option("file", file, "component source (.tsx)")->required();
  analyze->add_flag("--json", as_json, "print the schema and impact report as JSON");

  int count = 4;
  std::string instruction;
  std::string out_dir = ".";
  bool stub = false;
  std::uint64_t seed = 1;
  LlmFlags llm;
  auto* generate = app.add_subcommand("generate", "sample variations and write them as JSON and stories");
  generate->add_option("file", file, "component source (.tsx)")->required();
  generate->add_option("--count", count, "configurations to request")->check(CLI::Range(1, kMaxGenerateCount))->capture_default_str();
  generate->add_option("--instruction", instruction, "grounding instruction for the sampler");
  generate->add_option("--out", out_dir, "output directory")->capture_default_str();
  generate->add_flag("--stub", stub, "use the deterministic offline backend");
  generate->add_option("--seed", seed, "stub seed")->capture_default_str();
  add_llm_flags(generate, llm);

  std::string stories_path;
  auto* cov = app.add_subcommand("coverage", "measure coverage of a variation set");
  cov->add_option("file", file, "component source (.tsx)")->required();
  cov->add_option("--stories", stories_path, "variations JSON or story module")->required();
  cov->add_flag("--json", as_json, "print the report as JSON");

  std::string host = "127.0.0.1";
  int port = 8787;
  ServiceOptions service_options;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_flag("--stub", stub, "use the deterministic offline backend");
  serve_cmd->add_option("--seed", seed, "base stub seed")->capture_default_str();
  serve_cmd->add_option("--cors-origin", service_options.cors_origin, "allowed browser origin");
  serve_cmd->add_option("--static-dir", service_options.static_dir, "built UI assets served under /");
  serve_cmd->add_option("--state-dir", service_options.state_dir, "load and snapshot sessions here");
  add_llm_flags(serve_cmd, llm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*analyze) {
      const ComponentAnalysis a = analyze_component(read_file(file), file);
      for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
      if (as_json) {
        Json out = Json::object();
        out["schema"] = to_json(a.schema);
        out["impacts"] = to_json(a.impacts);
        Json warnings = Json::array();
        for (const auto& w : a.warnings) warnings.push_back(w);
        out["warnings"] = warnings;
        std::cout << out.dump(2) << "\n";
      } else {
        print_impacts(a, std::cout);
      }
      return 0;
    }

    if (*generate) {
      const ComponentAnalysis a = analyze_component(read_file(file), file);
      for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
      const std::string name = a.schema.component_name;
      const fs::path json_path = fs::path(out_dir) / (name + ".variations.json");
      const fs::path story_path = fs::path(out_dir) / (name + ".stories.tsx");

      std::vector<VariationConfig> existing;
      if (fs::exists(json_path)) {
        const Json doc = Json::parse(read_file(json_path.string()), nullptr, false);
        if (doc.is_discarded()) throw Error(json_path.string() + ": invalid JSON");
        if (doc.value("source_digest", std::string()) != a.schema.source_digest) {
          std::cerr << "warning: " << json_path.string() << " was generated from a different source revision\n";
        }
        existing = variations_from_json(doc);
      }

      SamplingRequest req;
      req.schema = a.schema;
      req.impacts = a.impacts;
      req.existing = existing;
      req.coverage_gaps = render_gap_instructions(coverage(a.schema, a.impacts, existing), a.impacts);
      req.user_instruction = instruction;
      req.count = count;

      std::unique_ptr<SamplerBackend> backend;
      if (stub) {
        backend = std::make_unique<StubBackend>(seed);
      } else {
        backend = std::make_unique<RemoteBackend>(llm_settings(llm));
      }
      const ValidationOutcome outcome = sample(req, *backend);
      for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";

      std::vector<VariationConfig> all = existing;
      all.insert(all.end(), outcome.accepted.begin(), outcome.accepted.end());
      write_file(json_path, emit_json_text(a.schema, all));
      write_file(story_path, emit_story_module(a.schema, all));

      const CoverageReport report = coverage(a.schema, a.impacts, all);
      std::cout << "accepted " << outcome.accepted.size() << ", rejected " << outcome.rejected.size()
                << ", repaired " << outcome.repaired_count << ", total " << all.size() << "\n";
      std::cout << "wrote " << json_path.string() << "\nwrote " << story_path.string() << "\n";
      print_coverage(report, std::cout);
      if (!outcome.rejected.empty()) {
        for (const auto& r : outcome.rejected) {
          std::cerr << "rejected " << r.raw.value("name", std::string("(unnamed)")) << ":";
          for (const auto& reason : r.reasons) std::cerr << " " << reason << ";";
          std::cerr << "\n";
        }
        std::cerr << outcome.rejected.size() << " configuration(s) rejected\n";
        return kExitRejected;
      }
      return 0;
    }

    if (*cov) {
      const ComponentAnalysis a = analyze_component(read_file(file), file);
      const auto variations = load_stories(stories_path, a.schema);
      const CoverageReport report = coverage(a.schema, a.impacts, variations);
      if (as_json) {
        std::cout << to_json(report).dump(2) << "\n";
      } else {
        print_coverage(report, std::cout);
      }
      return report.fully_covered ? 0 : kExitUncovered;
    }

    if (*serve_cmd) {
      service_options.stub = stub;
      service_options.seed = seed;
      if (!stub) service_options.llm = llm_settings(llm);
      Service service(service_options);
      service.load_state();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      serve(service, host, port, [&](int bound) {
        std::cout << "listening on http://" << host << ":" << bound << (stub ? " (stub backend)" : "") << std::endl;
      });
      service.save_state();
      return 0;
    }
  } catch (const SyntaxError& e) {
    std::cerr << file << ":" << e.position().line << ":" << e.position().column << ": error: " << e.message() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
