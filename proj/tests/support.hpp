#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "facet/json.hpp"
#include "facet/schema.hpp"

namespace facet::test {

std::string source_path(const std::string& relative);
std::string read_text(const std::string& path);
std::string fixture(const std::string& relative);  // read_text(source_path(relative))
std::string product_card();

/// The shipped response schema with `$ref` pointed at one definition.
Json response_schema(const std::string& definition);

struct CorpusMiss {
  std::string component;
  std::string property;
  std::string label;
  std::string predicted;
};

struct CorpusResult {
  std::size_t components = 0;
  std::size_t properties = 0;
  std::size_t matches = 0;
  std::size_t extremes = 0;  // High <-> Low
  std::vector<CorpusMiss> misses;
  std::vector<std::string> problems;  // unlabeled or unknown properties
  double accuracy() const { return properties == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(properties); }
};

/// Scores every fixtures/corpus/X.tsx against X.labels.json.
CorpusResult evaluate_corpus();

/// Schema exercising every sampled kind plus a function prop.
ComponentSchema mixed_schema();
/// 1..5 random literal variations (awkward strings, floats, nesting).
std::vector<VariationConfig> random_variations(const ComponentSchema& schema, std::mt19937_64& rng);

/// Empty when `prompt` is the template with each slot replaced by some text.
std::string template_mismatch(const std::string& prompt);

struct MalformedCase {
  std::string label;
  Json config;
  std::string reason;
};
/// Nineteen single-config responses that fail validation; the duplicate case
/// is built separately because it needs existing variations.
std::vector<MalformedCase> malformed_corpus();
Json valid_product_config(const std::string& name, const std::string& variant, bool badge);

struct Exchange {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  int expected_status;
  std::string definition;  // response schema for the expected status
};
std::string analyze_body(const std::string& source, const std::string& filename);
/// Requests from the documented service examples, in order.
std::vector<Exchange> documented_sequence();

}  // namespace facet::test
