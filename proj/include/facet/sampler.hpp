#pragma once

// Prompt construction, response validation/repair and distinctness for
// LLM-driven variation sampling.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facet/schema.hpp"

namespace facet {

class SamplerBackend {
 public:
  virtual ~SamplerBackend() = default;
  /// One chat completion: system prompt + user message -> response text.
  /// Throws BackendUnavailable / QuotaExceeded.
  virtual std::string complete(const std::string& system_prompt, const std::string& user_message,
                               bool json_mode) = 0;
};

struct RejectedConfig {
  Json raw;
  std::vector<std::string> reasons;
};

struct ValidationOutcome {
  std::vector<VariationConfig> accepted;
  std::vector<RejectedConfig> rejected;
  int repaired_count = 0;
  std::vector<std::string> warnings;
};

struct ConfigCheck {
  std::optional<VariationConfig> config;  // set iff violations is empty
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

/// The shipped prompt template, byte-for-byte.
std::string_view prompt_template();
/// Names of the slots build_prompt fills, in template order.
const std::vector<std::string>& prompt_slots();
/// Replaces `{slot}` occurrences for the given slot names only; other
/// braces are left untouched.
std::string render_prompt(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Per-property block used inside the impact sections.
std::string render_property_block(const PropertySpec& spec, const ImpactScore* score);
std::string build_prompt(const SamplingRequest& req);
std::string build_user_message(const SamplingRequest& req);

/// Image-like props must carry http(s) URLs.
bool is_image_like(std::string_view property_name);
bool is_well_formed_url(std::string_view text);

/// Type-checks and coerces one raw configuration.
ConfigCheck validate_config(const ComponentSchema& schema, const Json& raw);

/// Tuple of equivalence-class values of the impactful properties (all
/// sampled properties when none is impactful).
std::string distinctness_signature(const ComponentSchema& schema, const std::vector<ImpactScore>& impacts,
                                   const VariationConfig& config);

/// Candidate configurations from a response: a JSON array, an object
/// wrapping one, or a single configuration object. Throws MalformedResponse.
std::vector<Json> parse_candidates(std::string_view response);

/// One backend call (plus at most one re-ask for malformed output and one
/// repair round for invalid configs).
ValidationOutcome sample(const SamplingRequest& req, SamplerBackend& backend);

}  // namespace facet
