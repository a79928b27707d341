#pragma once

// Deterministic offline backend. Reads the property sections and coverage
// gaps out of the prompt and answers with type-correct configurations.

#include <cstdint>
#include <string>

#include "facet/sampler.hpp"

namespace facet {

class StubBackend : public SamplerBackend {
 public:
  explicit StubBackend(std::uint64_t seed) : seed_(seed) {}

  std::string complete(const std::string& system_prompt, const std::string& user_message, bool json_mode) override;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace facet
