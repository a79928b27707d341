#pragma once

// In-memory sessions behind the /api routes. Routing is transport-free
// (handle) so request sequences can be replayed without sockets; serve()
// binds it to an HTTP listener.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "facet/impact.hpp"
#include "facet/remote_backend.hpp"
#include "facet/sampler.hpp"

namespace facet {

inline constexpr std::size_t kMaxRequestBody = 1024 * 1024;
inline constexpr int kMaxGenerateCount = 20;

using BackendFactory = std::function<std::unique_ptr<SamplerBackend>(const std::string& component, int round)>;

struct ServiceOptions {
  bool stub = true;
  std::uint64_t seed = 1;  // stub seed for a session's round r is seed + r
  LlmSettings llm;
  std::string cors_origin;
  std::string static_dir;
  std::string state_dir;
  BackendFactory backend_factory;  // overrides stub/llm when set
};

struct HttpResult {
  int status = 200;
  Json body;
};

struct Session {
  std::string source;
  std::string filename;
  ComponentAnalysis analysis;
  std::vector<VariationConfig> variations;
  CoverageReport coverage;
  int round = 0;
  std::mutex mutex;
};

class Service {
 public:
  explicit Service(ServiceOptions options);

  HttpResult analyze(const std::string& body);
  HttpResult generate(const std::string& body);
  HttpResult coverage(const std::string& component);
  HttpResult update_variation(const std::string& component, const std::string& name, const std::string& body);
  HttpResult stories(const std::string& component);
  HttpResult variations(const std::string& component);

  /// Routes a decoded path. Unknown routes give 404, wrong methods 405.
  /// Successful non-GET requests are persisted when a state_dir is set.
  HttpResult handle(const std::string& method, const std::string& path,
                    const std::map<std::string, std::string>& query, const std::string& body);

  /// {sessions:[{source, filename, round, variations}]}
  Json snapshot() const;
  void restore(const Json& snapshot);
  /// <state_dir>/sessions.json; no-ops without a state_dir.
  void save_state() const;
  void load_state();

  const ServiceOptions& options() const { return options_; }

 private:
  HttpResult route(const std::string& method, const std::string& path,
                   const std::map<std::string, std::string>& query, const std::string& body);
  std::shared_ptr<Session> find(const std::string& component) const;
  std::unique_ptr<SamplerBackend> backend_for(const std::string& component, int round) const;

  ServiceOptions options_;
  mutable std::mutex sessions_mutex_;
  mutable std::mutex save_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

HttpResult error_result(int status, const std::string& message);

/// Blocks until the listener stops. `on_ready` runs once the port is bound.
void serve(Service& service, const std::string& host, int port, const std::function<void(int bound_port)>& on_ready = {});
/// Stops every listener started by serve().
void stop_serving();

}  // namespace facet
