#include "facet/service.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "facet/coverage.hpp"
#include "facet/errors.hpp"
#include "facet/story_io.hpp"
#include "facet/stub_backend.hpp"

namespace facet {

namespace {

Json parse_body(const std::string& body) {
  if (body.empty()) throw Error("empty request body");
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error("request body is not valid JSON");
  if (!j.is_object()) throw Error("request body must be a JSON object");
  return j;
}

std::string required_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

Json variation_list(const std::vector<VariationConfig>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

Json string_list(const std::vector<std::string>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(x);
  return out;
}

void recompute(Session& s) {
  s.coverage = facet::coverage(s.analysis.schema, s.analysis.impacts, s.variations);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto part = path.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  return parts;
}

}  // namespace

HttpResult error_result(int status, const std::string& message) {
  return {status, Json{{"error", message}}};
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

std::shared_ptr<Session> Service::find(const std::string& component) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(component);
  return it == sessions_.end() ? nullptr : it->second;
}

std::unique_ptr<SamplerBackend> Service::backend_for(const std::string& component, int round) const {
  if (options_.backend_factory) return options_.backend_factory(component, round);
  if (options_.stub) return std::make_unique<StubBackend>(options_.seed + static_cast<std::uint64_t>(round));
  return std::make_unique<RemoteBackend>(options_.llm);
}

HttpResult Service::analyze(const std::string& body) {
  if (body.size() > kMaxRequestBody) return error_result(413, "request body exceeds 1 MiB");
  Json req;
  std::string source;
  std::string filename;
  try {
    req = parse_body(body);
    source = required_string(req, "source");
    filename = req.contains("filename") ? required_string(req, "filename") : "Component.tsx";
  } catch (const Error& e) {
    return error_result(400, e.what());
  }

  auto session = std::make_shared<Session>();
  try {
    session->analysis = analyze_component(source, filename);
  } catch (const SyntaxError& e) {
    HttpResult r = error_result(400, e.message());
    r.body["line"] = e.position().line;
    r.body["column"] = e.position().column;
    return r;
  } catch (const Error& e) {
    return error_result(400, e.what());
  }
  session->source = std::move(source);
  session->filename = std::move(filename);

  const std::string name = session->analysis.schema.component_name;
  {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(name);
    if (it != sessions_.end()) {
      // Same source: keep the accumulated variations.
      std::lock_guard old_lock(it->second->mutex);
      if (it->second->analysis.schema.source_digest == session->analysis.schema.source_digest) {
        session->variations = it->second->variations;
        session->round = it->second->round;
      }
    }
    recompute(*session);
    sessions_[name] = session;
  }

  Json out = Json::object();
  out["schema"] = to_json(session->analysis.schema);
  out["impacts"] = to_json(session->analysis.impacts);
  out["warnings"] = string_list(session->analysis.warnings);
  return {200, out};
}

HttpResult Service::generate(const std::string& body) {
  if (body.size() > kMaxRequestBody) return error_result(413, "request body exceeds 1 MiB");
  Json req;
  std::string component;
  int count = 4;
  std::string instruction;
  try {
    req = parse_body(body);
    component = required_string(req, "component");
    if (auto c = req.find("count"); c != req.end()) {
      if (!c->is_number_integer()) throw Error("\"count\" must be an integer");
      const auto v = c->get<long long>();
      if (v < 1 || v > kMaxGenerateCount) throw Error("\"count\" must be between 1 and 20");
      count = static_cast<int>(v);
    }
    if (auto i = req.find("instruction"); i != req.end() && !i->is_null()) {
      if (!i->is_string()) throw Error("\"instruction\" must be a string");
      instruction = i->get<std::string>();
    }
  } catch (const Error& e) {
    return error_result(400, e.what());
  }

  auto session = find(component);
  if (!session) return error_result(404, "unknown component \"" + component + "\"");
  std::lock_guard lock(session->mutex);

  SamplingRequest sreq;
  sreq.schema = session->analysis.schema;
  sreq.impacts = session->analysis.impacts;
  sreq.existing = session->variations;
  sreq.coverage_gaps = render_gap_instructions(session->coverage, session->analysis.impacts);
  sreq.user_instruction = instruction;
  sreq.count = count;

  ValidationOutcome outcome;
  try {
    auto backend = backend_for(component, session->round);
    outcome = sample(sreq, *backend);
  } catch (const QuotaExceeded& e) {
    return error_result(429, e.what());
  } catch (const BackendUnavailable& e) {
    return error_result(502, e.what());
  } catch (const MalformedResponse& e) {
    return error_result(422, e.what());
  }
  ++session->round;

  for (const auto& v : outcome.accepted) session->variations.push_back(v);
  recompute(*session);

  Json rejected = Json::array();
  for (const auto& r : outcome.rejected) rejected.push_back({{"config", r.raw}, {"reasons", string_list(r.reasons)}});
  Json out = Json::object();
  out["accepted"] = variation_list(outcome.accepted);
  out["rejected"] = rejected;
  out["repaired_count"] = outcome.repaired_count;
  out["warnings"] = string_list(outcome.warnings);
  out["coverage"] = to_json(session->coverage);
  out["total"] = session->variations.size();
  return {200, out};
}

HttpResult Service::coverage(const std::string& component) {
  auto session = find(component);
  if (!session) return error_result(404, "unknown component \"" + component + "\"");
  std::lock_guard lock(session->mutex);
  return {200, to_json(session->coverage)};
}

HttpResult Service::update_variation(const std::string& component, const std::string& name,
                                     const std::string& body) {
  if (body.size() > kMaxRequestBody) return error_result(413, "request body exceeds 1 MiB");
  Json req;
  try {
    req = parse_body(body);
    if (req.contains("properties") && !req["properties"].is_object()) throw Error("\"properties\" must be an object");
    if (req.contains("name")) required_string(req, "name");
    if (req.contains("description")) required_string(req, "description");
  } catch (const Error& e) {
    return error_result(400, e.what());
  }

  auto session = find(component);
  if (!session) return error_result(404, "unknown component \"" + component + "\"");
  std::lock_guard lock(session->mutex);
  auto& vs = session->variations;
  auto target = std::find_if(vs.begin(), vs.end(), [&](const VariationConfig& v) { return v.name == name; });
  if (target == vs.end()) return error_result(404, "unknown variation \"" + name + "\"");

  const ComponentSchema& schema = session->analysis.schema;
  std::vector<std::string> violations;
  Json merged = target->assignments;
  const Json edits = req.value("properties", Json::object());
  for (const auto& [key, value] : edits.items()) {
    if (schema.find(key) == nullptr) {
      violations.push_back(key + ": unknown property");
    } else if (value.is_null()) {
      merged.erase(key);
    } else {
      merged[key] = value;
    }
  }
  Json raw = {{"name", req.value("name", target->name)},
              {"description", req.value("description", target->description)},
              {"properties", merged}};
  ConfigCheck check = validate_config(schema, raw);
  for (auto& v : check.violations) violations.push_back(std::move(v));
  if (!violations.empty()) {
    HttpResult r = error_result(422, "variation violates the property schema");
    r.body["violations"] = string_list(violations);
    return r;
  }

  VariationConfig updated = std::move(*check.config);
  const auto& impacts = session->analysis.impacts;
  const std::string sig = distinctness_signature(schema, impacts, updated);
  for (auto it = vs.begin(); it != vs.end(); ++it) {
    if (it == target) continue;
    if (it->name == updated.name) return error_result(409, "a variation named \"" + updated.name + "\" already exists");
    if (distinctness_signature(schema, impacts, *it) == sig) {
      return error_result(409, "not distinct from existing variation '" + it->name + "'");
    }
  }
  *target = updated;
  recompute(*session);
  return {200, Json{{"config", to_json(updated)}, {"coverage", to_json(session->coverage)}}};
}

HttpResult Service::stories(const std::string& component) {
  auto session = find(component);
  if (!session) return error_result(404, "unknown component \"" + component + "\"");
  std::lock_guard lock(session->mutex);
  const auto& schema = session->analysis.schema;
  try {
    Json snippets = Json::array();
    const auto ids = story_identifiers(session->variations);
    for (std::size_t i = 0; i < session->variations.size(); ++i) {
      snippets.push_back({{"name", session->variations[i].name},
                          {"identifier", ids[i]},
                          {"code", emit_story_snippet(schema, session->variations, i)}});
    }
    Json out = Json::object();
    out["component"] = schema.component_name;
    out["module"] = emit_story_module(schema, session->variations);
    out["snippets"] = snippets;
    return {200, out};
  } catch (const UnserializableValue& e) {
    return error_result(422, e.what());
  }
}

HttpResult Service::variations(const std::string& component) {
  auto session = find(component);
  if (!session) return error_result(404, "unknown component \"" + component + "\"");
  std::lock_guard lock(session->mutex);
  return {200, emit_json(session->analysis.schema, session->variations)};
}

HttpResult Service::handle(const std::string& method, const std::string& path,
                           const std::map<std::string, std::string>& query, const std::string& body) {
  HttpResult r = route(method, path, query, body);
  if (r.status == 200 && method != "GET" && !options_.state_dir.empty()) save_state();
  return r;
}

HttpResult Service::route(const std::string& method, const std::string& path,
                          const std::map<std::string, std::string>& query, const std::string& body) {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") return error_result(404, "no route for " + path);
  const std::string& route = parts[1];
  auto expect = [&](const char* m) { return method == m; };

  if (route == "analyze" && parts.size() == 2) {
    return expect("POST") ? analyze(body) : error_result(405, "use POST");
  }
  if (route == "generate" && parts.size() == 2) {
    return expect("POST") ? generate(body) : error_result(405, "use POST");
  }
  if (route == "coverage" && parts.size() == 2) {
    if (!expect("GET")) return error_result(405, "use GET");
    auto it = query.find("component");
    if (it == query.end() || it->second.empty()) return error_result(400, "missing \"component\" query parameter");
    return coverage(it->second);
  }
  if (route == "stories" && parts.size() == 3) {
    return expect("GET") ? stories(parts[2]) : error_result(405, "use GET");
  }
  if (route == "variations" && parts.size() == 3) {
    return expect("GET") ? variations(parts[2]) : error_result(405, "use GET");
  }
  if (route == "variations" && parts.size() >= 4) {
    if (!expect("PUT")) return error_result(405, "use PUT");
    // Variation names may contain '/'.
    const std::string prefix = "/api/variations/" + parts[2] + "/";
    const auto at = path.find(prefix);
    const std::string name = at == std::string::npos ? parts[3] : path.substr(at + prefix.size());
    return update_variation(parts[2], name, body);
  }
  return error_result(404, "no route for " + path);
}

Json Service::snapshot() const {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(sessions_mutex_);
    for (const auto& [_, s] : sessions_) all.push_back(s);
  }
  Json sessions = Json::array();
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    sessions.push_back({{"source", s->source},
                        {"filename", s->filename},
                        {"round", s->round},
                        {"variations", variation_list(s->variations)}});
  }
  return Json{{"sessions", sessions}};
}

void Service::restore(const Json& snapshot) {
  for (const auto& entry : snapshot.at("sessions")) {
    auto session = std::make_shared<Session>();
    session->source = entry.at("source").get<std::string>();
    session->filename = entry.at("filename").get<std::string>();
    session->round = entry.value("round", 0);
    session->analysis = analyze_component(session->source, session->filename);
    for (const auto& v : entry.at("variations")) session->variations.push_back(variation_from_json(v));
    recompute(*session);
    std::lock_guard lock(sessions_mutex_);
    sessions_[session->analysis.schema.component_name] = session;
  }
}

void Service::save_state() const {
  if (options_.state_dir.empty()) return;
  std::lock_guard lock(save_mutex_);
  std::filesystem::create_directories(options_.state_dir);
  const auto path = std::filesystem::path(options_.state_dir) / "sessions.json";
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << snapshot().dump(2) << "\n";
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void Service::load_state() {
  if (options_.state_dir.empty()) return;
  const auto path = std::filesystem::path(options_.state_dir) / "sessions.json";
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  const Json j = Json::parse(text.str(), nullptr, false);
  if (j.is_discarded()) throw Error("corrupt state file " + path.string());
  restore(j);
}

namespace {

std::mutex g_servers_mutex;
std::set<httplib::Server*> g_servers;

}  // namespace

void serve(Service& service, const std::string& host, int port, const std::function<void(int)>& on_ready) {
  httplib::Server server;
  server.set_payload_max_length(kMaxRequestBody + 1);
  const std::string cors = service.options().cors_origin;

  auto dispatch = [&service, cors](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    HttpResult r;
    try {
      r = service.handle(req.method, req.path, query, req.body);
    } catch (const std::exception& e) {
      r = error_result(500, e.what());
    }
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
    if (!cors.empty()) res.set_header("Access-Control-Allow-Origin", cors);
  };
  const std::string api = R"(/api/.*)";
  server.Get(api, dispatch);
  server.Post(api, dispatch);
  server.Put(api, dispatch);
  server.Delete(api, dispatch);
  server.Options(api, [cors](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    if (!cors.empty()) {
      res.set_header("Access-Control-Allow-Origin", cors);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
  });
  server.set_error_handler([cors](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 413) {
      res.set_content(error_result(413, "request body exceeds 1 MiB").body.dump(), "application/json; charset=utf-8");
    } else if (req.path.rfind("/api/", 0) == 0 && res.body.empty()) {
      res.set_content(error_result(res.status, "HTTP " + std::to_string(res.status)).body.dump(),
                      "application/json; charset=utf-8");
    }
    if (!cors.empty()) res.set_header("Access-Control-Allow-Origin", cors);
  });
  if (const auto& dir = service.options().static_dir; !dir.empty() && std::filesystem::is_directory(dir)) {
    server.set_mount_point("/", dir);
  }

  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  {
    std::lock_guard lock(g_servers_mutex);
    g_servers.insert(&server);
  }
  if (on_ready) on_ready(bound);
  server.listen_after_bind();
  std::lock_guard lock(g_servers_mutex);
  g_servers.erase(&server);
}

void stop_serving() {
  std::lock_guard lock(g_servers_mutex);
  for (auto* s : g_servers) s->stop();
}

}  // namespace facet
