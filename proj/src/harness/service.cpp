#include "ndn/harness/service.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>

#include <httplib.h>

#include "ndn/core/hash.hpp"
#include "ndn/core/io.hpp"

namespace ndn::harness {

using nlohmann::json;

namespace {

// A request-level validation failure naming the offending field.
class FieldError : public std::runtime_error {
 public:
  FieldError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Messages from the core parsers start with "<field path>: ".
std::string field_of(const std::string& message) {
  const auto colon = message.find(": ");
  if (colon == std::string::npos || colon == 0) return "body";
  const std::string head = message.substr(0, colon);
  if (head.find(' ') != std::string::npos) return "body";
  return head;
}

template <typename T>
T read_option(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FieldError(key, "has the wrong type");
  }
}

ApiResponse bad_request(const std::string& field, const std::string& message) {
  return {400, {{"error", message}, {"field", field}}};
}

std::string opaque_id() {
  static std::atomic<std::uint64_t> counter{0};
  Fnv1a h;
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  const auto n = counter.fetch_add(1);
  h.update(&now, sizeof now);
  h.update(&n, sizeof n);
  return h.hex();
}

}  // namespace

GenerateOptions generate_options_from_json(const json& j) {
  if (!j.is_object()) throw FieldError("body", "expected a JSON object");
  GenerateOptions o;
  o.samples = read_option(j, "samples", o.samples);
  if (o.samples < 1 || o.samples > kMaxSamplesPerRequest) {
    throw FieldError("samples", "must lie in [1, " + std::to_string(kMaxSamplesPerRequest) + "]");
  }
  o.seed = read_option<std::uint64_t>(j, "seed", o.seed);
  o.refine = read_option(j, "refine", o.refine);
  o.prior_mean = read_option(j, "prior_mean", o.prior_mean);
  o.order = read_option(j, "order", o.order);
  if (auto it = j.find("fixed_sizes"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw FieldError("fixed_sizes", "expected an object of index -> [w, h]");
    for (const auto& [key, value] : it->items()) {
      const std::string field = "fixed_sizes." + key;
      int index = 0;
      try {
        size_t used = 0;
        index = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw FieldError(field, "key must be a component index");
      }
      if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        throw FieldError(field, "expected [w, h]");
      }
      o.fixed_sizes[index] = {value[0].get<double>(), value[1].get<double>()};
    }
  }
  if (auto it = j.find("canvas_px"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      throw FieldError("canvas_px", "expected [width, height]");
    }
    o.canvas_width = (*it)[0].get<int>();
    o.canvas_height = (*it)[1].get<int>();
  }
  return o;
}

Service::Service(std::shared_ptr<const ModelBundle> bundle)
    : bundle_(std::move(bundle)), server_(std::make_unique<httplib::Server>()) {
  if (!bundle_) throw std::invalid_argument("Service: no checkpoint");
  auto route = [this](const char* method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      const ApiResponse r = handle(method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
  };
  server_->Get("/api/health", route("GET"));
  server_->Get("/api/categories", route("GET"));
  server_->Post("/api/complete", route("POST"));
  server_->Post("/api/generate", route("POST"));
  server_->Post("/api/recommend", route("POST"));
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

Service::~Service() = default;

ApiResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  try {
    if (method == "GET" && path == "/api/health") {
      return {200, {{"status", "ok"}, {"checkpoint", bundle_->hash}}};
    }
    if (method == "GET" && path == "/api/categories") {
      return {200, {{"categories", bundle_->categories.names()}}};
    }
    if (method != "POST") return {404, {{"error", "not found"}}};
    if (path != "/api/complete" && path != "/api/generate" && path != "/api/recommend") {
      return {404, {{"error", "not found"}}};
    }
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      return bad_request("body", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) return bad_request("body", "expected a JSON object");
    if (path == "/api/complete") return complete(j);
    if (path == "/api/generate") return generate(j);
    return recommend(j);
  } catch (const FieldError& e) {
    return bad_request(e.field(), e.what());
  } catch (const ParseError& e) {
    return bad_request(field_of(e.what()), e.what());
  } catch (const ValidationError& e) {
    return bad_request(field_of(e.what()), e.what());
  } catch (const PreconditionError& e) {
    return {409, {{"error", e.what()}}};
  } catch (const std::exception& e) {
    const std::string id = opaque_id();
    std::fprintf(stderr, "[ndn serve] error %s: %s\n", id.c_str(), e.what());
    return {500, {{"error", "internal error"}, {"id", id}}};
  }
}

ApiResponse Service::complete(const json& body) const {
  const ConstraintSet cs = constraints_from_json(body, bundle_->categories);
  require_same_table(*bundle_, cs.categories);
  const std::string mode = read_option<std::string>(body, "mode", "argmax");
  if (mode != "argmax" && mode != "sample") throw FieldError("mode", "must be \"argmax\" or \"sample\"");
  const auto seed = read_option<std::uint64_t>(body, "seed", 0);
  const LayoutGraph done = complete_constraints(
      *bundle_, cs.graph, mode == "argmax" ? relnet::CompletionMode::Argmax : relnet::CompletionMode::Sample, seed);
  return {200, constraints_to_json(done, bundle_->categories)};
}

ApiResponse Service::generate(const json& body) const {
  const ConstraintSet cs = constraints_from_json(body, bundle_->categories);
  require_same_table(*bundle_, cs.categories);
  const GenerateOptions options = generate_options_from_json(body);
  const GenerationResult res = generate_layouts(*bundle_, cs.graph, options);
  json layouts = json::array();
  json graphs = json::array();
  for (size_t k = 0; k < res.layouts.size(); ++k) {
    layouts.push_back(layout_to_json(res.layouts[k], bundle_->categories));
    graphs.push_back(constraints_to_json(res.graphs[k], bundle_->categories));
  }
  return {200, {{"layouts", layouts}, {"graphs", graphs}}};
}

ApiResponse Service::recommend(const json& body) const {
  auto it = body.find("layout");
  if (it == body.end()) throw FieldError("layout", "missing");
  Layout placed;
  try {
    placed = layout_from_json(*it, bundle_->categories);
    validate(placed, bundle_->categories);
  } catch (const ParseError& e) {
    throw FieldError("layout." + field_of(e.what()), e.what());
  } catch (const ValidationError& e) {
    throw FieldError("layout." + field_of(e.what()), e.what());
  }
  auto t = body.find("targets");
  if (t == body.end() || !t->is_array()) throw FieldError("targets", "expected an array of category names");
  std::vector<CategoryId> targets;
  for (size_t k = 0; k < t->size(); ++k) {
    const json& name = (*t)[k];
    const std::string field = "targets[" + std::to_string(k) + "]";
    if (!name.is_string()) throw FieldError(field, "expected a category name");
    if (!bundle_->categories.contains(name.get<std::string>())) throw FieldError(field, "unknown category");
    targets.push_back(bundle_->categories.id(name.get<std::string>()));
  }
  RecommendOptions options;
  options.seed = read_option<std::uint64_t>(body, "seed", options.seed);
  options.prior_mean = read_option(body, "prior_mean", options.prior_mean);
  options.refine = read_option(body, "refine", options.refine);
  const Recommendation rec = harness::recommend(*bundle_, placed, targets, options);
  json boxes = json::array();
  for (const auto& b : rec.boxes) boxes.push_back(box_to_json(b));
  return {200, {{"boxes", boxes}, {"layout", layout_to_json(rec.layout, bundle_->categories)}}};
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }
int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool Service::run() { return server_->listen_after_bind(); }
void Service::stop() { server_->stop(); }
void Service::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace ndn::harness
