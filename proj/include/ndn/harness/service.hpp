#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ndn/harness/checkpoint.hpp"
#include "ndn/harness/pipeline.hpp"

namespace httplib {
class Server;
}

namespace ndn::harness {

inline constexpr const char* kCheckpointEnv = "NDN_CHECKPOINT";
inline constexpr int kMaxSamplesPerRequest = 256;

/// Reads samples, seed, fixed_sizes ({"index": [w, h]}), order, refine, prior_mean and canvas_px.
[[nodiscard]] GenerateOptions generate_options_from_json(const nlohmann::json& j);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Stateless JSON API over one immutable checkpoint.
//   GET  /api/health      -> {"status":"ok","checkpoint":hash}
//   GET  /api/categories  -> {"categories":[...]}
//   POST /api/complete    constraint JSON (+ seed, mode) -> constraint JSON of the completed graph
//   POST /api/generate    constraint JSON + options      -> {"layouts":[...],"graphs":[...]}
//   POST /api/recommend   {"layout", "targets", seed, prior_mean, refine} -> {"boxes":[...],"layout":...}
// Malformed input answers 400 with {"error", "field"}; an untrained
// checkpoint 409; anything else 500 with an opaque {"error","id"}.
class Service {
 public:
  explicit Service(std::shared_ptr<const ModelBundle> bundle);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-free dispatch, also used by the HTTP handlers.
  [[nodiscard]] ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; follow with run().
  int bind_any_port(const std::string& host);
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  ApiResponse complete(const nlohmann::json& body) const;
  ApiResponse generate(const nlohmann::json& body) const;
  ApiResponse recommend(const nlohmann::json& body) const;

  std::shared_ptr<const ModelBundle> bundle_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ndn::harness
