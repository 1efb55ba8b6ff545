#include <doctest.h>

#include <thread>

#include "ndn/core/io.hpp"
#include "ndn/harness/checkpoint.hpp"
#include "ndn/harness/service.hpp"
#include "support/tempdir.hpp"
#include "support/toy_model.hpp"

// After Eigen: the resolver headers pulled in here define a `_res` macro.
#include <httplib.h>

using namespace ndn;
using namespace ndn::harness;
using nlohmann::json;

namespace {

std::shared_ptr<const ModelBundle> toy_checkpoint() {
  static const std::shared_ptr<const ModelBundle> bundle = [] {
    testing::TempDir dir;
    (void)save_checkpoint(testing::toy_result().bundle, dir.path());
    return std::make_shared<const ModelBundle>(load_checkpoint(dir.path()));
  }();
  return bundle;
}

// Runs the service on an ephemeral port for the lifetime of the object.
struct RunningService {
  Service service{toy_checkpoint()};
  int port = 0;
  std::thread thread;

  RunningService() {
    port = service.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { service.run(); });
    service.wait_until_ready();
  }
  ~RunningService() {
    service.stop();
    thread.join();
  }
  [[nodiscard]] httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

const json kConstraints = {{"components", {"toolbar", "list-item", "list-item"}},
                           {"loc", {{0, "above", 1}, {1, "above", 2}}},
                           {"size", json::array()}};

json post(httplib::Client& c, const char* path, const json& body, int expected) {
  const auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expected);
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("health and categories over HTTP") {
  RunningService s;
  auto c = s.client();
  const auto health = c.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  const json h = json::parse(health->body);
  CHECK(h["status"] == "ok");
  CHECK(h["checkpoint"] == toy_checkpoint()->hash);

  const auto cats = c.Get("/api/categories");
  REQUIRE(cats);
  CHECK(json::parse(cats->body)["categories"] == json(CategoryTable::standard().names()));
  CHECK(c.Get("/api/nothing")->status == 404);
}

TEST_CASE("generate returns the requested number of layouts") {
  RunningService s;
  auto c = s.client();
  json body = kConstraints;
  body["samples"] = 3;
  body["seed"] = 4;
  body["fixed_sizes"] = {{"0", {1.0, 0.1}}};
  body["canvas_px"] = {1080, 1920};
  const json r = post(c, "/api/generate", body, 200);
  REQUIRE(r["layouts"].size() == 3);
  REQUIRE(r["graphs"].size() == 3);
  const CategoryTable t = CategoryTable::standard();
  for (const json& lj : r["layouts"]) {
    const Layout l = layout_from_json(lj, t);
    REQUIRE(l.size() == 3);
    CHECK(l.components[0].box.w == 1.0);
    CHECK(l.components[0].box.h == 0.1);
    CHECK(l.canvas_width == 1080);
  }
  CHECK(post(c, "/api/generate", body, 200) == r);
}

TEST_CASE("complete fills every edge and keeps the given ones") {
  RunningService s;
  auto c = s.client();
  const json r = post(c, "/api/complete", kConstraints, 200);
  const CategoryTable t = CategoryTable::standard();
  const ConstraintSet cs = constraints_from_json(r, t);
  CHECK(cs.graph.is_complete());
  CHECK(cs.graph.location(1, 2) == LocationRelation::Above);
  CHECK(cs.graph.location(2, 3) == LocationRelation::Above);
  json bad = kConstraints;
  bad["mode"] = "guess";
  CHECK(post(c, "/api/complete", bad, 400)["field"] == "mode");
}

TEST_CASE("recommend over HTTP") {
  RunningService s;
  auto c = s.client();
  const json body = {{"layout",
                      {{"canvas_px", {1080, 1920}},
                       {"components", {{{"category", "toolbar"}, {"bbox", {0.0, 0.0, 1.0, 0.08}}}}}}},
                     {"targets", {"button", "text"}}};
  const json r = post(c, "/api/recommend", body, 200);
  CHECK(r["boxes"].size() == 2);
  CHECK(r["layout"]["components"].size() == 3);
  CHECK(r["layout"]["components"][0]["bbox"] == body["layout"]["components"][0]["bbox"]);

  json unknown = body;
  unknown["targets"] = {"button", "dragon"};
  CHECK(post(c, "/api/recommend", unknown, 400)["field"] == "targets[1]");
  json missing = body;
  missing.erase("layout");
  CHECK(post(c, "/api/recommend", missing, 400)["field"] == "layout");
}

TEST_CASE("malformed requests answer 400 with the field") {
  RunningService s;
  auto c = s.client();
  const auto res = c.Post("/api/generate", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["field"] == "body");

  json conflicting = kConstraints;
  conflicting["loc"] = {{0, "above", 1}, {0, "below", 1}};
  const json e = post(c, "/api/generate", conflicting, 400);
  CHECK(e.contains("error"));

  json out_of_range = kConstraints;
  out_of_range["loc"] = {{0, "above", 7}};
  (void)post(c, "/api/generate", out_of_range, 400);

  json too_many = kConstraints;
  too_many["samples"] = kMaxSamplesPerRequest + 1;
  CHECK(post(c, "/api/generate", too_many, 400)["field"] == "samples");

  json bad_fixed = kConstraints;
  bad_fixed["fixed_sizes"] = {{"first", {0.1, 0.1}}};
  CHECK(post(c, "/api/generate", bad_fixed, 400)["field"] == "fixed_sizes.first");

  json wrong_index = kConstraints;
  wrong_index["fixed_sizes"] = {{"5", {0.1, 0.1}}};
  (void)post(c, "/api/generate", wrong_index, 400);

  json wrong_type = kConstraints;
  wrong_type["seed"] = "seven";
  CHECK(post(c, "/api/generate", wrong_type, 400)["field"] == "seed");
}

TEST_CASE("an untrained checkpoint answers 409") {
  const Service service(std::make_shared<const ModelBundle>(
      ModelBundle::create(CategoryTable::standard(), testing::toy_config())));
  const ApiResponse r = service.handle("POST", "/api/generate", kConstraints.dump());
  CHECK(r.status == 409);
  CHECK(service.handle("GET", "/api/health", "").status == 200);
  CHECK(service.handle("DELETE", "/api/generate", "").status == 404);
}

TEST_CASE("generate options parse from JSON") {
  const GenerateOptions o = generate_options_from_json(
      {{"samples", 2}, {"seed", 9}, {"refine", false}, {"order", {1, 0}}, {"fixed_sizes", {{"1", {0.2, 0.3}}}}});
  CHECK(o.samples == 2);
  CHECK(o.seed == 9);
  CHECK_FALSE(o.refine);
  CHECK(o.order == std::vector<int>{1, 0});
  CHECK(o.fixed_sizes.at(1) == std::pair{0.2, 0.3});
  CHECK(generate_options_from_json(json::object()).samples == 1);
}
