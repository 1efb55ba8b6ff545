#include <doctest.h>

#include <cmath>
#include <random>

#include "ndn/core/graph.hpp"
#include "ndn/core/io.hpp"
#include "ndn/core/relations.hpp"

using namespace ndn;
using LR = LocationRelation;
using SR = SizeRelation;

namespace {

BoundingBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = 0.01 + 0.6 * u(rng);
  const double h = 0.01 + 0.6 * u(rng);
  return {u(rng) * (1.0 - w), u(rng) * (1.0 - h), w, h};
}

Layout make_layout(std::vector<std::pair<CategoryId, BoundingBox>> items) {
  Layout l{1080, 1920, {}};
  for (auto& [c, b] : items) l.components.push_back({c, b});
  return l;
}

}  // namespace

TEST_CASE("category table reserves canvas at id 0") {
  const CategoryTable t = CategoryTable::standard();
  CHECK(t.name(0) == "canvas");
  CHECK(t.id("button") > 0);
  CHECK_FALSE(t.contains("nope"));
  CHECK_THROWS_AS(CategoryTable({"text", "image"}), ValidationError);
}

TEST_CASE("bounding box validation and clamping") {
  CHECK(is_valid({0.1, 0.1, 0.2, 0.2}));
  CHECK_FALSE(is_valid({0.1, 0.1, 0.0, 0.2}));
  CHECK_THROWS_AS(validate(BoundingBox{0.1, 0.1, 0.0, 0.2}), ValidationError);
  const BoundingBox c = clamp_to_canvas({0.9, -0.2, 0.3, 0.5});
  CHECK(c.x == doctest::Approx(0.7));
  CHECK(c.y == 0.0);
  CHECK(c.w == doctest::Approx(0.3));
}

TEST_CASE("location relation examples") {
  CHECK(extract_location_relation({0.4, 0.1, 0.2, 0.1}, {0.4, 0.6, 0.2, 0.1}) == LR::Above);
  CHECK(extract_location_relation({0.1, 0.1, 0.4, 0.4}, {0.2, 0.2, 0.1, 0.1}) == LR::Surrounding);
  CHECK(extract_location_relation({0.05, 0.05, 0.1, 0.1}, {0.6, 0.7, 0.2, 0.2}) == LR::UpperLeftOf);
  CHECK(extract_location_relation({0.2, 0.2, 0.1, 0.1}, {0.1, 0.1, 0.4, 0.4}) == LR::Inside);
  CHECK(extract_location_relation({0.0, 0.4, 0.2, 0.2}, {0.5, 0.45, 0.2, 0.1}) == LR::LeftOf);
}

TEST_CASE("equal centers with overlapping spans resolve to above") {
  CHECK(extract_location_relation({0.2, 0.2, 0.3, 0.3}, {0.25, 0.1, 0.2, 0.5}) == LR::Above);
}

TEST_CASE("size relation examples") {
  CHECK(extract_size_relation({0, 0, 0.2, 0.2}, {0.5, 0.5, 0.2, 0.2}) == SR::Equal);
  CHECK(extract_size_relation({0, 0, 0.5, 0.4}, {0, 0, 0.1, 0.1}) == SR::Larger);
  CHECK(extract_size_relation({0, 0, 0.1, 0.1}, {0, 0, 0.5, 0.4}) == SR::Smaller);
  // Ratio exactly 1.1 stays in the equal band.
  CHECK(extract_size_relation({0, 0, 0.5, 0.22}, {0, 0, 0.5, 0.2}) == SR::Equal);
}

TEST_CASE("canvas relation examples") {
  CHECK(extract_canvas_relation({0.45, 0.45, 0.1, 0.1}) == LR::Center);
  CHECK(extract_canvas_relation({0.0, 0.0, 0.1, 0.1}) == LR::TopLeft);
  CHECK(extract_canvas_relation({0.8, 0.9, 0.15, 0.08}) == LR::BottomRight);
}

TEST_CASE("relation names round-trip") {
  for (int v = 0; v < kLocationCount; ++v) {
    const auto r = static_cast<LR>(v);
    CHECK(parse_location(to_string(r)) == r);
  }
  for (int v = 0; v < kSizeCount; ++v) {
    const auto r = static_cast<SR>(v);
    CHECK(parse_size(to_string(r)) == r);
  }
  CHECK_FALSE(parse_location("beside").has_value());
}

TEST_CASE("mirror is an involution") {
  for (int v = 0; v < kLocationCount; ++v) CHECK(mirror(mirror(static_cast<LR>(v))) == static_cast<LR>(v));
  CHECK(mirror(LR::UpperLeftOf) == LR::LowerRightOf);
  CHECK(mirror(LR::Surrounding) == LR::Inside);
  CHECK(mirror(LR::Center) == LR::Center);
  CHECK(mirror(SR::Smaller) == SR::Larger);
}

TEST_CASE("extraction is antisymmetric over random pairs") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5000; ++k) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    REQUIRE(extract_location_relation(b, a) == mirror(extract_location_relation(a, b)));
    REQUIRE(extract_size_relation(b, a) == mirror(extract_size_relation(a, b)));
  }
}

TEST_CASE("size relation is translation invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  for (int k = 0; k < 1000; ++k) {
    BoundingBox a = random_box(rng), b = random_box(rng);
    const SR before = extract_size_relation(a, b);
    const double dx = d(rng), dy = d(rng);
    a.x += dx, b.x += dx, a.y += dy, b.y += dy;
    REQUIRE(extract_size_relation(a, b) == before);
  }
}

TEST_CASE("pair indexing is canonical") {
  CHECK(pair_count(4) == 6);
  const auto pairs = canonical_pairs(4);
  REQUIRE(pairs.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(pair_index(pairs[k].first, pairs[k].second, 4) == k);
  // Canvas pairs come first.
  CHECK(pairs[0] == std::pair{0, 1});
  CHECK(pairs[2] == std::pair{0, 3});
}

TEST_CASE("graph from a single component") {
  const Layout l = make_layout({{3, {0.45, 0.45, 0.1, 0.1}}});
  const LayoutGraph g = graph_from_layout(l);
  CHECK(g.edge_pair_count() == 1);
  CHECK(g.location(0, 1) == LR::Center);
  CHECK(g.size(0, 1) == SR::Larger);
  CHECK(g.is_complete());
}

TEST_CASE("graph from stacked components and edge counts") {
  const Layout l = make_layout({{1, {0.0, 0.0, 1.0, 0.1}}, {2, {0.05, 0.2, 0.9, 0.1}}, {3, {0.3, 0.8, 0.4, 0.1}}});
  const LayoutGraph g = graph_from_layout(l);
  CHECK(g.location(1, 2) == LR::Above);
  CHECK(g.location(2, 1) == LR::Below);
  const int n = l.size();
  CHECK(g.edge_pair_count() == n * (n + 1) / 2);
  CHECK(g.known_edge_count() == n * (n + 1));
}

TEST_CASE("canvas relations must originate at the canvas") {
  LayoutGraph g({1, 2});
  CHECK_THROWS_AS(g.set_location(1, 2, LR::Center), ValidationError);
  CHECK_THROWS_AS(g.set_location(0, 1, LR::Above), ValidationError);
  g.set_location(2, 1, LR::Above);
  CHECK(g.location(1, 2) == LR::Below);
}

TEST_CASE("consistency examples") {
  const Layout l = make_layout({{1, {0.1, 0.1, 0.2, 0.1}}, {2, {0.1, 0.5, 0.2, 0.1}}});
  LayoutGraph g({1, 2});
  CHECK(check_consistency(g, l) == 1.0);
  g.set_location(1, 2, LR::Above);
  CHECK(check_consistency(g, l) == 1.0);
  g.set_size(1, 2, SR::Larger);
  CHECK(check_consistency(g, l) == 0.5);
  LayoutGraph other({2, 1});
  CHECK_THROWS_AS((void)check_consistency(other, l), ValidationError);
}

TEST_CASE("random layouts are consistent with their own graphs") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(1, 8), cat(1, 6);
  for (int k = 0; k < 300; ++k) {
    Layout l{100, 100, {}};
    const int n = count(rng);
    for (int i = 0; i < n; ++i) l.components.push_back({cat(rng), random_box(rng)});
    REQUIRE(check_consistency(graph_from_layout(l), l) == 1.0);
  }
}

TEST_CASE("require_complete rejects partial graphs") {
  LayoutGraph g({1});
  CHECK_THROWS_AS(require_complete(g, "test"), PreconditionError);
}

TEST_CASE("layout JSON round-trip") {
  const CategoryTable t = CategoryTable::standard();
  const Layout l = make_layout({{t.id("button"), {0.25, 0.5, 0.5, 0.125}}});
  const std::string text = serialize_layout(l, t);
  CHECK(deserialize_layout(text, t) == l);
}

TEST_CASE("layout JSON pixel boxes are normalized") {
  const CategoryTable t = CategoryTable::standard();
  const Layout l = deserialize_layout(R"({"canvas_px":[200,100],"components":[{"category":"text","bbox_px":[20,10,100,50]}]})", t);
  CHECK(l.components[0].box == BoundingBox{0.1, 0.1, 0.5, 0.5});
}

TEST_CASE("layout JSON errors") {
  const CategoryTable t = CategoryTable::standard();
  CHECK_THROWS_AS((void)deserialize_layout(R"({"canvas_px":[1,1],"components":[{"category":"text","bbox":[0,0,0,0.1]}]})", t),
                  ValidationError);
  CHECK_THROWS_AS((void)deserialize_layout(R"({"canvas_px":[1,1],"components":[{"category":"cat","bbox":[0,0,0.1,0.1]}]})", t),
                  ParseError);
  CHECK_THROWS_AS((void)deserialize_layout("{not json", t), ParseError);
}

TEST_CASE("constraint JSON round-trip") {
  const CategoryTable t = CategoryTable::standard();
  const Layout l = make_layout({{1, {0.0, 0.0, 1.0, 0.1}}, {2, {0.05, 0.2, 0.9, 0.1}}});
  const LayoutGraph g = graph_from_layout(l);
  const ConstraintSet cs = deserialize_constraints(serialize_constraints(g, t), t);
  CHECK(cs.graph == g);
  CHECK(cs.categories == t);
}

TEST_CASE("constraint JSON errors") {
  const CategoryTable t = CategoryTable::standard();
  CHECK_THROWS_AS((void)deserialize_constraints(R"({"components":["text"],"loc":[[0,"beside",-1]]})", t), ParseError);
  CHECK_THROWS_AS((void)deserialize_constraints(R"({"components":["text","image"],"loc":[[0,"above",5]]})", t),
                  ValidationError);
  CHECK_THROWS_AS(
      (void)deserialize_constraints(R"({"components":["text","image"],"loc":[[0,"above",1],[0,"below",1]]})", t),
      ValidationError);
  CHECK_THROWS_AS((void)deserialize_constraints(R"({"components":["text"],"loc":[[0,"above",0]]})", t),
                  ValidationError);
  // A consistent restatement from the other side is accepted.
  const auto ok = deserialize_constraints(R"({"components":["text","image"],"loc":[[0,"above",1],[1,"below",0]]})", t);
  CHECK(ok.graph.location(1, 2) == LR::Above);
}
