#include "ndn/core/io.hpp"

#include <array>
#include <fstream>
#include <type_traits>
#include <sstream>

namespace ndn {
namespace {

using nlohmann::json;

const json& require(const json& j, const char* field) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + field + "\"");
  return *it;
}

std::string field_path(std::string_view parent, size_t index, std::string_view child = {}) {
  std::string out(parent);
  out += "[" + std::to_string(index) + "]";
  if (!child.empty()) out += "." + std::string(child);
  return out;
}

std::array<double, 4> four_numbers(const json& j, std::string_view field) {
  if (!j.is_array() || j.size() != 4) throw ParseError(std::string(field) + ": expected an array of 4 numbers");
  std::array<double, 4> v{};
  for (size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw ParseError(std::string(field) + ": expected numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

int parse_node(const json& j, int components, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field + ": expected an integer index");
  const auto idx = j.get<long long>();
  if (idx < -1 || idx >= components) {
    throw ValidationError(field + ": index " + std::to_string(idx) + " out of range");
  }
  return static_cast<int>(idx) + 1;
}

}  // namespace

json box_to_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BoundingBox box_from_json(const json& j, std::string_view field) {
  const auto v = four_numbers(j, field);
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

json layout_to_json(const Layout& layout, const CategoryTable& table) {
  json components = json::array();
  for (const auto& c : layout.components) {
    components.push_back({{"category", table.name(c.category)}, {"bbox", box_to_json(c.box)}});
  }
  return {{"canvas_px", {layout.canvas_width, layout.canvas_height}}, {"components", components}};
}

Layout layout_from_json(const json& j, const CategoryTable& table) {
  Layout layout;
  const json& px = require(j, "canvas_px");
  if (!px.is_array() || px.size() != 2 || !px[0].is_number() || !px[1].is_number()) {
    throw ParseError("canvas_px: expected [width, height]");
  }
  layout.canvas_width = px[0].get<int>();
  layout.canvas_height = px[1].get<int>();

  const json& comps = require(j, "components");
  if (!comps.is_array()) throw ParseError("components: expected an array");
  for (size_t i = 0; i < comps.size(); ++i) {
    const json& c = comps[i];
    if (!c.is_object()) throw ParseError(field_path("components", i) + ": expected an object");
    auto cat = c.find("category");
    if (cat == c.end() || !cat->is_string()) {
      throw ParseError(field_path("components", i, "category") + ": expected a category name");
    }
    if (!table.contains(cat->get<std::string>())) {
      throw ParseError(field_path("components", i, "category") + ": unknown category \"" + cat->get<std::string>() +
                       "\"");
    }
    Component comp;
    comp.category = table.id(cat->get<std::string>());
    if (auto bb = c.find("bbox"); bb != c.end()) {
      comp.box = box_from_json(*bb, field_path("components", i, "bbox"));
    } else if (auto bp = c.find("bbox_px"); bp != c.end()) {
      const auto v = four_numbers(*bp, field_path("components", i, "bbox_px"));
      if (layout.canvas_width <= 0 || layout.canvas_height <= 0) {
        throw ValidationError(field_path("components", i, "bbox_px") + ": needs a positive canvas_px");
      }
      const double w = layout.canvas_width;
      const double h = layout.canvas_height;
      comp.box = BoundingBox{v[0] / w, v[1] / h, v[2] / w, v[3] / h};
    } else {
      throw ParseError(field_path("components", i) + ": missing field \"bbox\"");
    }
    layout.components.push_back(comp);
  }
  validate(layout, table);
  return layout;
}

std::string serialize_layout(const Layout& layout, const CategoryTable& table) {
  return layout_to_json(layout, table).dump();
}

Layout deserialize_layout(std::string_view text, const CategoryTable& table) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return layout_from_json(j, table);
}

json constraints_to_json(const LayoutGraph& graph, const CategoryTable& table) {
  json components = json::array();
  for (int k = 1; k < graph.node_count(); ++k) components.push_back(table.name(graph.category(k)));
  json loc = json::array();
  json size = json::array();
  const auto pairs = canonical_pairs(graph.node_count());
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const auto l = graph.location_edges()[p];
    if (l != LocationRelation::Unknown) loc.push_back({i - 1, std::string(to_string(l)), j - 1});
    const auto s = graph.size_edges()[p];
    if (s != SizeRelation::Unknown) size.push_back({i - 1, std::string(to_string(s)), j - 1});
  }
  return {{"categories", table.names()}, {"components", components}, {"loc", loc}, {"size", size}};
}

ConstraintSet constraints_from_json(const json& j, const CategoryTable& fallback) {
  if (!j.is_object()) throw ParseError("constraints: expected a JSON object");
  CategoryTable table = fallback;
  if (auto c = j.find("categories"); c != j.end()) {
    if (!c->is_array()) throw ParseError("categories: expected an array of names");
    std::vector<std::string> names;
    for (size_t i = 0; i < c->size(); ++i) {
      if (!(*c)[i].is_string()) throw ParseError(field_path("categories", i) + ": expected a string");
      names.push_back((*c)[i].get<std::string>());
    }
    table = CategoryTable(std::move(names));
  }

  const json& comps = require(j, "components");
  if (!comps.is_array()) throw ParseError("components: expected an array of category names");
  if (comps.empty()) throw ValidationError("components: must not be empty");
  std::vector<CategoryId> ids;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (!comps[i].is_string()) throw ParseError(field_path("components", i) + ": expected a category name");
    const auto name = comps[i].get<std::string>();
    if (!table.contains(name)) throw ParseError(field_path("components", i) + ": unknown category \"" + name + "\"");
    const CategoryId id = table.id(name);
    if (id == kCanvasCategory) throw ValidationError(field_path("components", i) + ": \"canvas\" is reserved");
    ids.push_back(id);
  }
  LayoutGraph graph(ids);
  const int n = static_cast<int>(ids.size());

  auto read_edges = [&](const char* key, auto parse, auto get, auto set) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) throw ParseError(std::string(key) + ": expected an array of [i, relation, j]");
    for (size_t e = 0; e < it->size(); ++e) {
      const json& t = (*it)[e];
      const std::string where = field_path(key, e);
      if (!t.is_array() || t.size() != 3 || !t[1].is_string()) {
        throw ParseError(where + ": expected [i, relation, j]");
      }
      const int a = parse_node(t[0], n, where + "[0]");
      const int b = parse_node(t[2], n, where + "[2]");
      if (a == b) throw ValidationError(where + ": an edge needs two distinct endpoints");
      const auto rel = parse(t[1].get<std::string>());
      if (!rel) throw ParseError(where + "[1]: unknown relation \"" + t[1].get<std::string>() + "\"");
      const auto existing = get(a, b);
      using Rel = std::decay_t<decltype(*rel)>;
      if (existing != Rel::Unknown && existing != *rel) {
        throw ValidationError(where + ": conflicts with an earlier constraint on the same pair");
      }
      try {
        set(a, b, *rel);
      } catch (const ValidationError& err) {
        throw ValidationError(where + ": " + err.what());
      }
    }
  };
  using L = LocationRelation;
  using S = SizeRelation;
  read_edges(
      "loc", parse_location, [&](int a, int b) { return graph.location(a, b); },
      [&](int a, int b, L r) { graph.set_location(a, b, r); });
  read_edges(
      "size", parse_size, [&](int a, int b) { return graph.size(a, b); },
      [&](int a, int b, S r) { graph.set_size(a, b, r); });
  return ConstraintSet{std::move(table), std::move(graph)};
}

std::string serialize_constraints(const LayoutGraph& graph, const CategoryTable& table) {
  return constraints_to_json(graph, table).dump();
}

ConstraintSet deserialize_constraints(std::string_view text, const CategoryTable& fallback) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return constraints_from_json(j, fallback);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace ndn
