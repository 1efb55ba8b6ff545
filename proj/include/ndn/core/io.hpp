#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "ndn/core/graph.hpp"
#include "ndn/core/types.hpp"

namespace ndn {

// Layout JSON:
//   {"canvas_px":[W,H],"components":[{"category":"text","bbox":[x,y,w,h]},...]}
// A component may give "bbox_px" instead of "bbox"; it is divided by canvas_px.
//
// Constraint JSON:
//   {"categories":["canvas",...],"components":["image","text"],
//    "loc":[[i,"above",j],...],"size":[[i,"smaller",j],...]}
// i, j index "components"; -1 is the canvas; pairs not listed are unknown.

[[nodiscard]] nlohmann::json layout_to_json(const Layout& layout, const CategoryTable& table);
[[nodiscard]] Layout layout_from_json(const nlohmann::json& j, const CategoryTable& table);

[[nodiscard]] std::string serialize_layout(const Layout& layout, const CategoryTable& table);
[[nodiscard]] Layout deserialize_layout(std::string_view text, const CategoryTable& table);

struct ConstraintSet {
  CategoryTable categories;
  LayoutGraph graph;

  bool operator==(const ConstraintSet&) const = default;
};

[[nodiscard]] nlohmann::json constraints_to_json(const LayoutGraph& graph, const CategoryTable& table);
/// When the JSON has no "categories" member, `fallback` is used.
[[nodiscard]] ConstraintSet constraints_from_json(const nlohmann::json& j, const CategoryTable& fallback);

[[nodiscard]] std::string serialize_constraints(const LayoutGraph& graph, const CategoryTable& table);
[[nodiscard]] ConstraintSet deserialize_constraints(std::string_view text, const CategoryTable& fallback);

[[nodiscard]] nlohmann::json box_to_json(const BoundingBox& box);
[[nodiscard]] BoundingBox box_from_json(const nlohmann::json& j, std::string_view field);

/// Reads the entire file; throws std::runtime_error when unreadable.
[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace ndn
