#include "ndn/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ndn {

CategoryTable::CategoryTable() : CategoryTable(std::vector<std::string>{"canvas"}) {}

CategoryTable::CategoryTable(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty() || names_.front() != "canvas") {
    throw ValidationError("category table: id 0 must be \"canvas\"");
  }
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (names_[i].empty()) throw ValidationError("category table: empty name");
    if (!index_.emplace(names_[i], i).second) {
      throw ValidationError("category table: duplicate name \"" + names_[i] + "\"");
    }
  }
}

CategoryTable CategoryTable::standard() {
  return CategoryTable({"canvas", "toolbar", "list-item", "button", "image", "text", "logo"});
}

const std::string& CategoryTable::name(CategoryId id) const {
  if (id < 0 || id >= size()) throw ValidationError("category id out of range: " + std::to_string(id));
  return names_[static_cast<size_t>(id)];
}

CategoryId CategoryTable::id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ValidationError("unknown category \"" + std::string(name) + "\"");
  return it->second;
}

bool CategoryTable::contains(std::string_view name) const { return index_.count(std::string(name)) != 0; }

bool is_valid(const BoundingBox& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) return false;
  return b.x >= 0.0 && b.y >= 0.0 && b.x <= 1.0 && b.y <= 1.0 && b.w > 0.0 && b.h > 0.0 && b.w <= 1.0 &&
         b.h <= 1.0 && b.x + b.w <= 1.0 + kBoxOvershoot && b.y + b.h <= 1.0 + kBoxOvershoot;
}

void validate(const BoundingBox& b, std::string_view what) {
  if (is_valid(b)) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << what << ": invalid box [" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << "]";
  if (!(b.w > 0.0)) msg << " (w must be > 0)";
  if (!(b.h > 0.0)) msg << " (h must be > 0)";
  throw ValidationError(msg.str());
}

BoundingBox clamp_to_canvas(BoundingBox b, double min_extent) {
  b.w = std::clamp(b.w, min_extent, 1.0);
  b.h = std::clamp(b.h, min_extent, 1.0);
  b.x = std::clamp(b.x, 0.0, 1.0 - b.w);
  b.y = std::clamp(b.y, 0.0, 1.0 - b.h);
  return b;
}

std::vector<CategoryId> Layout::categories() const {
  std::vector<CategoryId> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.category);
  return out;
}

void validate(const Layout& layout, const CategoryTable& table) {
  if (layout.components.empty()) throw ValidationError("layout: components must not be empty");
  if (layout.canvas_width < 0 || layout.canvas_height < 0) throw ValidationError("layout: negative canvas_px");
  for (size_t i = 0; i < layout.components.size(); ++i) {
    const auto& c = layout.components[i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (c.category == kCanvasCategory) throw ValidationError(where + ".category: \"canvas\" is reserved");
    if (c.category < 0 || c.category >= table.size()) throw ValidationError(where + ".category: out of range");
    validate(c.box, where + ".bbox");
  }
}

}  // namespace ndn
