#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ndn {

/// Malformed input: JSON that does not follow the schema, or a field with the wrong type.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call made in a state the operation does not accept (untrained model, unknown edge, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using CategoryId = int;
inline constexpr CategoryId kCanvasCategory = 0;

/// Dense id <-> name table. Id 0 is always "canvas".
class CategoryTable {
 public:
  CategoryTable();
  explicit CategoryTable(std::vector<std::string> names);

  /// The table used by the synthetic grammars and by default checkpoints.
  static CategoryTable standard();

  [[nodiscard]] int size() const { return static_cast<int>(names_.size()); }
  [[nodiscard]] const std::string& name(CategoryId id) const;
  [[nodiscard]] CategoryId id(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

  bool operator==(const CategoryTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, CategoryId> index_;
};

/// Normalized box, origin top-left, y grows downward.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  [[nodiscard]] double right() const { return x + w; }
  [[nodiscard]] double bottom() const { return y + h; }
  [[nodiscard]] double center_x() const { return x + 0.5 * w; }
  [[nodiscard]] double center_y() const { return y + 0.5 * h; }
  [[nodiscard]] double area() const { return w * h; }

  bool operator==(const BoundingBox&) const = default;
};

inline constexpr double kBoxOvershoot = 0.01;
inline constexpr BoundingBox kCanvasBox{0.0, 0.0, 1.0, 1.0};

[[nodiscard]] bool is_valid(const BoundingBox& box);
/// Throws ValidationError naming `what` when the box breaks an invariant.
void validate(const BoundingBox& box, std::string_view what = "bbox");
/// Forces w,h into [min_extent, 1] and the box inside the unit canvas.
[[nodiscard]] BoundingBox clamp_to_canvas(BoundingBox box, double min_extent = 1e-4);

struct Component {
  CategoryId category = 0;
  BoundingBox box;

  bool operator==(const Component&) const = default;
};

struct Layout {
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<Component> components;

  [[nodiscard]] int size() const { return static_cast<int>(components.size()); }
  [[nodiscard]] std::vector<CategoryId> categories() const;
  bool operator==(const Layout&) const = default;
};

void validate(const Layout& layout, const CategoryTable& table);

}  // namespace ndn
