#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ndn/core/types.hpp"

namespace ndn {

// Values 0..9 relate two components, 10..18 place a component on the canvas 3x3 grid.
enum class LocationRelation : std::uint8_t {
  Above = 0,
  Below,
  LeftOf,
  RightOf,
  UpperLeftOf,
  UpperRightOf,
  LowerLeftOf,
  LowerRightOf,
  Surrounding,
  Inside,
  TopLeft = 10,
  TopCenter,
  TopRight,
  CenterLeft,
  Center,
  CenterRight,
  BottomLeft,
  BottomCenter,
  BottomRight,
  Unknown = 19,
};

enum class SizeRelation : std::uint8_t { Smaller = 0, Equal, Larger, Unknown };

inline constexpr int kPairLocationCount = 10;
inline constexpr int kCanvasLocationCount = 9;
inline constexpr int kLocationCount = 20;  // including unknown
inline constexpr int kSizeCount = 4;       // including unknown
inline constexpr int kFirstCanvasLocation = 10;

[[nodiscard]] std::string_view to_string(LocationRelation r);
[[nodiscard]] std::string_view to_string(SizeRelation r);
[[nodiscard]] std::optional<LocationRelation> parse_location(std::string_view name);
[[nodiscard]] std::optional<SizeRelation> parse_size(std::string_view name);

[[nodiscard]] constexpr bool is_canvas_relation(LocationRelation r) {
  const auto v = static_cast<int>(r);
  return v >= kFirstCanvasLocation && v < kFirstCanvasLocation + kCanvasLocationCount;
}
[[nodiscard]] constexpr bool is_pair_relation(LocationRelation r) { return static_cast<int>(r) < kPairLocationCount; }

/// The relation seen from the other endpoint. Canvas relations and unknown map to themselves.
[[nodiscard]] LocationRelation mirror(LocationRelation r);
[[nodiscard]] SizeRelation mirror(SizeRelation r);

// Geometric extraction. Rule order for a pair: strict containment, then
// vertical relation when the horizontal spans overlap (above/below win over
// left/right), then horizontal relation when the vertical spans overlap,
// then the diagonal quadrant of the centers.
[[nodiscard]] LocationRelation extract_location_relation(const BoundingBox& a, const BoundingBox& b);

inline constexpr double kEqualSizeBand = 1.1;
/// larger when area(a) > 1.1 area(b), smaller when 1.1 area(a) < area(b), equal otherwise.
[[nodiscard]] SizeRelation extract_size_relation(const BoundingBox& a, const BoundingBox& b);

/// Cell of the box center in a 3x3 grid over the canvas.
[[nodiscard]] LocationRelation extract_canvas_relation(const BoundingBox& b);

}  // namespace ndn
