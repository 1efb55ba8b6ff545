#include "ndn/core/relations.hpp"

#include <algorithm>
#include <cmath>

namespace ndn {
namespace {

constexpr std::array<std::string_view, kLocationCount> kLocationNames = {
    "above",         "below",          "left-of",      "right-of",      "upper-left-of",
    "upper-right-of", "lower-left-of", "lower-right-of", "surrounding",  "inside",
    "top-left",      "top-center",     "top-right",    "center-left",   "center",
    "center-right",  "bottom-left",    "bottom-center", "bottom-right", "unknown",
};

constexpr std::array<std::string_view, kSizeCount> kSizeNames = {"smaller", "equal", "larger", "unknown"};

bool contains(const BoundingBox& outer, const BoundingBox& inner) {
  return outer.x <= inner.x && outer.y <= inner.y && outer.right() >= inner.right() &&
         outer.bottom() >= inner.bottom() && !(outer == inner);
}

}  // namespace

std::string_view to_string(LocationRelation r) { return kLocationNames.at(static_cast<size_t>(r)); }
std::string_view to_string(SizeRelation r) { return kSizeNames.at(static_cast<size_t>(r)); }

std::optional<LocationRelation> parse_location(std::string_view name) {
  for (size_t i = 0; i < kLocationNames.size(); ++i) {
    if (kLocationNames[i] == name) return static_cast<LocationRelation>(i);
  }
  return std::nullopt;
}

std::optional<SizeRelation> parse_size(std::string_view name) {
  for (size_t i = 0; i < kSizeNames.size(); ++i) {
    if (kSizeNames[i] == name) return static_cast<SizeRelation>(i);
  }
  return std::nullopt;
}

LocationRelation mirror(LocationRelation r) {
  using L = LocationRelation;
  switch (r) {
    case L::Above: return L::Below;
    case L::Below: return L::Above;
    case L::LeftOf: return L::RightOf;
    case L::RightOf: return L::LeftOf;
    case L::UpperLeftOf: return L::LowerRightOf;
    case L::LowerRightOf: return L::UpperLeftOf;
    case L::UpperRightOf: return L::LowerLeftOf;
    case L::LowerLeftOf: return L::UpperRightOf;
    case L::Surrounding: return L::Inside;
    case L::Inside: return L::Surrounding;
    default: return r;
  }
}

SizeRelation mirror(SizeRelation r) {
  switch (r) {
    case SizeRelation::Smaller: return SizeRelation::Larger;
    case SizeRelation::Larger: return SizeRelation::Smaller;
    default: return r;
  }
}

LocationRelation extract_location_relation(const BoundingBox& a, const BoundingBox& b) {
  using L = LocationRelation;
  if (contains(a, b)) return L::Surrounding;
  if (contains(b, a)) return L::Inside;

  const double x_overlap = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  if (x_overlap > 0.0) return a.center_y() <= b.center_y() ? L::Above : L::Below;

  const double y_overlap = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (y_overlap > 0.0) return a.center_x() < b.center_x() ? L::LeftOf : L::RightOf;

  const bool left = a.center_x() < b.center_x();
  const bool up = a.center_y() < b.center_y();
  if (up) return left ? L::UpperLeftOf : L::UpperRightOf;
  return left ? L::LowerLeftOf : L::LowerRightOf;
}

SizeRelation extract_size_relation(const BoundingBox& a, const BoundingBox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a > kEqualSizeBand * area_b) return SizeRelation::Larger;
  if (kEqualSizeBand * area_a < area_b) return SizeRelation::Smaller;
  return SizeRelation::Equal;
}

LocationRelation extract_canvas_relation(const BoundingBox& b) {
  const int row = std::clamp(static_cast<int>(std::floor(b.center_y() * 3.0)), 0, 2);
  const int col = std::clamp(static_cast<int>(std::floor(b.center_x() * 3.0)), 0, 2);
  return static_cast<LocationRelation>(kFirstCanvasLocation + row * 3 + col);
}

}  // namespace ndn
