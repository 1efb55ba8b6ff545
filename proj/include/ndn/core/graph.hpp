#pragma once

#include <utility>
#include <vector>

#include "ndn/core/relations.hpp"
#include "ndn/core/types.hpp"

namespace ndn {

/// Number of unordered node pairs (i < j) in a complete graph over `nodes` nodes.
[[nodiscard]] constexpr int pair_count(int nodes) { return nodes * (nodes - 1) / 2; }

/// Position of pair (i, j), i < j, in canonical order (0,1) (0,2) ... (0,n-1) (1,2) ...
[[nodiscard]] constexpr int pair_index(int i, int j, int nodes) {
  return i * nodes - i * (i + 1) / 2 + (j - i - 1);
}

/// All (i, j) with i < j in canonical order.
[[nodiscard]] std::vector<std::pair<int, int>> canonical_pairs(int nodes);

// Complete relation graph with the canvas at node 0. Every unordered pair
// carries exactly one location and one size relation, stored in the i < j
// direction; the reverse direction is the mirror relation. Unknown entries
// make the graph partial.
class LayoutGraph {
 public:
  LayoutGraph() = default;
  /// All edges unknown. `components` excludes the canvas.
  explicit LayoutGraph(std::vector<CategoryId> components);

  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] int component_count() const { return node_count() - 1; }
  [[nodiscard]] int edge_pair_count() const { return static_cast<int>(loc_.size()); }
  [[nodiscard]] const std::vector<CategoryId>& nodes() const { return nodes_; }
  [[nodiscard]] CategoryId category(int node) const { return nodes_.at(static_cast<size_t>(node)); }

  /// Directed lookups; either direction may be asked.
  [[nodiscard]] LocationRelation location(int i, int j) const;
  [[nodiscard]] SizeRelation size(int i, int j) const;
  /// Stores r for i -> j (its mirror when i > j). Canvas relations require i == 0.
  void set_location(int i, int j, LocationRelation r);
  void set_size(int i, int j, SizeRelation r);

  /// Canonical-order storage, indexed by pair_index.
  [[nodiscard]] const std::vector<LocationRelation>& location_edges() const { return loc_; }
  [[nodiscard]] const std::vector<SizeRelation>& size_edges() const { return size_; }
  std::vector<LocationRelation>& location_edges() { return loc_; }
  std::vector<SizeRelation>& size_edges() { return size_; }

  [[nodiscard]] bool is_complete() const;
  [[nodiscard]] int known_edge_count() const;

  bool operator==(const LayoutGraph&) const = default;

 private:
  int checked_pair(int i, int j) const;

  std::vector<CategoryId> nodes_;
  std::vector<LocationRelation> loc_;
  std::vector<SizeRelation> size_;
};

/// Complete graph of the relations that hold between the layout's boxes.
[[nodiscard]] LayoutGraph graph_from_layout(const Layout& layout);

/// Fraction of the graph's known edges that the layout's boxes satisfy; 1 when nothing is known.
[[nodiscard]] double check_consistency(const LayoutGraph& graph, const Layout& layout);

/// Throws PreconditionError when any edge is unknown.
void require_complete(const LayoutGraph& graph, const char* who);

}  // namespace ndn
