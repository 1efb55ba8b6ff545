#include "ndn/core/graph.hpp"

#include <string>

namespace ndn {

std::vector<std::pair<int, int>> canonical_pairs(int nodes) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(pair_count(nodes)));
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) out.emplace_back(i, j);
  }
  return out;
}

LayoutGraph::LayoutGraph(std::vector<CategoryId> components) {
  nodes_.reserve(components.size() + 1);
  nodes_.push_back(kCanvasCategory);
  for (CategoryId c : components) {
    if (c == kCanvasCategory) throw ValidationError("graph: component may not use the canvas category");
    nodes_.push_back(c);
  }
  const auto pairs = static_cast<size_t>(pair_count(node_count()));
  loc_.assign(pairs, LocationRelation::Unknown);
  size_.assign(pairs, SizeRelation::Unknown);
}

int LayoutGraph::checked_pair(int i, int j) const {
  const int n = node_count();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw ValidationError("graph: invalid edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  return i < j ? pair_index(i, j, n) : pair_index(j, i, n);
}

LocationRelation LayoutGraph::location(int i, int j) const {
  const auto r = loc_[static_cast<size_t>(checked_pair(i, j))];
  return i < j ? r : mirror(r);
}

SizeRelation LayoutGraph::size(int i, int j) const {
  const auto r = size_[static_cast<size_t>(checked_pair(i, j))];
  return i < j ? r : mirror(r);
}

void LayoutGraph::set_location(int i, int j, LocationRelation r) {
  const int p = checked_pair(i, j);
  if (r != LocationRelation::Unknown) {
    const bool canvas_edge = i == 0 || j == 0;
    if (canvas_edge && (i != 0 || !is_canvas_relation(r))) {
      throw ValidationError("graph: canvas edges take a canvas relation with the canvas as source, got \"" +
                            std::string(to_string(r)) + "\"");
    }
    if (!canvas_edge && !is_pair_relation(r)) {
      throw ValidationError("graph: \"" + std::string(to_string(r)) + "\" is only valid from the canvas");
    }
  }
  loc_[static_cast<size_t>(p)] = i < j ? r : mirror(r);
}

void LayoutGraph::set_size(int i, int j, SizeRelation r) {
  const int p = checked_pair(i, j);
  size_[static_cast<size_t>(p)] = i < j ? r : mirror(r);
}

bool LayoutGraph::is_complete() const { return known_edge_count() == 2 * edge_pair_count(); }

int LayoutGraph::known_edge_count() const {
  int known = 0;
  for (auto r : loc_) known += r != LocationRelation::Unknown;
  for (auto r : size_) known += r != SizeRelation::Unknown;
  return known;
}

LayoutGraph graph_from_layout(const Layout& layout) {
  LayoutGraph g(layout.categories());
  const int n = g.node_count();
  auto box = [&](int node) { return node == 0 ? kCanvasBox : layout.components[static_cast<size_t>(node - 1)].box; };
  auto& loc = g.location_edges();
  auto& size = g.size_edges();
  int p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      const BoundingBox a = box(i);
      const BoundingBox b = box(j);
      loc[static_cast<size_t>(p)] = i == 0 ? extract_canvas_relation(b) : extract_location_relation(a, b);
      size[static_cast<size_t>(p)] = extract_size_relation(a, b);
    }
  }
  return g;
}

double check_consistency(const LayoutGraph& graph, const Layout& layout) {
  if (graph.component_count() != layout.size()) {
    throw ValidationError("consistency: graph has " + std::to_string(graph.component_count()) +
                          " components, layout has " + std::to_string(layout.size()));
  }
  for (int k = 0; k < layout.size(); ++k) {
    if (graph.category(k + 1) != layout.components[static_cast<size_t>(k)].category) {
      throw ValidationError("consistency: category mismatch at component " + std::to_string(k));
    }
  }
  const LayoutGraph actual = graph_from_layout(layout);
  int known = 0;
  int agree = 0;
  for (int p = 0; p < graph.edge_pair_count(); ++p) {
    const auto l = graph.location_edges()[static_cast<size_t>(p)];
    if (l != LocationRelation::Unknown) {
      ++known;
      agree += l == actual.location_edges()[static_cast<size_t>(p)];
    }
    const auto s = graph.size_edges()[static_cast<size_t>(p)];
    if (s != SizeRelation::Unknown) {
      ++known;
      agree += s == actual.size_edges()[static_cast<size_t>(p)];
    }
  }
  return known == 0 ? 1.0 : static_cast<double>(agree) / known;
}

void require_complete(const LayoutGraph& graph, const char* who) {
  if (!graph.is_complete()) throw PreconditionError(std::string(who) + ": graph contains unknown edges");
}

}  // namespace ndn
