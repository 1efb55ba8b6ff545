#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ndn/harness/checkpoint.hpp"

namespace ndn::harness {

/// Rejects constraint sets whose category table differs from the checkpoint's.
void require_same_table(const ModelBundle& bundle, const CategoryTable& table);

/// Returns `graph` when complete, otherwise the relnet completion.
[[nodiscard]] LayoutGraph complete_constraints(const ModelBundle& bundle, const LayoutGraph& graph,
                                               relnet::CompletionMode mode, std::uint64_t seed);

struct GenerateOptions {
  int samples = 1;
  std::uint64_t seed = 0;
  std::map<int, std::pair<double, double>> fixed_sizes;  // component index (0-based) -> (w, h)
  std::vector<int> order;                                // component indices (0-based); empty = given order
  bool refine = true;
  bool prior_mean = false;
  int canvas_width = 0;
  int canvas_height = 0;
};

struct GenerationResult {
  std::vector<Layout> layouts;
  std::vector<LayoutGraph> graphs;  // completed graph each layout was generated from
};

// Partial constraints are completed once per sample (sampled latent), so
// samples may differ in their relation graphs. Fixed sizes are re-imposed
// after refinement.
[[nodiscard]] GenerationResult generate_layouts(const ModelBundle& bundle, const LayoutGraph& constraints,
                                                const GenerateOptions& options);

struct RecommendOptions {
  std::uint64_t seed = 0;
  bool prior_mean = true;
  bool refine = false;
};

struct Recommendation {
  Layout layout;                        // placed components followed by the targets
  std::vector<BoundingBox> boxes;       // one per target
  LayoutGraph graph;                    // completed relation graph
};

// The partial graph holds the relations among the placed components (read
// off their boxes); every edge touching a target, canvas edges included, is
// unknown. Placed boxes are returned unchanged.
[[nodiscard]] Recommendation recommend(const ModelBundle& bundle, const Layout& placed,
                                       const std::vector<CategoryId>& targets, const RecommendOptions& options);

}  // namespace ndn::harness
