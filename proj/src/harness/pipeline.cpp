#include "ndn/harness/pipeline.hpp"

#include <random>

namespace ndn::harness {

void require_same_table(const ModelBundle& bundle, const CategoryTable& table) {
  if (!(table == bundle.categories)) {
    throw ValidationError("categories: the constraint category table does not match the checkpoint's");
  }
}

LayoutGraph complete_constraints(const ModelBundle& bundle, const LayoutGraph& graph, relnet::CompletionMode mode,
                                 std::uint64_t seed) {
  if (graph.is_complete()) return graph;
  return bundle.relnet->complete_graph(graph, mode, seed);
}

namespace {

void impose_sizes(Layout& layout, const std::map<int, std::pair<double, double>>& sizes) {
  for (const auto& [index, wh] : sizes) {
    BoundingBox& b = layout.components[static_cast<size_t>(index)].box;
    b.w = wh.first;
    b.h = wh.second;
    b.x = std::clamp(b.x, 0.0, 1.0 - b.w);
    b.y = std::clamp(b.y, 0.0, 1.0 - b.h);
  }
}

}  // namespace

GenerationResult generate_layouts(const ModelBundle& bundle, const LayoutGraph& constraints,
                                  const GenerateOptions& options) {
  const int n = constraints.component_count();
  if (options.samples < 1) throw ValidationError("samples: must be at least 1");
  for (const auto& [index, wh] : options.fixed_sizes) {
    if (index < 0 || index >= n) {
      throw ValidationError("fixed_sizes: component index " + std::to_string(index) + " is out of range");
    }
    if (!(wh.first > 0.0 && wh.first <= 1.0 && wh.second > 0.0 && wh.second <= 1.0)) {
      throw ValidationError("fixed_sizes: (w, h) must lie in (0, 1]");
    }
  }

  boxgen::GenerationRequest req;
  req.prior_mean = options.prior_mean;
  req.canvas_width = options.canvas_width;
  req.canvas_height = options.canvas_height;
  for (int i : options.order) req.order.push_back(i + 1);
  for (const auto& [index, wh] : options.fixed_sizes) req.fixed_sizes[index + 1] = wh;

  GenerationResult out;
  if (constraints.is_complete()) {
    req.graph = constraints;
    req.num_samples = options.samples;
    req.seed = options.seed;
    out.layouts = bundle.boxgen->generate(req);
    out.graphs.assign(out.layouts.size(), constraints);
  } else {
    std::mt19937_64 seeds(options.seed);
    for (int s = 0; s < options.samples; ++s) {
      const auto mode = options.prior_mean ? relnet::CompletionMode::Argmax : relnet::CompletionMode::Sample;
      req.graph = complete_constraints(bundle, constraints, mode, seeds());
      req.num_samples = 1;
      req.seed = seeds();
      out.layouts.push_back(bundle.boxgen->generate(req).front());
      out.graphs.push_back(req.graph);
    }
  }
  if (options.refine) {
    for (size_t k = 0; k < out.layouts.size(); ++k) {
      out.layouts[k] = bundle.refiner->refine(out.graphs[k], out.layouts[k]);
      impose_sizes(out.layouts[k], options.fixed_sizes);
    }
  }
  return out;
}

Recommendation recommend(const ModelBundle& bundle, const Layout& placed, const std::vector<CategoryId>& targets,
                         const RecommendOptions& options) {
  if (placed.components.empty()) throw ValidationError("placed: at least one placed component is required");
  if (targets.empty()) throw ValidationError("targets: at least one target category is required");
  for (size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] <= kCanvasCategory || targets[t] >= bundle.categories.size()) {
      throw ValidationError("targets[" + std::to_string(t) + "]: not a component category");
    }
  }
  if (!bundle.relnet->trained() || !bundle.boxgen->trained()) {
    throw PreconditionError("recommend: the checkpoint is untrained");
  }

  const int m = placed.size();
  const int n = m + static_cast<int>(targets.size());
  std::vector<CategoryId> ids = placed.categories();
  ids.insert(ids.end(), targets.begin(), targets.end());

  LayoutGraph partial(ids);
  const LayoutGraph known = graph_from_layout(placed);
  for (int i = 0; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) {
      partial.set_location(i, j, known.location(i, j));
      partial.set_size(i, j, known.size(i, j));
    }
  }
  const auto mode = options.prior_mean ? relnet::CompletionMode::Argmax : relnet::CompletionMode::Sample;
  std::mt19937_64 seeds(options.seed);
  Recommendation rec;
  rec.graph = bundle.relnet->complete_graph(partial, mode, seeds());

  std::vector<std::optional<BoundingBox>> slots(static_cast<size_t>(n + 1));
  for (int i = 0; i < m; ++i) slots[static_cast<size_t>(i + 1)] = placed.components[static_cast<size_t>(i)].box;
  std::vector<int> target_nodes;
  for (int k = m + 1; k <= n; ++k) target_nodes.push_back(k);
  rec.boxes = bundle.boxgen->place(rec.graph, slots, target_nodes, options.prior_mean, seeds());

  rec.layout = placed;
  for (size_t t = 0; t < targets.size(); ++t) rec.layout.components.push_back({targets[t], rec.boxes[t]});
  if (options.refine) {
    const Layout refined = bundle.refiner->refine(rec.graph, rec.layout);
    for (size_t t = 0; t < targets.size(); ++t) {
      rec.boxes[t] = refined.components[static_cast<size_t>(m) + t].box;
      rec.layout.components[static_cast<size_t>(m) + t].box = rec.boxes[t];
    }
  }
  return rec;
}

}  // namespace ndn::harness
