#include "ndn/refine/refine.hpp"

#include <cmath>
#include <stdexcept>

namespace ndn::refine {
namespace {

using Matrix = nn::Matrix<Real>;

void check_match(const LayoutGraph& graph, const Layout& layout, const char* who) {
  if (graph.component_count() != layout.size()) {
    throw ValidationError(std::string(who) + ": graph has " + std::to_string(graph.component_count()) +
                          " components, layout has " + std::to_string(layout.size()));
  }
  for (int i = 0; i < layout.size(); ++i) {
    if (graph.category(i + 1) != layout.components[static_cast<size_t>(i)].category) {
      throw ValidationError(std::string(who) + ": category mismatch at component " + std::to_string(i));
    }
  }
}

// Row 0 is the canvas.
Matrix box_matrix(const Layout& layout) {
  Matrix m(layout.size() + 1, 4);
  m.row(0) << 0, 0, 1, 1;
  for (int i = 0; i < layout.size(); ++i) {
    const BoundingBox& b = layout.components[static_cast<size_t>(i)].box;
    m.row(i + 1) << static_cast<Real>(b.x), static_cast<Real>(b.y), static_cast<Real>(b.w), static_cast<Real>(b.h);
  }
  return m;
}

}  // namespace

Layout perturb(const Layout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-kPerturbRange, kPerturbRange);
  Layout out = layout;
  for (Component& c : out.components) {
    const double dx = offset(rng);
    const double dy = offset(rng);
    BoundingBox b = c.box;
    b.x += dx;
    b.y += dy;
    b.x = std::clamp(b.x, 0.0, std::max(0.0, 1.0 - b.w));
    b.y = std::clamp(b.y, 0.0, std::max(0.0, 1.0 - b.h));
    c.box = b;
  }
  return out;
}

double refine_loss(const Layout& pred, const Layout& gt) {
  if (pred.size() != gt.size()) throw std::invalid_argument("refine_loss: layouts differ in length");
  double loss = 0.0;
  for (int i = 0; i < pred.size(); ++i) {
    const BoundingBox& a = pred.components[static_cast<size_t>(i)].box;
    const BoundingBox& b = gt.components[static_cast<size_t>(i)].box;
    loss += std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.w - b.w) + std::abs(a.h - b.h);
  }
  return loss;
}

Refiner::Refiner(int categories, nn::NetConfig config, std::uint64_t seed) : categories_(categories), config_(config) {
  if (categories < 2) throw std::invalid_argument("Refiner: need the canvas and at least one category");
  std::mt19937_64 rng(seed);
  const int e = config.embed_dim;
  const int h = config.hidden_dim;
  embed_ = nn::GraphEmbedding<Real>(store_, "refine.embed", categories, e, rng);
  g_ft_ = nn::GraphConvStack<Real>(store_, "refine.gnn", e + 4, e, h, config.gnn_layers, rng);
  head_ = nn::Linear<Real>(store_, "refine.delta", h, 4, rng);
  store_.find("refine.delta.weight")->value.setZero();
}

nn::Var<Real> Refiner::forward(nn::Tape<Real>& tape, const nn::EncodedGraph& graph, const Matrix& boxes) const {
  const nn::Var<Real> in = tape.constant(boxes);
  const auto gt = g_ft_(nn::embed_graph(tape, graph, embed_, std::optional{in}));
  return nn::add(in, head_(gt.nodes));
}

Layout Refiner::refine(const LayoutGraph& graph, const Layout& layout) const {
  check_match(graph, layout, "refine");
  nn::Tape<Real> tape(false);
  const auto encoded = nn::encode_graph(graph);
  const Matrix out = forward(tape, encoded, box_matrix(layout)).value();
  Layout refined = layout;
  for (int i = 0; i < layout.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i + 1);
    refined.components[static_cast<size_t>(i)].box = clamp_to_canvas(
        {static_cast<double>(out(r, 0)), static_cast<double>(out(r, 1)), static_cast<double>(out(r, 2)),
         static_cast<double>(out(r, 3))});
  }
  return refined;
}

double Refiner::train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer, std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  std::vector<nn::EncodedGraph> graphs;
  graphs.reserve(batch.size());
  int rows = 0;
  for (const auto& ex : batch) {
    check_match(*ex.graph, *ex.clean, "refine training");
    graphs.push_back(nn::encode_graph(*ex.graph));
    rows += ex.clean->size() + 1;
  }
  std::vector<const nn::EncodedGraph*> parts;
  for (const auto& g : graphs) parts.push_back(&g);
  const nn::EncodedGraph enc = nn::batch_graphs(parts);

  Matrix noisy(rows, 4);
  Matrix clean(rows, 4);
  std::vector<int> component_rows;
  int base = 0;
  for (const auto& ex : batch) {
    const int n = ex.clean->size() + 1;
    noisy.middleRows(base, n) = box_matrix(perturb(*ex.clean, rng()));
    clean.middleRows(base, n) = box_matrix(*ex.clean);
    for (int i = 1; i < n; ++i) component_rows.push_back(base + i);
    base += n;
  }

  nn::Tape<Real> tape;
  const nn::Var<Real> pred = nn::gather_rows(forward(tape, enc, noisy), component_rows);
  const nn::Var<Real> target = nn::gather_rows(tape.constant(clean), component_rows);
  const nn::Var<Real> loss = nn::scale(nn::sum(nn::abs(nn::sub(pred, target))),
                                       static_cast<Real>(1.0 / static_cast<double>(batch.size())));
  tape.backward(loss);
  optimizer.step(store_);
  trained_ = true;
  return static_cast<double>(loss.value()(0, 0));
}

}  // namespace ndn::refine
