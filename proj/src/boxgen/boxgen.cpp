#include "ndn/boxgen/boxgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ndn::boxgen {
namespace {

using nn::Var;

Eigen::Matrix<Real, 1, 4> box_row(const BoundingBox& b) {
  return {static_cast<Real>(b.x), static_cast<Real>(b.y), static_cast<Real>(b.w), static_cast<Real>(b.h)};
}

BoundingBox row_box(const Matrix& m, Eigen::Index r) {
  return {static_cast<double>(m(r, 0)), static_cast<double>(m(r, 1)), static_cast<double>(m(r, 2)),
          static_cast<double>(m(r, 3))};
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> normal;
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<Real>(normal(rng));
  return m;
}

double gaussian_kl(const Vector& mq, const Vector& lq, const Vector& mp, const Vector& lp) {
  double kl = 0.0;
  for (Eigen::Index k = 0; k < mq.size(); ++k) {
    const double d = static_cast<double>(mq[k]) - mp[k];
    kl += 0.5 * (static_cast<double>(lp[k]) - lq[k] + (std::exp(static_cast<double>(lq[k])) + d * d) /
                                                          std::exp(static_cast<double>(lp[k])) -
                 1.0);
  }
  return kl;
}

}  // namespace

std::string_view to_string(OrderStrategy s) {
  switch (s) {
    case OrderStrategy::Random: return "random";
    case OrderStrategy::Size: return "size";
    case OrderStrategy::Occurrence: return "occurrence";
  }
  return "random";
}

std::optional<OrderStrategy> parse_order(std::string_view name) {
  if (name == "random") return OrderStrategy::Random;
  if (name == "size") return OrderStrategy::Size;
  if (name == "occurrence") return OrderStrategy::Occurrence;
  return std::nullopt;
}

double box_l1(const BoundingBox& a, const BoundingBox& b) {
  return 0.25 * (std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.w - b.w) + std::abs(a.h - b.h));
}

LayoutLossTerms layout_loss(std::span<const BoundingBox> pred, std::span<const BoundingBox> gt,
                            const GaussianParams& posterior, const GaussianParams& prior, bool fixed_size_mode,
                            std::span<const BoundingBox> size_pred, const LossWeights& weights) {
  const size_t n = gt.size();
  if (pred.size() != n || posterior.mu.size() != n || posterior.logvar.size() != n || prior.mu.size() != n ||
      prior.logvar.size() != n) {
    throw std::invalid_argument("layout_loss: length mismatch");
  }
  if (fixed_size_mode && size_pred.size() != n) throw std::invalid_argument("layout_loss: size path length mismatch");
  LayoutLossTerms t;
  for (size_t i = 0; i < n; ++i) {
    t.recon += 4.0 * box_l1(pred[i], gt[i]);
    t.kl += gaussian_kl(posterior.mu[i], posterior.logvar[i], prior.mu[i], prior.logvar[i]);
    if (fixed_size_mode) t.size_recon += std::abs(size_pred[i].w - gt[i].w) + std::abs(size_pred[i].h - gt[i].h);
  }
  t.total = weights.recon * t.recon + weights.kl * t.kl + weights.size_recon * t.size_recon;
  return t;
}

// A batch of placement steps. Row r is one copy of a source graph with its
// own slot features; `target[r]` is the node being placed in that copy.
struct LayoutGenerator::Rollout {
  nn::EncodedGraph steps;
  std::vector<int> node_src;  // step node -> encoder-batch node
  std::vector<int> edge_src;  // step edge -> encoder-batch edge
  std::vector<int> target;    // row -> step node
  Matrix slots;

  // `sources[r]` indexes the encoder batch `enc`; `slot_rows[r]` holds one slot per node of that graph.
  Rollout(const nn::EncodedGraph& enc, const std::vector<const nn::EncodedGraph*>& parts,
          const std::vector<int>& sources, const std::vector<Matrix>& slot_rows, const std::vector<int>& targets) {
    std::vector<const nn::EncodedGraph*> copies;
    copies.reserve(sources.size());
    for (int s : sources) copies.push_back(parts[static_cast<size_t>(s)]);
    steps = nn::batch_graphs(copies);
    slots.resize(steps.topo.nodes, kSlotWidth);
    for (size_t r = 0; r < sources.size(); ++r) {
      const int s = sources[r];
      const int node_base = steps.topo.node_offset[r];
      const int n = steps.topo.node_offset[r + 1] - node_base;
      for (int i = 0; i < n; ++i) node_src.push_back(enc.topo.node_offset[static_cast<size_t>(s)] + i);
      const int m = steps.topo.edge_offset[r + 1] - steps.topo.edge_offset[r];
      for (int e = 0; e < m; ++e) edge_src.push_back(enc.topo.edge_offset[static_cast<size_t>(s)] + e);
      slots.middleRows(node_base, n) = slot_rows[r];
      target.push_back(node_base + targets[r]);
    }
  }
};

namespace {

Matrix make_slots(int nodes, const std::vector<std::optional<BoundingBox>>& placed) {
  Matrix s = Matrix::Zero(nodes, kSlotWidth);
  s.row(0) << 0, 0, 1, 1, 1;
  for (int i = 1; i < nodes; ++i) {
    const auto& b = placed[static_cast<size_t>(i)];
    if (b) {
      s.block(i, 0, 1, 4) = box_row(*b);
      s(i, 4) = 1;
    }
  }
  return s;
}

}  // namespace

LayoutGenerator::LayoutGenerator(int categories, nn::NetConfig config, std::uint64_t seed)
    : categories_(categories), config_(config) {
  if (categories < 2) throw std::invalid_argument("LayoutGenerator: need the canvas and at least one category");
  std::mt19937_64 rng(seed);
  const int e = config.embed_dim;
  const int h = config.hidden_dim;
  const int l = config.latent_dim;
  embed_ = nn::GraphEmbedding<Real>(store_, "boxgen.embed", categories, e, rng);
  g_enc_ = nn::GraphConvStack<Real>(store_, "boxgen.enc", e, e, h, config.gnn_layers, rng);
  g_update_ = nn::GraphConvStack<Real>(store_, "boxgen.update", h + kSlotWidth, h, h, config.gnn_layers, rng);
  posterior_ = nn::Mlp<Real>(store_, "boxgen.posterior", {4 + h, h, h, 2 * l}, rng);
  prior_ = nn::Mlp<Real>(store_, "boxgen.prior", {h, h, h, 2 * l}, rng);
  size_encoder_ = nn::Mlp<Real>(store_, "boxgen.size_encoder", {2 + h, h, h, 2 * l}, rng);
  decoder_ = nn::Mlp<Real>(store_, "boxgen.decoder", {l + h, h, h, 4}, rng);
}

nn::GraphTensor<Real> LayoutGenerator::run_encoder(nn::Tape<Real>& tape, const nn::EncodedGraph& graph) const {
  return g_enc_(nn::embed_graph(tape, graph, embed_));
}

Var<Real> LayoutGenerator::contexts(nn::Tape<Real>& tape, const Rollout& rollout, Var<Real> enc_nodes,
                                    Var<Real> enc_edges) const {
  nn::GraphTensor<Real> in;
  in.topo = &rollout.steps.topo;
  in.nodes = nn::concat_cols<Real>({nn::gather_rows(enc_nodes, rollout.node_src), tape.constant(rollout.slots)});
  in.edges = nn::gather_rows(enc_edges, rollout.edge_src);
  return nn::gather_rows(g_update_(in).nodes, rollout.target);
}

Var<Real> LayoutGenerator::decode(Var<Real> z, Var<Real> context) const {
  return nn::sigmoid(decoder_(nn::concat_cols<Real>({z, context})));
}

Features LayoutGenerator::encode_features(const LayoutGraph& graph) const {
  require_complete(graph, "encode_features");
  nn::Tape<Real> tape(false);
  const auto encoded = nn::encode_graph(graph);
  const auto gt = run_encoder(tape, encoded);
  return {gt.nodes.value(), gt.edges.value()};
}

Vector LayoutGenerator::update_context(const LayoutGraph& graph, const Features& features,
                                       const std::vector<std::optional<BoundingBox>>& placed, int target) const {
  const int n = graph.node_count();
  if (static_cast<int>(placed.size()) != n) throw std::invalid_argument("update_context: need one slot per node");
  if (target < 1 || target >= n) throw std::invalid_argument("update_context: target out of range");
  if (placed[static_cast<size_t>(target)]) throw std::invalid_argument("update_context: target is already placed");
  if (features.nodes.rows() != n || features.edges.rows() != 2 * graph.edge_pair_count()) {
    throw std::invalid_argument("update_context: features do not match the graph");
  }
  const auto encoded = nn::encode_graph(graph);
  const std::vector<const nn::EncodedGraph*> parts{&encoded};
  const Rollout rollout(encoded, parts, {0}, {make_slots(n, placed)}, {target});
  nn::Tape<Real> tape(false);
  const Var<Real> c = contexts(tape, rollout, tape.constant(features.nodes), tape.constant(features.edges));
  return c.value().row(0).transpose();
}

BoxSample LayoutGenerator::box_step(const Vector& context, StepMode mode, std::uint64_t seed,
                                    const std::optional<BoundingBox>& gt) const {
  if (context.size() != config_.hidden_dim) throw std::invalid_argument("box_step: context width mismatch");
  if (mode == StepMode::Posterior && !gt) throw PreconditionError("box_step: posterior mode needs the ground-truth box");
  const int l = config_.latent_dim;
  nn::Tape<Real> tape(false);
  const Var<Real> c = tape.constant(context.transpose());
  Var<Real> stats;
  if (mode == StepMode::Posterior) {
    stats = posterior_(nn::concat_cols<Real>({tape.constant(box_row(*gt)), c}));
  } else {
    stats = prior_(c);
  }
  const Var<Real> mu = nn::slice_cols(stats, 0, l);
  const Var<Real> lv = nn::slice_cols(stats, l, l);
  std::mt19937_64 rng(seed);
  const Var<Real> z = nn::reparameterize(mu, lv, normal_matrix(1, l, rng));
  return {row_box(decode(z, c).value(), 0), mu.value().row(0).transpose(), lv.value().row(0).transpose()};
}

BoundingBox LayoutGenerator::decode_prior_mean(const Vector& context) const {
  nn::Tape<Real> tape(false);
  const Var<Real> c = tape.constant(context.transpose());
  const Var<Real> mu = nn::slice_cols(prior_(c), 0, config_.latent_dim);
  return row_box(decode(mu, c).value(), 0);
}

std::vector<Layout> LayoutGenerator::generate(const GenerationRequest& req) const {
  if (!trained_) throw PreconditionError("generate: layout generator is untrained");
  require_complete(req.graph, "generate");
  const int n = req.graph.node_count();
  if (req.num_samples < 1) throw ValidationError("generate: num_samples must be positive");
  std::vector<int> order = req.order;
  if (order.empty()) {
    order.resize(static_cast<size_t>(n - 1));
    std::iota(order.begin(), order.end(), 1);
  }
  {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expected(static_cast<size_t>(n - 1));
    std::iota(expected.begin(), expected.end(), 1);
    if (sorted != expected) throw ValidationError("generate: order must be a permutation of the components");
  }
  for (const auto& [node, wh] : req.fixed_sizes) {
    if (node < 1 || node >= n) throw ValidationError("generate: fixed size for unknown component " + std::to_string(node));
    if (!(wh.first > 0.0 && wh.first <= 1.0 && wh.second > 0.0 && wh.second <= 1.0)) {
      throw ValidationError("generate: fixed sizes must lie in (0, 1]");
    }
  }

  const int k_samples = req.num_samples;
  const int l = config_.latent_dim;
  const Features f = encode_features(req.graph);
  const auto encoded = nn::encode_graph(req.graph);
  const std::vector<const nn::EncodedGraph*> parts{&encoded};
  std::mt19937_64 rng(req.seed);

  std::vector<std::vector<std::optional<BoundingBox>>> placed(
      static_cast<size_t>(k_samples), std::vector<std::optional<BoundingBox>>(static_cast<size_t>(n)));
  for (int target : order) {
    std::vector<Matrix> slots;
    for (const auto& p : placed) slots.push_back(make_slots(n, p));
    const Rollout rollout(encoded, parts, std::vector<int>(static_cast<size_t>(k_samples), 0), slots,
                          std::vector<int>(static_cast<size_t>(k_samples), target));
    nn::Tape<Real> tape(false);
    const Var<Real> c = contexts(tape, rollout, tape.constant(f.nodes), tape.constant(f.edges));
    const Var<Real> stats = prior_(c);
    const Var<Real> mu = nn::slice_cols(stats, 0, l);
    Var<Real> z = mu;
    if (!req.prior_mean) z = nn::reparameterize(mu, nn::slice_cols(stats, l, l), normal_matrix(k_samples, l, rng));
    const Matrix boxes = decode(z, c).value();
    for (int s = 0; s < k_samples; ++s) {
      BoundingBox b = row_box(boxes, s);
      if (const auto it = req.fixed_sizes.find(target); it != req.fixed_sizes.end()) {
        b.w = it->second.first;
        b.h = it->second.second;
      }
      placed[static_cast<size_t>(s)][static_cast<size_t>(target)] = clamp_to_canvas(b);
    }
  }

  std::vector<Layout> out;
  out.reserve(static_cast<size_t>(k_samples));
  for (const auto& p : placed) {
    Layout layout;
    layout.canvas_width = req.canvas_width;
    layout.canvas_height = req.canvas_height;
    for (int i = 1; i < n; ++i) layout.components.push_back({req.graph.category(i), *p[static_cast<size_t>(i)]});
    out.push_back(std::move(layout));
  }
  return out;
}

std::vector<BoundingBox> LayoutGenerator::place(const LayoutGraph& graph,
                                                std::vector<std::optional<BoundingBox>> placed,
                                                const std::vector<int>& targets, bool prior_mean,
                                                std::uint64_t seed) const {
  if (!trained_) throw PreconditionError("place: layout generator is untrained");
  const Features f = encode_features(graph);
  std::mt19937_64 rng(seed);
  std::vector<BoundingBox> out;
  for (int target : targets) {
    const Vector c = update_context(graph, f, placed, target);
    const BoundingBox b = clamp_to_canvas(prior_mean ? decode_prior_mean(c) : box_step(c, StepMode::Prior, rng()).box);
    placed[static_cast<size_t>(target)] = b;
    out.push_back(b);
  }
  return out;
}

BoundingBox LayoutGenerator::leave_one_out_predict(const Layout& layout, int target_index) const {
  if (target_index < 0 || target_index >= layout.size()) {
    throw std::out_of_range("leave_one_out_predict: target index out of range");
  }
  const LayoutGraph graph = graph_from_layout(layout);
  std::vector<std::optional<BoundingBox>> placed(static_cast<size_t>(graph.node_count()));
  for (int i = 0; i < layout.size(); ++i) {
    if (i != target_index) placed[static_cast<size_t>(i + 1)] = layout.components[static_cast<size_t>(i)].box;
  }
  return place(graph, std::move(placed), {target_index + 1}, true, 0).front();
}

std::vector<int> LayoutGenerator::order_for(const LayoutGraph& graph, std::mt19937_64& rng) const {
  const int n = graph.node_count();
  std::vector<int> order(static_cast<size_t>(n - 1));
  std::iota(order.begin(), order.end(), 1);
  switch (order_) {
    case OrderStrategy::Random:
      std::shuffle(order.begin(), order.end(), rng);
      break;
    case OrderStrategy::Size: {
      // Components that are larger than more of the others go first.
      std::vector<int> wins(static_cast<size_t>(n), 0);
      for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
          if (i != j && graph.size(i, j) == SizeRelation::Larger) ++wins[static_cast<size_t>(i)];
        }
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return wins[static_cast<size_t>(a)] > wins[static_cast<size_t>(b)]; });
      break;
    }
    case OrderStrategy::Occurrence: {
      auto freq = [&](int node) {
        const auto c = static_cast<size_t>(graph.category(node));
        return c < frequency_.size() ? frequency_[c] : 0.0;
      };
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return freq(a) > freq(b); });
      break;
    }
  }
  return order;
}

LayoutLossTerms LayoutGenerator::train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer,
                                            std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  const int l = config_.latent_dim;
  std::vector<nn::EncodedGraph> graphs;
  graphs.reserve(batch.size());
  for (const auto& ex : batch) {
    require_complete(*ex.graph, "boxgen training");
    if (ex.graph->component_count() != ex.layout->size()) {
      throw std::invalid_argument("train_step: graph and layout sizes differ");
    }
    graphs.push_back(nn::encode_graph(*ex.graph));
  }
  std::vector<const nn::EncodedGraph*> parts;
  for (const auto& g : graphs) parts.push_back(&g);
  const nn::EncodedGraph enc = nn::batch_graphs(parts);

  // Teacher forcing: step k sees the ground-truth boxes of order[0..k-1].
  std::vector<int> sources, targets;
  std::vector<Matrix> slots;
  std::vector<BoundingBox> gt_boxes;
  for (size_t b = 0; b < batch.size(); ++b) {
    const Layout& layout = *batch[b].layout;
    const int n = batch[b].graph->node_count();
    std::vector<std::optional<BoundingBox>> placed(static_cast<size_t>(n));
    for (int target : order_for(*batch[b].graph, rng)) {
      sources.push_back(static_cast<int>(b));
      targets.push_back(target);
      slots.push_back(make_slots(n, placed));
      const BoundingBox& box = layout.components[static_cast<size_t>(target - 1)].box;
      gt_boxes.push_back(box);
      placed[static_cast<size_t>(target)] = box;
    }
  }
  const Rollout rollout(enc, parts, sources, slots, targets);
  const auto rows = static_cast<Eigen::Index>(gt_boxes.size());
  Matrix gt(rows, 4);
  for (Eigen::Index r = 0; r < rows; ++r) gt.row(r) = box_row(gt_boxes[static_cast<size_t>(r)]);

  nn::Tape<Real> tape;
  const auto encoded = run_encoder(tape, enc);
  const Var<Real> c = contexts(tape, rollout, encoded.nodes, encoded.edges);
  const Var<Real> gt_var = tape.constant(gt);
  const Var<Real> q = posterior_(nn::concat_cols<Real>({gt_var, c}));
  const Var<Real> p = prior_(c);
  const Var<Real> mu_q = nn::slice_cols(q, 0, l);
  const Var<Real> lv_q = nn::slice_cols(q, l, l);
  const Var<Real> z = nn::reparameterize(mu_q, lv_q, normal_matrix(rows, l, rng));
  const Var<Real> pred = decode(z, c);

  const Real per_layout = static_cast<Real>(1.0 / static_cast<double>(batch.size()));
  const Var<Real> recon = nn::scale(nn::sum(nn::abs(nn::sub(pred, gt_var))), per_layout);
  const Var<Real> kl = nn::scale(
      nn::kl_gaussians(mu_q, lv_q, nn::slice_cols(p, 0, l), nn::slice_cols(p, l, l)), per_layout);
  Var<Real> total = nn::add(nn::scale(recon, static_cast<Real>(weights_.recon)), nn::scale(kl, static_cast<Real>(weights_.kl)));
  double size_value = 0.0;
  if (size_training_) {
    const Var<Real> gt_wh = tape.constant(gt.rightCols(2));
    const Var<Real> s = size_encoder_(nn::concat_cols<Real>({gt_wh, c}));
    const Var<Real> zs = nn::reparameterize(nn::slice_cols(s, 0, l), nn::slice_cols(s, l, l), normal_matrix(rows, l, rng));
    const Var<Real> size_pred = nn::slice_cols(decode(zs, c), 2, 2);
    const Var<Real> size_recon = nn::scale(nn::sum(nn::abs(nn::sub(size_pred, gt_wh))), per_layout);
    total = nn::add(total, nn::scale(size_recon, static_cast<Real>(weights_.size_recon)));
    size_value = static_cast<double>(size_recon.value()(0, 0));
  }
  tape.backward(total);
  optimizer.step(store_);
  trained_ = true;
  return {static_cast<double>(total.value()(0, 0)), static_cast<double>(recon.value()(0, 0)),
          static_cast<double>(kl.value()(0, 0)), size_value};
}

MeanBoxBaseline::MeanBoxBaseline(std::span<const Layout> layouts) {
  constexpr BoundingBox kZero{0.0, 0.0, 0.0, 0.0};
  std::map<CategoryId, std::pair<BoundingBox, int>> acc;
  BoundingBox all = kZero;
  int count = 0;
  for (const Layout& l : layouts) {
    for (const Component& c : l.components) {
      auto& [sum, k] = acc.try_emplace(c.category, kZero, 0).first->second;
      sum = {sum.x + c.box.x, sum.y + c.box.y, sum.w + c.box.w, sum.h + c.box.h};
      ++k;
      all = {all.x + c.box.x, all.y + c.box.y, all.w + c.box.w, all.h + c.box.h};
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("MeanBoxBaseline: no components");
  for (const auto& [cat, sk] : acc) {
    const double k = sk.second;
    mean_[cat] = {sk.first.x / k, sk.first.y / k, sk.first.w / k, sk.first.h / k};
  }
  overall_ = {all.x / count, all.y / count, all.w / count, all.h / count};
}

BoundingBox MeanBoxBaseline::predict(CategoryId category) const {
  const auto it = mean_.find(category);
  return it == mean_.end() ? overall_ : it->second;
}

}  // namespace ndn::boxgen
