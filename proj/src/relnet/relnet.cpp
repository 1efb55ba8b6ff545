#include "ndn/relnet/relnet.hpp"

#include <cmath>
#include <stdexcept>

namespace ndn::relnet {
namespace {

using nn::Var;

int target_column(LocationRelation r) { return static_cast<int>(r); }
int target_column(SizeRelation r) { return kSizeColumns + static_cast<int>(r); }

// Targets and column ranges for every edge row of a batch of complete graphs.
struct EdgeTargets {
  std::vector<int> target, lo, hi;
};

void append_targets(const LayoutGraph& g, EdgeTargets& t) {
  require_complete(g, "relation targets");
  const int n = g.node_count();
  const int pairs = g.edge_pair_count();
  for (int p = 0; p < pairs; ++p) {
    const bool canvas = p < n - 1;
    t.target.push_back(target_column(g.location_edges()[static_cast<size_t>(p)]));
    t.lo.push_back(canvas ? kCanvasColumns : kPairColumns);
    t.hi.push_back(canvas ? kSizeColumns : kCanvasColumns);
  }
  for (int p = 0; p < pairs; ++p) {
    t.target.push_back(target_column(g.size_edges()[static_cast<size_t>(p)]));
    t.lo.push_back(kSizeColumns);
    t.hi.push_back(kLogitColumns);
  }
}

int argmax_in(const Matrix& m, int row, int lo, int hi) {
  int best = lo;
  for (int c = lo + 1; c < hi; ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

}  // namespace

std::pair<int, int> EdgeLogits::class_range(int row) const {
  if (row < pairs) {
    return row < nodes - 1 ? std::pair{kCanvasColumns, kSizeColumns} : std::pair{kPairColumns, kCanvasColumns};
  }
  return {kSizeColumns, kLogitColumns};
}

RelationLoss relation_loss(const EdgeLogits& logits, const LayoutGraph& target, const Vector& mu,
                           const Vector& logvar, const LossWeights& weights) {
  if (logits.values.rows() != 2 * target.edge_pair_count() || logits.values.cols() != kLogitColumns ||
      logits.pairs != target.edge_pair_count()) {
    throw std::invalid_argument("relation_loss: logits do not match the target graph");
  }
  if (mu.size() != logvar.size()) throw std::invalid_argument("relation_loss: mu/logvar size mismatch");
  EdgeTargets t;
  append_targets(target, t);

  RelationLoss out;
  const auto rows = static_cast<int>(t.target.size());
  for (int r = 0; r < rows; ++r) {
    const int lo = t.lo[static_cast<size_t>(r)];
    const int hi = t.hi[static_cast<size_t>(r)];
    double peak = -INFINITY;
    for (int c = lo; c < hi; ++c) peak = std::max(peak, static_cast<double>(logits.values(r, c)));
    double z = 0.0;
    for (int c = lo; c < hi; ++c) z += std::exp(static_cast<double>(logits.values(r, c)) - peak);
    out.cls += peak + std::log(z) - static_cast<double>(logits.values(r, t.target[static_cast<size_t>(r)]));
  }
  out.cls /= rows;
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double m = mu[k];
    const double lv = logvar[k];
    out.kl += 0.5 * (m * m + std::exp(lv) - 1.0 - lv);
  }
  out.total = weights.cls * out.cls + weights.kl * out.kl;
  return out;
}

RelationPredictor::RelationPredictor(int categories, nn::NetConfig config, std::uint64_t seed)
    : categories_(categories), config_(config) {
  if (categories < 2) throw std::invalid_argument("RelationPredictor: need the canvas and at least one category");
  std::mt19937_64 rng(seed);
  const int e = config.embed_dim;
  const int h = config.hidden_dim;
  const int l = config.latent_dim;
  enc_embed_ = nn::GraphEmbedding<Real>(store_, "relnet.enc.embed", categories, e, rng);
  enc_gnn_ = nn::GraphConvStack<Real>(store_, "relnet.enc.gnn", e, e, h, config.gnn_layers, rng);
  enc_mu_ = nn::Linear<Real>(store_, "relnet.enc.mu", h, l, rng);
  enc_logvar_ = nn::Linear<Real>(store_, "relnet.enc.logvar", h, l, rng);
  pred_embed_ = nn::GraphEmbedding<Real>(store_, "relnet.pred.embed", categories, e, rng);
  pred_gnn_ = nn::GraphConvStack<Real>(store_, "relnet.pred.gnn", e + l, e, h, config.gnn_layers, rng);
  head_ = nn::Mlp<Real>(store_, "relnet.head", {3 * h, h, h, kLogitColumns}, rng);
}

std::pair<Var<Real>, Var<Real>> RelationPredictor::encode(nn::Tape<Real>& tape,
                                                          const nn::EncodedGraph& complete) const {
  const auto gt = enc_gnn_(nn::embed_graph(tape, complete, enc_embed_));
  const Var<Real> pooled = nn::graph_pool(gt);
  return {enc_mu_(pooled), enc_logvar_(pooled)};
}

Var<Real> RelationPredictor::logits(nn::Tape<Real>& tape, const nn::EncodedGraph& partial,
                                    Var<Real> z_per_graph) const {
  const Var<Real> z_nodes = nn::gather_rows(z_per_graph, partial.topo.node_graph);
  const auto gt = pred_gnn_(nn::embed_graph(tape, partial, pred_embed_, std::optional{z_nodes}));
  const auto& topo = partial.topo;
  return head_(nn::gather_triples(gt.nodes, gt.edges, topo.src, topo.dst, topo.incidence));
}

Encoding RelationPredictor::encode_complete(const LayoutGraph& graph) const {
  require_complete(graph, "encode_complete");
  nn::Tape<Real> tape(false);
  const auto encoded = nn::encode_graph(graph);
  const auto [mu, lv] = encode(tape, encoded);
  return {mu.value().row(0).transpose(), lv.value().row(0).transpose()};
}

EdgeLogits RelationPredictor::predict_edges(const LayoutGraph& partial, const Vector& z) const {
  if (z.size() != config_.latent_dim) {
    throw std::invalid_argument("predict_edges: z must have " + std::to_string(config_.latent_dim) + " entries");
  }
  nn::Tape<Real> tape(false);
  const auto encoded = nn::encode_graph(partial);
  const Var<Real> out = logits(tape, encoded, tape.constant(z.transpose()));
  return {out.value(), partial.edge_pair_count(), partial.node_count()};
}

LayoutGraph RelationPredictor::complete_graph(const LayoutGraph& partial, CompletionMode mode,
                                              std::uint64_t seed) const {
  if (!trained_) throw PreconditionError("complete_graph: relation predictor is untrained");
  Vector z = Vector::Zero(config_.latent_dim);
  if (mode == CompletionMode::Sample) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = static_cast<Real>(normal(rng));
  }
  const EdgeLogits scores = predict_edges(partial, z);
  LayoutGraph out = partial;
  const int pairs = partial.edge_pair_count();
  for (int p = 0; p < pairs; ++p) {
    auto& loc = out.location_edges()[static_cast<size_t>(p)];
    if (loc == LocationRelation::Unknown) {
      const auto [lo, hi] = scores.class_range(p);
      loc = static_cast<LocationRelation>(argmax_in(scores.values, p, lo, hi));
    }
    auto& size = out.size_edges()[static_cast<size_t>(p)];
    if (size == SizeRelation::Unknown) {
      size = static_cast<SizeRelation>(argmax_in(scores.values, pairs + p, kSizeColumns, kLogitColumns) - kSizeColumns);
    }
  }
  return out;
}

RelationLoss RelationPredictor::train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer,
                                           std::mt19937_64& rng) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  std::vector<nn::EncodedGraph> complete, partial;
  complete.reserve(batch.size());
  partial.reserve(batch.size());
  EdgeTargets targets;
  for (const auto& ex : batch) {
    if (ex.complete->nodes() != ex.partial->nodes()) {
      throw std::invalid_argument("train_step: partial graph nodes differ from the complete graph");
    }
    complete.push_back(nn::encode_graph(*ex.complete));
    partial.push_back(nn::encode_graph(*ex.partial));
    append_targets(*ex.complete, targets);
  }
  std::vector<const nn::EncodedGraph*> cp, pp;
  for (size_t k = 0; k < batch.size(); ++k) {
    cp.push_back(&complete[k]);
    pp.push_back(&partial[k]);
  }
  const nn::EncodedGraph complete_batch = nn::batch_graphs(cp);
  const nn::EncodedGraph partial_batch = nn::batch_graphs(pp);

  const auto b = static_cast<Eigen::Index>(batch.size());
  Matrix eps(b, config_.latent_dim);
  std::normal_distribution<double> normal;
  for (Eigen::Index k = 0; k < eps.size(); ++k) eps.data()[k] = static_cast<Real>(normal(rng));

  nn::Tape<Real> tape;
  const auto [mu, lv] = encode(tape, complete_batch);
  const Var<Real> z = nn::reparameterize(mu, lv, eps);
  const Var<Real> scores = logits(tape, partial_batch, z);
  const Var<Real> cls = nn::mean(nn::cross_entropy(scores, targets.target, targets.lo, targets.hi));
  const Var<Real> kl = nn::scale(nn::kl_standard_normal(mu, lv), static_cast<Real>(1.0 / static_cast<double>(b)));
  const Var<Real> total = nn::add(nn::scale(cls, static_cast<Real>(weights_.cls)), nn::scale(kl, static_cast<Real>(weights_.kl)));
  tape.backward(total);
  optimizer.step(store_);
  trained_ = true;
  return {static_cast<double>(total.value()(0, 0)), static_cast<double>(cls.value()(0, 0)),
          static_cast<double>(kl.value()(0, 0))};
}

}  // namespace ndn::relnet
