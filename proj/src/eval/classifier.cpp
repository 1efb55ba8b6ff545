#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ndn/core/hash.hpp"
#include "ndn/eval/eval.hpp"

namespace ndn::eval {
namespace {

constexpr int kChunk = 256;

// Row 0 of every graph block is the canvas.
nn::Matrix<float> box_rows(std::span<const Layout* const> layouts) {
  int rows = 0;
  for (const Layout* l : layouts) rows += l->size() + 1;
  nn::Matrix<float> m(rows, 4);
  int r = 0;
  for (const Layout* l : layouts) {
    m.row(r++) << 0, 0, 1, 1;
    for (const Component& c : l->components) {
      m.row(r++) << static_cast<float>(c.box.x), static_cast<float>(c.box.y), static_cast<float>(c.box.w),
          static_cast<float>(c.box.h);
    }
  }
  return m;
}

nn::EncodedGraph batch_of(std::span<const Layout* const> layouts, std::vector<nn::EncodedGraph>& storage) {
  storage.clear();
  storage.reserve(layouts.size());
  for (const Layout* l : layouts) storage.push_back(nn::encode_graph(graph_from_layout(*l)));
  std::vector<const nn::EncodedGraph*> parts;
  for (const auto& g : storage) parts.push_back(&g);
  return nn::batch_graphs(parts);
}

}  // namespace

LayoutClassifier::LayoutClassifier(int categories, nn::NetConfig net, int feature_dim, std::uint64_t seed)
    : categories_(categories), net_(net), feature_dim_(feature_dim) {
  if (categories < 2) throw std::invalid_argument("LayoutClassifier: need the canvas and at least one category");
  std::mt19937_64 rng(seed);
  embed_ = nn::GraphEmbedding<float>(store_, "classifier.embed", categories, net.embed_dim, rng);
  gnn_ = nn::GraphConvStack<float>(store_, "classifier.gnn", net.embed_dim + 4, net.embed_dim, net.hidden_dim,
                                   kGraphLayers, rng);
  head_ = nn::Mlp<float>(store_, "classifier.head", {net.hidden_dim, feature_dim, feature_dim, 1}, rng);
}

std::vector<nn::Var<float>> LayoutClassifier::forward(nn::Tape<float>& tape, const nn::EncodedGraph& graphs,
                                                      const nn::Matrix<float>& boxes) const {
  const auto gt = gnn_(nn::embed_graph(tape, graphs, embed_, std::optional{tape.constant(boxes)}));
  return head_.forward_all(nn::graph_pool(gt));
}

template <typename Fn>
void LayoutClassifier::for_chunks(std::span<const Layout> layouts, Fn&& fn) const {
  std::vector<nn::EncodedGraph> storage;
  for (size_t start = 0; start < layouts.size(); start += kChunk) {
    const size_t end = std::min(layouts.size(), start + kChunk);
    std::vector<const Layout*> chunk;
    for (size_t k = start; k < end; ++k) chunk.push_back(&layouts[k]);
    const nn::EncodedGraph graphs = batch_of(chunk, storage);
    nn::Tape<float> tape(false);
    fn(start, forward(tape, graphs, box_rows(chunk)));
  }
}

Eigen::MatrixXd LayoutClassifier::features(std::span<const Layout> layouts) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(layouts.size()), feature_dim_);
  for_chunks(layouts, [&](size_t start, const std::vector<nn::Var<float>>& outs) {
    const auto& tap = outs[outs.size() - 2].value();
    out.middleRows(static_cast<Eigen::Index>(start), tap.rows()) = tap.cast<double>();
  });
  return out;
}

std::vector<double> LayoutClassifier::probability(std::span<const Layout> layouts) const {
  std::vector<double> out(layouts.size());
  for_chunks(layouts, [&](size_t start, const std::vector<nn::Var<float>>& outs) {
    const auto& logit = outs.back().value();
    for (Eigen::Index r = 0; r < logit.rows(); ++r) {
      out[start + static_cast<size_t>(r)] = 1.0 / (1.0 + std::exp(-static_cast<double>(logit(r, 0))));
    }
  });
  return out;
}

double LayoutClassifier::accuracy(std::span<const Layout> good, std::span<const Layout> bad) const {
  if (good.empty() && bad.empty()) throw std::invalid_argument("accuracy: no layouts");
  int correct = 0;
  for (double p : probability(good)) correct += p >= 0.5;
  for (double p : probability(bad)) correct += p < 0.5;
  return static_cast<double>(correct) / static_cast<double>(good.size() + bad.size());
}

double LayoutClassifier::train_step(std::span<const Layout* const> layouts, std::span<const float> labels,
                                    nn::Adam<float>& optimizer) {
  if (layouts.empty() || layouts.size() != labels.size()) throw std::invalid_argument("train_step: bad batch");
  std::vector<nn::EncodedGraph> storage;
  const nn::EncodedGraph graphs = batch_of(layouts, storage);
  nn::Tape<float> tape;
  const auto outs = forward(tape, graphs, box_rows(layouts));
  const nn::Var<float> loss = nn::bce_with_logits(outs.back(), std::vector<float>(labels.begin(), labels.end()));
  tape.backward(loss);
  optimizer.step(store_);
  trained_ = true;
  return static_cast<double>(loss.value()(0, 0));
}

std::string LayoutClassifier::content_hash() const {
  Fnv1a h;
  for (const auto& p : store_.params()) {
    h.update(p->name);
    h.update(p->value.data(), static_cast<size_t>(p->value.size()) * sizeof(float));
  }
  return h.hex();
}

TrainedClassifier train_classifier(std::span<const Layout> real, std::span<const Layout> negatives,
                                   const ClassifierConfig& config, int categories,
                                   const std::function<void(int, double)>& on_step) {
  if (real.empty() || negatives.empty()) {
    throw ValidationError("train_classifier: both good and bad layouts are required");
  }
  std::mt19937_64 rng(config.seed);
  auto split = [&](std::span<const Layout> set, std::vector<Layout>& train, std::vector<Layout>& val) {
    std::vector<size_t> order(set.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<size_t>(config.val_fraction * static_cast<double>(set.size()));
    for (size_t k = 0; k < order.size(); ++k) (k < n_val ? val : train).push_back(set[order[k]]);
  };
  std::vector<Layout> real_train, real_val, neg_train, neg_val;
  split(real, real_train, real_val);
  split(negatives, neg_train, neg_val);
  if (real_train.empty() || neg_train.empty()) throw ValidationError("train_classifier: training split is empty");

  TrainedClassifier out{LayoutClassifier(categories, config.net, config.feature_dim, rng()), {}};
  nn::Adam<float> opt(static_cast<float>(config.lr), 0.5f, 0.999f);
  std::uniform_int_distribution<size_t> pick_real(0, real_train.size() - 1);
  std::uniform_int_distribution<size_t> pick_neg(0, neg_train.size() - 1);
  for (int step = 0; step < config.steps; ++step) {
    std::vector<const Layout*> batch;
    std::vector<float> labels;
    for (int b = 0; b < config.batch; ++b) {
      const bool good = b % 2 == 0;
      batch.push_back(good ? &real_train[pick_real(rng)] : &neg_train[pick_neg(rng)]);
      labels.push_back(good ? 1.0f : 0.0f);
    }
    out.report.final_loss = out.model.train_step(batch, labels, opt);
    if (!std::isfinite(out.report.final_loss)) throw std::runtime_error("train_classifier: loss is not finite");
    if (on_step) on_step(step, out.report.final_loss);
  }
  out.report.steps = config.steps;
  const size_t cap = 2000;
  out.report.train_accuracy = out.model.accuracy(std::span(real_train).first(std::min(cap, real_train.size())),
                                                 std::span(neg_train).first(std::min(cap, neg_train.size())));
  if (!real_val.empty() || !neg_val.empty()) out.report.heldout_accuracy = out.model.accuracy(real_val, neg_val);
  return out;
}

}  // namespace ndn::eval
