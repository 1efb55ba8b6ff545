#include <doctest.h>

#include <cmath>

#include "ndn/data/data.hpp"
#include "ndn/relnet/relnet.hpp"
#include "support/ruleset.hpp"

using namespace ndn;
using namespace ndn::relnet;
using LR = LocationRelation;
using SR = SizeRelation;

namespace {

nn::NetConfig small_net() { return {16, 32, 8, 3}; }

LayoutGraph three_component_graph() {
  Layout l{100, 100, {{1, {0.0, 0.0, 1.0, 0.1}}, {2, {0.05, 0.2, 0.9, 0.1}}, {3, {0.3, 0.8, 0.4, 0.1}}}};
  return graph_from_layout(l);
}

RelationPredictor trained_rule_model() {
  const auto layouts = ndn::testing::above_rule_layouts(200, 1);
  std::vector<LayoutGraph> graphs;
  for (const auto& l : layouts) graphs.push_back(graph_from_layout(l));
  RelationPredictor model(7, {32, 64, 16, 3}, 3);
  nn::Adam<float> opt(1e-3f, 0.5f, 0.999f);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<size_t> pick(0, graphs.size() - 1);
  for (int step = 0; step < 150; ++step) {
    std::vector<LayoutGraph> partial;
    std::vector<size_t> idx;
    for (int b = 0; b < 32; ++b) {
      idx.push_back(pick(rng));
      partial.push_back(data::sample_partial(graphs[idx.back()], std::nullopt, rng()));
    }
    std::vector<TrainingExample> batch;
    for (size_t k = 0; k < idx.size(); ++k) batch.push_back({&graphs[idx[k]], &partial[k]});
    (void)model.train_step(batch, opt, rng);
  }
  model.mark_trained();
  return model;
}

}  // namespace

TEST_CASE("encoder outputs latent-sized vectors deterministically") {
  const RelationPredictor model(7, small_net(), 1);
  const LayoutGraph g = three_component_graph();
  const Encoding a = model.encode_complete(g);
  const Encoding b = model.encode_complete(g);
  CHECK(a.mu.size() == 8);
  CHECK(a.logvar.size() == 8);
  CHECK(a.mu == b.mu);
  CHECK(a.logvar == b.logvar);
  CHECK_THROWS_AS((void)model.encode_complete(LayoutGraph({1, 2})), PreconditionError);
}

TEST_CASE("edge logits cover location and size edges including the canvas") {
  const RelationPredictor model(7, small_net(), 1);
  const LayoutGraph partial({1, 2, 3});
  const EdgeLogits logits = model.predict_edges(partial, Vector::Zero(8));
  CHECK(logits.pairs == 6);
  CHECK(logits.values.rows() == 12);
  CHECK(logits.values.cols() == kLogitColumns);
  CHECK(logits.class_range(0) == std::pair{kCanvasColumns, kSizeColumns});
  CHECK(logits.class_range(3) == std::pair{kPairColumns, kCanvasColumns});
  CHECK(logits.class_range(6) == std::pair{kSizeColumns, kLogitColumns});
  const EdgeLogits other = model.predict_edges(partial, Vector::Ones(8));
  CHECK((other.values - logits.values).cwiseAbs().maxCoeff() > 1e-6f);
  CHECK_THROWS((void)model.predict_edges(partial, Vector::Zero(3)));
}

TEST_CASE("relation loss closed forms") {
  const LayoutGraph g = three_component_graph();
  EdgeLogits uniform{Matrix::Zero(12, kLogitColumns), 6, 4};
  const Vector zero = Vector::Zero(32);
  const RelationLoss l0 = relation_loss(uniform, g, zero, zero);
  // 3 canvas location rows (9 classes), 3 pair location rows (10), 6 size rows (3).
  const double expected = (3 * std::log(9.0) + 3 * std::log(10.0) + 6 * std::log(3.0)) / 12.0;
  CHECK(l0.cls == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(l0.kl) < 1e-6);
  CHECK(l0.total == doctest::Approx(l0.cls));

  const RelationLoss l1 = relation_loss(uniform, g, Vector::Ones(32), zero);
  CHECK(l1.kl == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(l1.total == doctest::Approx(l1.cls + 0.005 * 16.0).epsilon(1e-6));

  CHECK_THROWS_AS((void)relation_loss(uniform, LayoutGraph({1, 2, 3}), zero, zero), PreconditionError);
  EdgeLogits wrong{Matrix::Zero(4, kLogitColumns), 2, 3};
  CHECK_THROWS((void)relation_loss(wrong, g, zero, zero));
}

TEST_CASE("completion requires a trained model") {
  const RelationPredictor model(7, small_net(), 1);
  CHECK_THROWS_AS((void)model.complete_graph(LayoutGraph({1}), CompletionMode::Argmax, 0), PreconditionError);
}

TEST_CASE("completion copies known edges and is seeded") {
  RelationPredictor model(7, small_net(), 2);
  model.mark_trained();
  const LayoutGraph full = three_component_graph();
  CHECK(model.complete_graph(full, CompletionMode::Sample, 3) == full);

  const LayoutGraph partial = data::sample_partial(full, 0.5, 4);
  for (auto mode : {CompletionMode::Sample, CompletionMode::Argmax}) {
    const LayoutGraph done = model.complete_graph(partial, mode, 5);
    CHECK(done.is_complete());
    for (size_t p = 0; p < partial.location_edges().size(); ++p) {
      if (partial.location_edges()[p] != LR::Unknown) CHECK(done.location_edges()[p] == partial.location_edges()[p]);
      if (partial.size_edges()[p] != SR::Unknown) CHECK(done.size_edges()[p] == partial.size_edges()[p]);
    }
    // Canvas edges only take canvas relations; pair edges only pair relations.
    for (int j = 1; j < done.node_count(); ++j) CHECK(is_canvas_relation(done.location(0, j)));
    CHECK(is_pair_relation(done.location(1, 2)));
  }
  const LayoutGraph blank({1, 2, 3});
  CHECK(model.complete_graph(blank, CompletionMode::Sample, 9) == model.complete_graph(blank, CompletionMode::Sample, 9));
}

TEST_CASE("argmax ties resolve to the lowest class") {
  RelationPredictor model(7, small_net(), 2);
  for (const char* name : {"relnet.head.2.weight", "relnet.head.2.bias"}) {
    nn::Parameter<float>* p = model.params().find(name);
    REQUIRE(p != nullptr);
    p->value.setZero();
  }
  model.mark_trained();
  const LayoutGraph done = model.complete_graph(LayoutGraph({1, 2}), CompletionMode::Argmax, 0);
  CHECK(done.location(0, 1) == LR::TopLeft);
  CHECK(done.location(1, 2) == LR::Above);
  CHECK(done.size(1, 2) == SR::Smaller);
}

TEST_CASE("a short run learns a fixed above rule") {
  const RelationPredictor model = trained_rule_model();
  const CategoryTable t = CategoryTable::standard();
  const LayoutGraph blank({t.id("image"), t.id("text")});
  CHECK(model.complete_graph(blank, CompletionMode::Argmax, 0).location(1, 2) == LR::Above);
  const LayoutGraph swapped({t.id("text"), t.id("image")});
  CHECK(model.complete_graph(swapped, CompletionMode::Argmax, 0).location(1, 2) == LR::Below);
}

TEST_CASE("training loss falls on the ruleset") {
  const auto layouts = ndn::testing::ruleset_layouts(200, 0);
  std::vector<LayoutGraph> graphs;
  for (const auto& l : layouts) graphs.push_back(graph_from_layout(l));
  RelationPredictor model(7, small_net(), 4);
  nn::Adam<float> opt(1e-3f, 0.5f, 0.999f);
  std::mt19937_64 rng(2);
  double first = 0.0, last = 0.0;
  for (int step = 0; step < 60; ++step) {
    std::vector<LayoutGraph> partial;
    std::vector<TrainingExample> batch;
    for (int b = 0; b < 16; ++b) partial.push_back(data::sample_partial(graphs[(step * 16 + b) % 200], std::nullopt, rng()));
    for (int b = 0; b < 16; ++b) batch.push_back({&graphs[(step * 16 + b) % 200], &partial[static_cast<size_t>(b)]});
    const RelationLoss l = model.train_step(batch, opt, rng);
    REQUIRE(std::isfinite(l.total));
    REQUIRE(l.kl >= 0.0);
    if (step < 5) first += l.total;
    if (step >= 55) last += l.total;
  }
  CHECK(last < 0.8 * first);
}
