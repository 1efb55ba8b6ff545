#include <doctest.h>

#include <cmath>

#include "ndn/data/data.hpp"
#include "ndn/refine/refine.hpp"

using namespace ndn;
using namespace ndn::refine;

namespace {

Layout sample_layout() {
  return {100, 100, {{1, {0.0, 0.0, 1.0, 0.1}}, {2, {0.05, 0.2, 0.9, 0.1}}, {3, {0.3, 0.8, 0.4, 0.1}}}};
}

}  // namespace

TEST_CASE("perturbation moves positions only, within range") {
  for (const Layout& l : data::synth_generate(50, 3, data::Grammar::MobileUi)) {
    const Layout p = perturb(l, 11);
    CHECK(p == perturb(l, 11));
    REQUIRE(p.size() == l.size());
    CHECK(p.canvas_width == l.canvas_width);
    for (int i = 0; i < l.size(); ++i) {
      const BoundingBox& a = l.components[static_cast<size_t>(i)].box;
      const BoundingBox& b = p.components[static_cast<size_t>(i)].box;
      CHECK(b.w == a.w);
      CHECK(b.h == a.h);
      CHECK(std::abs(b.x - a.x) <= kPerturbRange + 1e-12);
      CHECK(std::abs(b.y - a.y) <= kPerturbRange + 1e-12);
      CHECK(is_valid(b));
    }
  }
}

TEST_CASE("refine loss closed forms") {
  const Layout a = sample_layout();
  CHECK(refine_loss(a, a) == 0.0);
  Layout b = a;
  b.components[2].box.x += 0.01;
  b.components[0].box.h -= 0.01;
  CHECK(refine_loss(a, b) == doctest::Approx(0.02));
  CHECK(refine_loss(b, a) == refine_loss(a, b));
  Layout shorter = a;
  shorter.components.pop_back();
  CHECK_THROWS((void)refine_loss(a, shorter));
}

TEST_CASE("an untrained refiner is the identity") {
  const Refiner r(7, {16, 32, 8, 2}, 1);
  for (const Layout& l : data::synth_generate(20, 2, data::Grammar::BannerAd)) {
    const Layout out = r.refine(graph_from_layout(l), l);
    REQUIRE(out.size() == l.size());
    CHECK(out.categories() == l.categories());
    CHECK(refine_loss(out, l) < 1e-5);
  }
}

TEST_CASE("refine rejects mismatched graphs") {
  const Refiner r(7, {16, 32, 8, 2}, 1);
  const Layout l = sample_layout();
  CHECK_THROWS_AS((void)r.refine(LayoutGraph({1, 2}), l), ValidationError);
  CHECK_THROWS_AS((void)r.refine(LayoutGraph({1, 2, 4}), l), ValidationError);
}

TEST_CASE("training moves perturbed layouts toward the clean ones") {
  const auto layouts = data::synth_generate(32, 4, data::Grammar::MobileUi);
  std::vector<LayoutGraph> graphs;
  for (const auto& l : layouts) graphs.push_back(graph_from_layout(l));
  std::vector<TrainingExample> batch;
  for (size_t k = 0; k < layouts.size(); ++k) batch.push_back({&layouts[k], &graphs[k]});
  Refiner r(7, {16, 32, 8, 2}, 2);
  nn::Adam<float> opt(1e-3f, 0.9f, 0.999f);
  std::mt19937_64 rng(0);
  double first = 0.0, last = 0.0;
  for (int step = 0; step < 60; ++step) {
    const double loss = r.train_step(batch, opt, rng);
    REQUIRE(std::isfinite(loss));
    if (step < 3) first += loss;
    if (step >= 57) last += loss;
  }
  CHECK(last < first);
}
