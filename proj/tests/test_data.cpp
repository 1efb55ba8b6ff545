#include <doctest.h>

#include <filesystem>
#include <set>

#include "ndn/core/io.hpp"
#include "ndn/data/data.hpp"
#include "ndn/eval/eval.hpp"
#include "support/tempdir.hpp"

using namespace ndn;
namespace fs = std::filesystem;

TEST_CASE("synthetic corpora validate and are deterministic") {
  const CategoryTable t = CategoryTable::standard();
  for (auto grammar : {data::Grammar::MobileUi, data::Grammar::BannerAd}) {
    const auto a = data::synth_generate(100, 4, grammar);
    REQUIRE(a.size() == 100);
    for (const Layout& l : a) CHECK_NOTHROW(validate(l, t));
    CHECK(a == data::synth_generate(100, 4, grammar));
    CHECK_FALSE(a == data::synth_generate(100, 5, grammar));
  }
}

TEST_CASE("synthetic layouts are consistent with their own graphs") {
  for (auto grammar : {data::Grammar::MobileUi, data::Grammar::BannerAd}) {
    for (const Layout& l : data::synth_generate(300, 1, grammar)) {
      REQUIRE(check_consistency(graph_from_layout(l), l) == 1.0);
    }
  }
}

TEST_CASE("mobile-ui toolbars sit above every list item") {
  const CategoryTable t = CategoryTable::standard();
  const CategoryId toolbar = t.id("toolbar"), item = t.id("list-item");
  int pairs = 0;
  for (const Layout& l : data::synth_generate(500, 2, data::Grammar::MobileUi)) {
    for (const auto& a : l.components) {
      if (a.category != toolbar) continue;
      for (const auto& b : l.components) {
        if (b.category != item) continue;
        ++pairs;
        REQUIRE(extract_location_relation(a.box, b.box) == LocationRelation::Above);
      }
    }
  }
  CHECK(pairs > 500);
}

TEST_CASE("mobile-ui mixes lists with grids and both button styles") {
  const CategoryTable t = CategoryTable::standard();
  const CategoryId item = t.id("list-item"), button = t.id("button");
  int grids = 0, lists = 0, centered = 0, right = 0;
  for (const Layout& l : data::synth_generate(400, 4, data::Grammar::MobileUi)) {
    std::vector<BoundingBox> items;
    for (const auto& c : l.components) {
      if (c.category == item) items.push_back(c.box);
      if (c.category == button) {
        const auto where = extract_canvas_relation(c.box);
        centered += where == LocationRelation::BottomCenter;
        right += where == LocationRelation::BottomRight;
      }
    }
    REQUIRE(items.size() >= 2);
    const auto rel = extract_location_relation(items[0], items[1]);
    grids += rel == LocationRelation::LeftOf;
    lists += rel == LocationRelation::Above;
  }
  CHECK(grids + lists == 400);
  CHECK(grids > 150);
  CHECK(lists > 150);
  CHECK(centered > 100);
  CHECK(right > 60);
}

TEST_CASE("grammar names parse") {
  CHECK(data::parse_grammar("mobile-ui") == data::Grammar::MobileUi);
  CHECK(data::parse_grammar("banner-ad") == data::Grammar::BannerAd);
  CHECK_FALSE(data::parse_grammar("magazine").has_value());
  CHECK(data::to_string(data::Grammar::BannerAd) == "banner-ad");
}

TEST_CASE("corpus files round-trip through the manifest") {
  testing::TempDir dir;
  const auto layouts = data::synth_generate(12, 0, data::Grammar::MobileUi);
  data::DatasetManifest m;
  m.seed = 9;
  m.grammar = "mobile-ui";
  m.count = 12;
  data::write_corpus(dir.path(), layouts, m);
  const auto read = data::read_manifest(dir.path());
  CHECK(read.seed == 9);
  CHECK(read.grammar == "mobile-ui");
  const auto loaded = data::load_dataset(read);
  CHECK(loaded.layouts == layouts);
  CHECK(loaded.skipped.empty());
}

TEST_CASE("synth writes byte-identical corpora for the same seed") {
  testing::TempDir a, b;
  data::DatasetManifest m;
  data::write_corpus(a.path(), data::synth_generate(5, 3, data::Grammar::BannerAd), m);
  data::write_corpus(b.path(), data::synth_generate(5, 3, data::Grammar::BannerAd), m);
  for (const auto& entry : fs::directory_iterator(a.path())) {
    CHECK(read_text_file(entry.path().string()) == read_text_file((b.path() / entry.path().filename()).string()));
  }
}

TEST_CASE("load_dataset skips malformed files and rejects empty roots") {
  testing::TempDir dir;
  data::DatasetManifest m;
  m.root = dir.path();
  CHECK_THROWS_AS((void)data::load_dataset(m), ValidationError);
  const auto one = data::synth_generate(1, 0, data::Grammar::MobileUi);
  write_text_file((dir.path() / "a.json").string(), serialize_layout(one[0], m.categories));
  write_text_file((dir.path() / "b.json").string(), "{\"canvas_px\": [1, 1], \"components\": 7}");
  const auto loaded = data::load_dataset(m);
  CHECK(loaded.layouts.size() == 1);
  REQUIRE(loaded.skipped.size() == 1);
  CHECK(loaded.skipped[0].file.find("b.json") != std::string::npos);
  m.root = dir.path() / "missing";
  CHECK_THROWS_AS((void)data::load_dataset(m), ValidationError);
}

TEST_CASE("load_dataset skips layouts above the component limit") {
  testing::TempDir dir;
  data::DatasetManifest m;
  m.root = dir.path();
  m.max_components = 2;
  Layout big{10, 10, {}};
  for (int i = 0; i < 3; ++i) big.components.push_back({1, {0.1 * i, 0.1, 0.05, 0.05}});
  Layout small{10, 10, {{1, {0.1, 0.1, 0.2, 0.2}}}};
  write_text_file((dir.path() / "big.json").string(), serialize_layout(big, m.categories));
  write_text_file((dir.path() / "small.json").string(), serialize_layout(small, m.categories));
  const auto loaded = data::load_dataset(m);
  CHECK(loaded.layouts.size() == 1);
  CHECK(loaded.skipped.size() == 1);
}

TEST_CASE("splits are disjoint, covering and deterministic") {
  const auto s = data::split_indices(1000, {}, 3);
  CHECK(s.train.size() == 800);
  CHECK(s.val.size() == 100);
  CHECK(s.test.size() == 100);
  std::set<int> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 1000);
  const auto again = data::split_indices(1000, {}, 3);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
}

TEST_CASE("load_split keeps one split") {
  testing::TempDir dir;
  data::DatasetManifest m;
  m.seed = 1;
  data::write_corpus(dir.path(), data::synth_generate(20, 0, data::Grammar::MobileUi), m);
  const auto train = data::load_split(dir.path(), data::Split::Train);
  const auto test = data::load_split(dir.path(), data::Split::Test);
  CHECK(train.data.layouts.size() == 16);
  CHECK(test.data.layouts.size() == 2);
  CHECK(data::load_split(dir.path(), data::Split::All).data.layouts.size() == 20);
  CHECK(data::parse_split("val") == data::Split::Val);
}

TEST_CASE("sample_partial drop rates") {
  const auto layouts = data::synth_generate(1, 0, data::Grammar::MobileUi);
  const LayoutGraph g = graph_from_layout(layouts[0]);
  CHECK(data::sample_partial(g, 0.0, 1) == g);
  CHECK(data::sample_partial(g, 1.0, 1).known_edge_count() == 0);
  CHECK(data::sample_partial(g, std::nullopt, 5) == data::sample_partial(g, std::nullopt, 5));
  CHECK_THROWS_AS((void)data::sample_partial(g, 1.5, 1), ValidationError);
}

TEST_CASE("sample_partial at rate 0.5 drops about half of 10k edges") {
  long total = 0, known = 0;
  std::uint64_t seed = 0;
  for (const Layout& l : data::synth_generate(400, 6, data::Grammar::MobileUi)) {
    const LayoutGraph g = graph_from_layout(l);
    total += g.known_edge_count();
    known += data::sample_partial(g, 0.5, seed++).known_edge_count();
    if (total >= 10000) break;
  }
  REQUIRE(total >= 10000);
  const double unknown = 1.0 - static_cast<double>(known) / static_cast<double>(total);
  CHECK(unknown == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("sample_partial respects per-type rates") {
  const auto layouts = data::synth_generate(1, 2, data::Grammar::BannerAd);
  const LayoutGraph g = graph_from_layout(layouts[0]);
  const int n = g.node_count();
  const LayoutGraph p = data::sample_partial(g, data::DropRates{1.0, 0.0, 0.0, 1.0}, 3);
  for (int j = 1; j < n; ++j) {
    CHECK(p.location(0, j) == LocationRelation::Unknown);
    CHECK(p.size(0, j) == g.size(0, j));
  }
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      CHECK(p.location(i, j) == g.location(i, j));
      CHECK(p.size(i, j) == SizeRelation::Unknown);
    }
  }
}

TEST_CASE("negatives keep categories and sizes and misalign") {
  const auto real = data::synth_generate(300, 8, data::Grammar::MobileUi);
  const auto neg = data::make_negatives(real, 1);
  REQUIRE(neg.size() == real.size());
  for (size_t k = 0; k < real.size(); ++k) {
    REQUIRE(neg[k].categories() == real[k].categories());
    for (size_t i = 0; i < real[k].components.size(); ++i) {
      CHECK(neg[k].components[i].box.w == real[k].components[i].box.w);
      CHECK(neg[k].components[i].box.h == real[k].components[i].box.h);
      CHECK(is_valid(neg[k].components[i].box));
    }
  }
  CHECK(neg == data::make_negatives(real, 1));
  CHECK(eval::alignment_score(neg) > eval::alignment_score(real));
}
