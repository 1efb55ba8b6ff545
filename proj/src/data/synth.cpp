#include <algorithm>
#include <random>

#include "ndn/data/data.hpp"

namespace ndn::data {
namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  double nudge() { return uniform(0.0, 0.01); }

 private:
  std::mt19937_64 rng_;
};

// Pages are either a full-width list or a 2x2 grid of tiles, and the button
// is either a wide centered bar or a small action button on the content's
// right edge. Content shares one side margin, so the clean pages are aligned.
// Toolbar area stays below 0.1 and list items above 0.11, so the two never
// land in the equal band; buttons are far smaller than either.
Layout mobile_ui(Draw& d, const CategoryTable& table) {
  Layout l;
  l.canvas_width = 1080;
  l.canvas_height = 1920;
  const CategoryId toolbar = table.id("toolbar");
  const CategoryId item = table.id("list-item");
  const CategoryId button = table.id("button");

  double top = 0.02;
  if (d.chance(0.8)) {
    const double x = d.uniform(0.0, 0.005);
    const double y = d.uniform(0.0, 0.01);
    const double h = d.uniform(0.06, 0.1);
    l.components.push_back({toolbar, {x, y, 1.0 - x - d.uniform(0.0, 0.005), h}});
    top = y + h;
  }
  const bool has_button = d.chance(0.7);
  const bool action_button = d.chance(0.4);
  const double button_h = action_button ? d.uniform(0.07, 0.09) : d.uniform(0.06, 0.08);
  const double button_w = action_button ? d.uniform(0.14, 0.18) : d.uniform(0.3, 0.4);
  const double button_y = 1.0 - button_h - d.uniform(0.03, 0.05);

  const double margin = d.uniform(0.03, 0.07);
  const double gap = d.uniform(0.01, 0.02);
  const double start = top + d.uniform(0.01, 0.02);
  const double floor_y = (has_button ? button_y : 0.98) - 0.01;
  if (d.chance(0.5)) {
    int items = d.integer(2, 5);
    auto fit_for = [&](int n) { return (floor_y - start - (n - 1) * gap) / n; };
    while (items > 2 && fit_for(items) < 0.135) --items;
    const double h = d.uniform(0.135, std::min(0.16, fit_for(items)));
    for (int k = 0; k < items; ++k) {
      l.components.push_back({item, {margin, start + k * (h + gap), 1.0 - 2.0 * margin, h}});
    }
  } else {
    const double h = d.uniform(0.27, std::min(0.32, (floor_y - start - gap) / 2.0));
    const double w = d.uniform(0.42, std::min(0.44, 0.5 - margin - 0.01));
    for (int k = 0; k < 4; ++k) {
      const double left = k % 2 == 0 ? margin : 1.0 - margin - w;
      l.components.push_back({item, {left, start + (k / 2) * (h + gap), w, h}});
    }
  }
  if (has_button) {
    const double bx = action_button ? 1.0 - margin - button_w : 0.5 - 0.5 * button_w;
    l.components.push_back({button, {bx, button_y, button_w, button_h}});
  }
  return l;
}

Layout banner_ad(Draw& d, const CategoryTable& table) {
  Layout l;
  l.canvas_width = 300;
  l.canvas_height = 250;
  const CategoryId image = table.id("image");
  const CategoryId logo = table.id("logo");
  const CategoryId text = table.id("text");
  const CategoryId button = table.id("button");
  const double logo_w = d.uniform(0.1, 0.12);
  const double logo_h = d.uniform(0.08, 0.1);
  const double button_w = d.uniform(0.22, 0.28);
  const double button_h = d.uniform(0.09, 0.11);

  if (d.chance(0.5)) {
    // Image on the left, copy column on the right, logo top-right.
    const BoundingBox img{0.03 + d.nudge(), d.uniform(0.05, 0.08), d.uniform(0.4, 0.5), d.uniform(0.8, 0.87)};
    const double column = img.right() + 0.05;
    const BoundingBox txt{column, d.uniform(0.25, 0.3), d.uniform(0.33, std::min(0.38, 0.97 - column)), d.uniform(0.18, 0.24)};
    const BoundingBox btn{column + d.nudge(), txt.bottom() + d.uniform(0.04, 0.06), button_w, button_h};
    const BoundingBox lg{0.97 - logo_w, 0.04 + d.nudge(), logo_w, logo_h};
    l.components = {{image, img}, {logo, lg}, {text, txt}, {button, btn}};
  } else {
    // Image across the top, copy below it, logo bottom-right.
    const BoundingBox img{0.03, 0.03 + d.nudge(), 0.94, d.uniform(0.45, 0.5)};
    const BoundingBox txt{0.05 + d.nudge(), img.bottom() + 0.04, d.uniform(0.5, 0.6), d.uniform(0.15, 0.2)};
    const BoundingBox btn{txt.x, txt.bottom() + 0.03, button_w, button_h};
    const BoundingBox lg{0.97 - logo_w, 0.97 - logo_h, logo_w, logo_h};
    l.components = {{image, img}, {text, txt}, {button, btn}, {logo, lg}};
  }
  return l;
}

}  // namespace

std::vector<Layout> synth_generate(int n, std::uint64_t seed, Grammar grammar) {
  if (n < 1) throw ValidationError("synth_generate: n must be at least 1");
  const CategoryTable table = CategoryTable::standard();
  Draw d(seed);
  std::vector<Layout> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.push_back(grammar == Grammar::MobileUi ? mobile_ui(d, table) : banner_ad(d, table));
  }
  return out;
}

}  // namespace ndn::data
