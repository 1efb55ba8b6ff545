#include "ndn/data/data.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

#include "ndn/core/io.hpp"

namespace ndn::data {

namespace fs = std::filesystem;

std::string_view to_string(Grammar g) { return g == Grammar::MobileUi ? "mobile-ui" : "banner-ad"; }

std::optional<Grammar> parse_grammar(std::string_view name) {
  if (name == "mobile-ui") return Grammar::MobileUi;
  if (name == "banner-ad") return Grammar::BannerAd;
  return std::nullopt;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  return {{"splits", {{"train", m.splits.train}, {"val", m.splits.val}, {"test", m.splits.test}}},
          {"categories", m.categories.names()},
          {"max_components", m.max_components},
          {"seed", m.seed},
          {"grammar", m.grammar},
          {"count", m.count}};
}

DatasetManifest read_manifest(const fs::path& dir) {
  const fs::path file = dir / kManifestFile;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(file.string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.root = dir;
  try {
    if (j.contains("splits")) {
      const auto& s = j.at("splits");
      m.splits = {s.at("train").get<double>(), s.at("val").get<double>(), s.at("test").get<double>()};
    }
    if (j.contains("categories")) m.categories = CategoryTable(j.at("categories").get<std::vector<std::string>>());
    m.max_components = j.value("max_components", 10);
    m.seed = j.value("seed", std::uint64_t{0});
    m.grammar = j.value("grammar", std::string{});
    m.count = j.value("count", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  const SplitFractions& s = m.splits;
  if (s.train < 0 || s.val < 0 || s.test < 0 || std::abs(s.train + s.val + s.test - 1.0) > 1e-9) {
    throw ValidationError(file.string() + ": split fractions must be non-negative and sum to 1");
  }
  return m;
}

void write_corpus(const fs::path& dir, const std::vector<Layout>& layouts, DatasetManifest manifest) {
  fs::create_directories(dir);
  manifest.count = static_cast<int>(layouts.size());
  for (size_t k = 0; k < layouts.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "layout_%05zu.json", k);
    write_text_file((dir / name).string(), serialize_layout(layouts[k], manifest.categories) + "\n");
  }
  write_text_file((dir / kManifestFile).string(), manifest_to_json(manifest).dump(2) + "\n");
}

LoadedDataset load_dataset(const DatasetManifest& manifest) {
  std::error_code ec;
  if (!fs::is_directory(manifest.root, ec)) {
    throw ValidationError("dataset root " + manifest.root.string() + " is not a readable directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(manifest.root, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != kManifestFile) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw ValidationError("cannot list " + manifest.root.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  LoadedDataset out;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      Layout l = deserialize_layout(read_text_file(path.string()), manifest.categories);
      if (l.size() > manifest.max_components) {
        out.skipped.push_back({name, "more than " + std::to_string(manifest.max_components) + " components"});
        continue;
      }
      out.layouts.push_back(std::move(l));
      out.files.push_back(name);
    } catch (const std::exception& e) {
      out.skipped.push_back({name, e.what()});
    }
  }
  if (out.layouts.empty()) {
    throw ValidationError("dataset " + manifest.root.string() + " has no valid layouts (" +
                          std::to_string(out.skipped.size()) + " skipped)");
  }
  return out;
}

Splits split_indices(int n, const SplitFractions& fractions, std::uint64_t seed) {
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<size_t>(fractions.train * n);
  const auto n_val = std::min(static_cast<size_t>(fractions.val * n), order.size() - n_train);
  Splits s;
  s.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  s.val.assign(order.begin() + static_cast<long>(n_train), order.begin() + static_cast<long>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
  return s;
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  if (name == "all") return Split::All;
  return std::nullopt;
}

SplitDataset load_split(const fs::path& dir, Split which) {
  SplitDataset out;
  if (fs::exists(dir / kManifestFile)) {
    out.manifest = read_manifest(dir);
  } else {
    out.manifest.root = dir;
  }
  LoadedDataset all = load_dataset(out.manifest);
  out.data.skipped = std::move(all.skipped);
  if (which == Split::All) {
    out.data.layouts = std::move(all.layouts);
    out.data.files = std::move(all.files);
    return out;
  }
  const Splits s = split_indices(static_cast<int>(all.layouts.size()), out.manifest.splits, out.manifest.seed);
  const auto& keep = which == Split::Train ? s.train : which == Split::Val ? s.val : s.test;
  for (int i : keep) {
    out.data.layouts.push_back(all.layouts[static_cast<size_t>(i)]);
    out.data.files.push_back(all.files[static_cast<size_t>(i)]);
  }
  return out;
}

LayoutGraph sample_partial(const LayoutGraph& graph, std::optional<double> rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double r = rate ? *rate : std::uniform_real_distribution<double>(kMinDropRate, kMaxDropRate)(rng);
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("sample_partial: rate must lie in [0, 1]");
  return sample_partial(graph, DropRates{r, r, r, r}, rng());
}

LayoutGraph sample_partial(const LayoutGraph& graph, const DropRates& rates, std::uint64_t seed) {
  for (double r : {rates.location_canvas, rates.location_pair, rates.size_canvas, rates.size_pair}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("sample_partial: rates must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LayoutGraph out = graph;
  const int canvas_pairs = graph.node_count() - 1;
  auto& loc = out.location_edges();
  for (size_t p = 0; p < loc.size(); ++p) {
    const double r = static_cast<int>(p) < canvas_pairs ? rates.location_canvas : rates.location_pair;
    if (u(rng) < r) loc[p] = LocationRelation::Unknown;
  }
  auto& size = out.size_edges();
  for (size_t p = 0; p < size.size(); ++p) {
    const double r = static_cast<int>(p) < canvas_pairs ? rates.size_canvas : rates.size_pair;
    if (u(rng) < r) size[p] = SizeRelation::Unknown;
  }
  return out;
}

std::vector<Layout> make_negatives(const std::vector<Layout>& layouts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Layout> out = layouts;
  for (Layout& l : out) {
    for (Component& c : l.components) {
      c.box.x = u(rng) * std::max(0.0, 1.0 - c.box.w);
      c.box.y = u(rng) * std::max(0.0, 1.0 - c.box.h);
    }
  }
  return out;
}

}  // namespace ndn::data
