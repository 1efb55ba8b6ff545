#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndn/core/graph.hpp"
#include "ndn/core/types.hpp"

namespace ndn::data {

enum class Grammar { MobileUi, BannerAd };

[[nodiscard]] std::string_view to_string(Grammar g);
[[nodiscard]] std::optional<Grammar> parse_grammar(std::string_view name);

// Procedural corpora standing in for mobile screens and display ads.
//
// mobile-ui: optional full-width toolbar at the top, 2-5 equal-height list
// items sharing a left edge stacked below it, optional centered button at
// the bottom. banner-ad: image region, corner logo, text block and a button
// under the text, in one of two arrangements. Positional jitter is at most
// 0.01 and the size bands keep every size relation away from the equal band.
//
// Both grammars use CategoryTable::standard().
[[nodiscard]] std::vector<Layout> synth_generate(int n, std::uint64_t seed, Grammar grammar);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetManifest {
  std::filesystem::path root;
  SplitFractions splits;
  CategoryTable categories = CategoryTable::standard();
  int max_components = 10;
  std::uint64_t seed = 0;
  std::string grammar;  // empty for ingested data
  int count = 0;
};

inline constexpr const char* kManifestFile = "manifest.json";

[[nodiscard]] nlohmann::json manifest_to_json(const DatasetManifest& m);
/// `root` is set to the manifest's directory.
[[nodiscard]] DatasetManifest read_manifest(const std::filesystem::path& dir);

/// Writes layout_NNNNN.json files and manifest.json into `dir` (created if missing).
void write_corpus(const std::filesystem::path& dir, const std::vector<Layout>& layouts, DatasetManifest manifest);

struct SkippedFile {
  std::string file;
  std::string reason;
};

struct LoadedDataset {
  std::vector<Layout> layouts;
  std::vector<std::string> files;  // parallel to layouts
  std::vector<SkippedFile> skipped;
};

/// Loads every *.json under manifest.root except the manifest itself, in file-name order.
/// Invalid files and layouts above max_components are skipped and reported.
/// Throws ValidationError when the root is unreadable or nothing valid remains.
[[nodiscard]] LoadedDataset load_dataset(const DatasetManifest& manifest);

struct Splits {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

/// Seeded shuffle cut by the fractions; disjoint and covering [0, n).
[[nodiscard]] Splits split_indices(int n, const SplitFractions& fractions, std::uint64_t seed);

enum class Split { Train, Val, Test, All };

[[nodiscard]] std::optional<Split> parse_split(std::string_view name);

struct SplitDataset {
  DatasetManifest manifest;
  LoadedDataset data;  // only the requested split
};

/// Loads `dir` (manifest optional; defaults otherwise) and keeps one split.
[[nodiscard]] SplitDataset load_split(const std::filesystem::path& dir, Split which);

inline constexpr double kMinDropRate = 0.2;
inline constexpr double kMaxDropRate = 0.9;

/// Per-edge-type drop probabilities for the constraint ablation.
struct DropRates {
  double location_canvas = 0.0;
  double location_pair = 0.0;
  double size_canvas = 0.0;
  double size_pair = 0.0;
};

/// Every edge becomes unknown independently with probability `rate`; without
/// a rate one is drawn from U(0.2, 0.9) using the same seed.
[[nodiscard]] LayoutGraph sample_partial(const LayoutGraph& graph, std::optional<double> rate, std::uint64_t seed);
[[nodiscard]] LayoutGraph sample_partial(const LayoutGraph& graph, const DropRates& rates, std::uint64_t seed);

/// Each component moved to a uniformly random on-canvas position; sizes kept.
[[nodiscard]] std::vector<Layout> make_negatives(const std::vector<Layout>& layouts, std::uint64_t seed);

}  // namespace ndn::data
