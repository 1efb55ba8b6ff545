#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "ndn/boxgen/boxgen.hpp"
#include "ndn/eval/eval.hpp"
#include "ndn/harness/config.hpp"
#include "ndn/refine/refine.hpp"
#include "ndn/relnet/relnet.hpp"

namespace ndn::harness {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The four networks plus everything needed to run them.
struct ModelBundle {
  CategoryTable categories;
  TrainingConfig config;
  std::unique_ptr<relnet::RelationPredictor> relnet;
  std::unique_ptr<boxgen::LayoutGenerator> boxgen;
  std::unique_ptr<refine::Refiner> refiner;
  std::unique_ptr<eval::LayoutClassifier> classifier;
  nlohmann::json reports = nlohmann::json::object();
  std::string hash;  // content hash of the saved or loaded checkpoint

  /// Freshly initialized, untrained networks.
  static ModelBundle create(const CategoryTable& categories, const TrainingConfig& config);
};

// Layout on disk: <dir>/manifest.json (version, category table, configs,
// tensor table, hash) and <dir>/params.bin (float32 tensors back to back,
// little-endian, in tensor-table order). The hash is FNV-1a over the
// manifest without its "hash" member followed by params.bin.

/// Writes the checkpoint and returns its hash (also stored in `bundle.hash`).
std::string save_checkpoint(ModelBundle& bundle, const std::filesystem::path& dir);
/// Throws CheckpointError on a missing file, unsupported version, shape mismatch or hash mismatch.
[[nodiscard]] ModelBundle load_checkpoint(const std::filesystem::path& dir);

}  // namespace ndn::harness
