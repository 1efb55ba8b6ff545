#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndn/harness/checkpoint.hpp"

namespace ndn::harness {

inline constexpr int kMinTrainingLayouts = 100;

/// A loss became NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One logged row of a loss curve: step followed by the named terms.
struct LossRow {
  int step = 0;
  std::vector<double> values;
};

struct LossCurve {
  std::vector<std::string> columns;  // names of `values`, "total" first
  std::vector<LossRow> rows;
};

struct TrainingResult {
  ModelBundle bundle;
  std::map<std::string, LossCurve> curves;  // keyed by module: relnet, boxgen, refine, classifier
};

using ProgressFn = std::function<void(const std::string& module, int step, double loss)>;

// Trains relnet, boxgen, refine and (optionally) the classifier one after
// another on the same layouts. Rows are logged at step 0, every log_every
// steps and at the last step. Throws ValidationError for fewer than
// kMinTrainingLayouts layouts and DivergenceError on a non-finite loss.
[[nodiscard]] TrainingResult train_all(const TrainingConfig& config, const CategoryTable& categories,
                                       std::span<const Layout> layouts, const ProgressFn& progress = {});

/// Writes <dir>/loss_<module>.csv for every curve.
void write_loss_curves(const std::map<std::string, LossCurve>& curves, const std::filesystem::path& dir);

}  // namespace ndn::harness
