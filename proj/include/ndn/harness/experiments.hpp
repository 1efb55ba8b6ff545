#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndn/data/data.hpp"
#include "ndn/harness/checkpoint.hpp"

namespace ndn::harness {

struct EvalOptions {
  int trials = 1;
  int samples_per_design = 4;
  int max_designs = 0;  // 0 = every test layout
  bool refine = true;
  bool leave_one_out = true;
  std::uint64_t seed = 0;
};

struct TrialSummary {
  std::vector<eval::MetricsReport> trials;
  eval::MetricsReport mean;  // per-field mean over trials
  std::optional<double> fid_std;
  double alignment_std = 0.0;
  double consistency_std = 0.0;
};

[[nodiscard]] nlohmann::json to_json(const TrialSummary& s);

// Generates `samples_per_design` layouts per test design from its complete
// ground-truth graph and scores them against the test layouts. Each trial
// uses a different generation seed; leave-one-out error is deterministic
// and computed once. FID is included when the checkpoint has a trained classifier.
[[nodiscard]] TrialSummary evaluate_checkpoint(const ModelBundle& bundle, std::span<const Layout> test,
                                               const EvalOptions& options);

/// Percentages of each constraint type kept (unary = canvas edges, binary = component pairs).
struct ConstraintMix {
  int unary_size = 0;
  int binary_size = 0;
  int unary_location = 0;
  int binary_location = 0;
  bool refine = true;
};

/// The rows of the partial-constraint ablation: none, 20% size, 20% location, 20% all (with and without refinement), 100% all (with and without).
[[nodiscard]] std::vector<ConstraintMix> ablation_rows();

struct AblationResult {
  ConstraintMix mix;
  std::optional<double> fid;
  double alignment = 0.0;
  double consistency_to_truth = 0.0;  // against the full ground-truth graph
  double consistency_to_given = 0.0;  // against the constraints actually provided
  [[nodiscard]] double gap() const { return 1.0 - consistency_to_truth; }
};

[[nodiscard]] nlohmann::json to_json(const AblationResult& r);

// Drops each edge type at rate 1 - percent/100, completes with relnet
// (sampled latent), generates and optionally refines, once per design and sample.
[[nodiscard]] AblationResult run_ablation_row(const ModelBundle& bundle, std::span<const Layout> test,
                                              const ConstraintMix& mix, int samples_per_design, std::uint64_t seed);

}  // namespace ndn::harness
