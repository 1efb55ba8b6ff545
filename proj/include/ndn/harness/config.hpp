#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "ndn/boxgen/boxgen.hpp"
#include "ndn/nn/config.hpp"

namespace ndn::harness {

struct StageConfig {
  int steps = 0;
  int batch = 64;
};

// Adam with lr 1e-4 and betas 0.5/0.999. Stages train with batch 64; the
// reference batch of 512 is kept in the config but not used, to keep CPU
// training tractable.
struct TrainingConfig {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int reference_batch = 512;

  double lambda_cls = 1.0;
  double lambda_kl1 = 0.005;
  double lambda_recon = 1.0;
  double lambda_kl2 = 1.0;
  double lambda_size_recon = 10.0;

  StageConfig relnet{1500, 64};
  StageConfig boxgen{2000, 64};
  StageConfig refine{3000, 64};
  StageConfig classifier{1500, 64};
  bool train_classifier = true;

  nn::NetConfig net;
  int classifier_feature_dim = 128;
  boxgen::OrderStrategy order = boxgen::OrderStrategy::Random;
  bool fixed_size_training = true;
  std::uint64_t seed = 0;
  int log_every = 50;

  /// Throws ValidationError on non-positive rates/sizes or negative weights.
  void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const TrainingConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] TrainingConfig config_from_json(const nlohmann::json& j);

}  // namespace ndn::harness
