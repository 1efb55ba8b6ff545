#pragma once

#include "ndn/data/data.hpp"
#include "ndn/harness/training.hpp"

namespace ndn::testing {

// A small config that trains every network for a handful of steps.
inline harness::TrainingConfig toy_config(std::uint64_t seed = 1) {
  harness::TrainingConfig c;
  c.net = {16, 32, 8, 2};
  c.relnet = {20, 16};
  c.boxgen = {20, 16};
  c.refine = {20, 16};
  c.classifier = {20, 16};
  c.classifier_feature_dim = 32;
  c.lr = 1e-3;
  c.log_every = 5;
  c.seed = seed;
  return c;
}

inline const std::vector<Layout>& toy_layouts() {
  static const std::vector<Layout> layouts = data::synth_generate(120, 3, data::Grammar::MobileUi);
  return layouts;
}

/// Trained once per process and shared.
inline harness::TrainingResult& toy_result() {
  static harness::TrainingResult result =
      harness::train_all(toy_config(), CategoryTable::standard(), toy_layouts());
  return result;
}

}  // namespace ndn::testing
