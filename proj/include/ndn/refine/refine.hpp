#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "ndn/core/graph.hpp"
#include "ndn/nn/config.hpp"
#include "ndn/nn/graph.hpp"

namespace ndn::refine {

using Real = float;

inline constexpr double kPerturbRange = 0.05;

/// Adds independent U(-0.05, 0.05) offsets to every component's x and y, then clamps on-canvas.
[[nodiscard]] Layout perturb(const Layout& layout, std::uint64_t seed);

/// Sum of per-coordinate absolute differences over all components.
[[nodiscard]] double refine_loss(const Layout& pred, const Layout& gt);

struct TrainingExample {
  const Layout* clean = nullptr;
  const LayoutGraph* graph = nullptr;
};

// g_ft: graph convolutions over the complete graph whose node features are
// the category embedding and the current box; a linear head emits a box
// delta per node. The head starts at zero, so an untrained refiner is the
// identity.
class Refiner {
 public:
  Refiner(int categories, nn::NetConfig config, std::uint64_t seed);

  [[nodiscard]] Layout refine(const LayoutGraph& graph, const Layout& layout) const;

  /// Perturbs each clean layout with a seed from `rng` and regresses the clean boxes.
  double train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer, std::mt19937_64& rng);

  [[nodiscard]] nn::ParamStore<Real>& params() { return store_; }
  [[nodiscard]] const nn::ParamStore<Real>& params() const { return store_; }
  [[nodiscard]] const nn::NetConfig& config() const { return config_; }
  [[nodiscard]] int categories() const { return categories_; }
  [[nodiscard]] bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

 private:
  nn::Var<Real> forward(nn::Tape<Real>& tape, const nn::EncodedGraph& graph, const nn::Matrix<Real>& boxes) const;

  int categories_;
  nn::NetConfig config_;
  nn::ParamStore<Real> store_;
  nn::GraphEmbedding<Real> embed_;
  nn::GraphConvStack<Real> g_ft_;
  nn::Linear<Real> head_;
  bool trained_ = false;
};

}  // namespace ndn::refine
