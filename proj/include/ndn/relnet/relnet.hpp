#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ndn/core/graph.hpp"
#include "ndn/nn/config.hpp"
#include "ndn/nn/graph.hpp"

namespace ndn::relnet {

using Real = float;
using Matrix = nn::Matrix<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Prediction head columns: component-pair locations, canvas locations, sizes.
// Unknown is never a prediction target.
inline constexpr int kPairColumns = 0;
inline constexpr int kCanvasColumns = kPairLocationCount;
inline constexpr int kSizeColumns = kPairLocationCount + kCanvasLocationCount;
inline constexpr int kLogitColumns = kSizeColumns + 3;

/// Logits for every edge of one graph: rows [0, P) location edges, [P, 2P) size edges.
struct EdgeLogits {
  Matrix values;
  int pairs = 0;
  int nodes = 0;

  /// Column range the row's class lives in.
  [[nodiscard]] std::pair<int, int> class_range(int row) const;
};

struct Encoding {
  Vector mu;
  Vector logvar;
};

struct RelationLoss {
  double total = 0.0;
  double cls = 0.0;
  double kl = 0.0;
};

inline constexpr double kLambdaCls = 1.0;
inline constexpr double kLambdaKl = 0.005;

struct LossWeights {
  double cls = kLambdaCls;
  double kl = kLambdaKl;
};

/// L_rel = 1 * L_cls + 0.005 * L_KL. L_cls is the cross-entropy averaged over all location and
/// size edge rows, each restricted to its sub-vocabulary; L_KL is summed over latent dimensions.
[[nodiscard]] RelationLoss relation_loss(const EdgeLogits& logits, const LayoutGraph& target, const Vector& mu,
                                         const Vector& logvar, const LossWeights& weights = {});

enum class CompletionMode { Sample, Argmax };

struct TrainingExample {
  const LayoutGraph* complete = nullptr;
  const LayoutGraph* partial = nullptr;
};

// Partial-graph -> complete-graph translator. g_c encodes a complete graph
// into a Gaussian latent; g_p reads the partial graph with z appended to
// every node; a three-layer head scores every edge.
class RelationPredictor {
 public:
  RelationPredictor(int categories, nn::NetConfig config, std::uint64_t seed);

  [[nodiscard]] Encoding encode_complete(const LayoutGraph& graph) const;
  [[nodiscard]] EdgeLogits predict_edges(const LayoutGraph& partial, const Vector& z) const;
  /// Unknown edges take the highest-scoring class (lowest index on ties); known edges are copied.
  [[nodiscard]] LayoutGraph complete_graph(const LayoutGraph& partial, CompletionMode mode, std::uint64_t seed) const;

  /// One optimizer step on a batch; returns the batch-mean loss terms.
  RelationLoss train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer, std::mt19937_64& rng);

  [[nodiscard]] nn::ParamStore<Real>& params() { return store_; }
  [[nodiscard]] const nn::ParamStore<Real>& params() const { return store_; }
  [[nodiscard]] const nn::NetConfig& config() const { return config_; }
  [[nodiscard]] int categories() const { return categories_; }
  [[nodiscard]] bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }
  void set_loss_weights(const LossWeights& w) { weights_ = w; }
  [[nodiscard]] const LossWeights& loss_weights() const { return weights_; }

 private:
  std::pair<nn::Var<Real>, nn::Var<Real>> encode(nn::Tape<Real>& tape, const nn::EncodedGraph& complete) const;
  nn::Var<Real> logits(nn::Tape<Real>& tape, const nn::EncodedGraph& partial, nn::Var<Real> z_per_graph) const;

  int categories_;
  nn::NetConfig config_;
  nn::ParamStore<Real> store_;
  nn::GraphEmbedding<Real> enc_embed_;
  nn::GraphConvStack<Real> enc_gnn_;
  nn::Linear<Real> enc_mu_;
  nn::Linear<Real> enc_logvar_;
  nn::GraphEmbedding<Real> pred_embed_;
  nn::GraphConvStack<Real> pred_gnn_;
  nn::Mlp<Real> head_;
  LossWeights weights_;
  bool trained_ = false;
};

}  // namespace ndn::relnet
