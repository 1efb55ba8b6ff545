#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ndn/core/graph.hpp"
#include "ndn/nn/config.hpp"
#include "ndn/nn/graph.hpp"

namespace ndn::boxgen {

using Real = float;
using Matrix = nn::Matrix<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Width of the per-node box slot fed to g_update: x, y, w, h, placed flag.
inline constexpr int kSlotWidth = 5;

inline constexpr double kLambdaRecon = 1.0;
inline constexpr double kLambdaKl = 1.0;
inline constexpr double kLambdaSizeRecon = 10.0;

struct LossWeights {
  double recon = kLambdaRecon;
  double kl = kLambdaKl;
  double size_recon = kLambdaSizeRecon;
};

enum class OrderStrategy { Random, Size, Occurrence };
[[nodiscard]] std::string_view to_string(OrderStrategy s);
[[nodiscard]] std::optional<OrderStrategy> parse_order(std::string_view name);

/// Per-node outputs of g_enc.
struct Features {
  Matrix nodes;  // [n + 1, hidden]
  Matrix edges;  // [2P, hidden]
};

enum class StepMode { Posterior, Prior };

struct BoxSample {
  BoundingBox box;
  Vector mu;
  Vector logvar;
};

struct LayoutLossTerms {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
  double size_recon = 0.0;
};

struct GaussianParams {
  std::vector<Vector> mu;
  std::vector<Vector> logvar;
};

/// L = 1 * sum_i |pred_i - gt_i|_1 + 1 * sum_i KL(q_i || p_i) (+ 10 * sum_i |wh_i - gt wh_i|_1).
/// `size_pred` holds the size-path decodes and is required when fixed_size_mode is set.
[[nodiscard]] LayoutLossTerms layout_loss(std::span<const BoundingBox> pred, std::span<const BoundingBox> gt,
                                          const GaussianParams& posterior, const GaussianParams& prior,
                                          bool fixed_size_mode, std::span<const BoundingBox> size_pred = {},
                                          const LossWeights& weights = {});

struct GenerationRequest {
  LayoutGraph graph;
  std::vector<int> order;                                // node indices 1..n; empty = 1..n
  std::map<int, std::pair<double, double>> fixed_sizes;  // node index -> (w, h)
  int num_samples = 1;
  std::uint64_t seed = 0;
  bool prior_mean = false;  // decode z = mu_prior instead of sampling
  int canvas_width = 0;     // copied into the generated layouts
  int canvas_height = 0;
};

struct TrainingExample {
  const Layout* layout = nullptr;
  const LayoutGraph* graph = nullptr;
};

// Iterative conditional VAE over boxes. g_enc turns the complete relation
// graph into node features once; at every step g_update re-reads the graph
// with each node's feature extended by its box slot, and the row of the
// node being placed is the context c_k. A posterior encoder (box + context),
// a conditional prior (context) and a size-only encoder (w, h + context)
// share one decoder that maps (z, context) to a sigmoid box.
class LayoutGenerator {
 public:
  LayoutGenerator(int categories, nn::NetConfig config, std::uint64_t seed);

  [[nodiscard]] Features encode_features(const LayoutGraph& graph) const;
  /// `placed` has one entry per node; the canvas entry is ignored. `target` must be unplaced.
  [[nodiscard]] Vector update_context(const LayoutGraph& graph, const Features& features,
                                      const std::vector<std::optional<BoundingBox>>& placed, int target) const;
  /// Posterior mode encodes `gt`; prior mode samples the conditional prior.
  [[nodiscard]] BoxSample box_step(const Vector& context, StepMode mode, std::uint64_t seed,
                                   const std::optional<BoundingBox>& gt = std::nullopt) const;
  /// Prior-mean decode of the context.
  [[nodiscard]] BoundingBox decode_prior_mean(const Vector& context) const;

  [[nodiscard]] std::vector<Layout> generate(const GenerationRequest& request) const;
  /// Places one box given every other box of `layout`, decoding z = mu_prior.
  [[nodiscard]] BoundingBox leave_one_out_predict(const Layout& layout, int target_index) const;
  /// Places `targets` (node indices, in order) around the boxes in `placed`; prior-mean when `prior_mean`.
  [[nodiscard]] std::vector<BoundingBox> place(const LayoutGraph& graph,
                                               std::vector<std::optional<BoundingBox>> placed,
                                               const std::vector<int>& targets, bool prior_mean,
                                               std::uint64_t seed) const;

  /// Teacher-forced step over a batch with per-sample orders from the configured strategy.
  LayoutLossTerms train_step(std::span<const TrainingExample> batch, nn::Adam<Real>& optimizer,
                             std::mt19937_64& rng);

  /// Node order (1..n) used by the strategy; random draws from `rng`.
  [[nodiscard]] std::vector<int> order_for(const LayoutGraph& graph, std::mt19937_64& rng) const;
  void set_order_strategy(OrderStrategy s) { order_ = s; }
  [[nodiscard]] OrderStrategy order_strategy() const { return order_; }
  /// Category counts used by the occurrence order (most frequent first).
  void set_category_frequency(std::vector<double> freq) { frequency_ = std::move(freq); }
  [[nodiscard]] const std::vector<double>& category_frequency() const { return frequency_; }
  void set_fixed_size_training(bool on) { size_training_ = on; }
  [[nodiscard]] bool fixed_size_training() const { return size_training_; }
  void set_loss_weights(const LossWeights& w) { weights_ = w; }
  [[nodiscard]] const LossWeights& loss_weights() const { return weights_; }

  [[nodiscard]] nn::ParamStore<Real>& params() { return store_; }
  [[nodiscard]] const nn::ParamStore<Real>& params() const { return store_; }
  [[nodiscard]] const nn::NetConfig& config() const { return config_; }
  [[nodiscard]] int categories() const { return categories_; }
  [[nodiscard]] bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

 private:
  struct Rollout;
  nn::GraphTensor<Real> run_encoder(nn::Tape<Real>& tape, const nn::EncodedGraph& graph) const;
  // Contexts for a batch of (graph copy, slots, target) rows.
  nn::Var<Real> contexts(nn::Tape<Real>& tape, const Rollout& rollout, nn::Var<Real> enc_nodes,
                         nn::Var<Real> enc_edges) const;
  nn::Var<Real> decode(nn::Var<Real> z, nn::Var<Real> context) const;

  int categories_;
  nn::NetConfig config_;
  nn::ParamStore<Real> store_;
  nn::GraphEmbedding<Real> embed_;
  nn::GraphConvStack<Real> g_enc_;
  nn::GraphConvStack<Real> g_update_;
  nn::Mlp<Real> posterior_;
  nn::Mlp<Real> prior_;
  nn::Mlp<Real> size_encoder_;
  nn::Mlp<Real> decoder_;
  OrderStrategy order_ = OrderStrategy::Random;
  std::vector<double> frequency_;
  LossWeights weights_;
  bool size_training_ = true;
  bool trained_ = false;
};

/// Per-category mean training box, the leave-one-out baseline.
class MeanBoxBaseline {
 public:
  explicit MeanBoxBaseline(std::span<const Layout> layouts);
  [[nodiscard]] BoundingBox predict(CategoryId category) const;

 private:
  std::map<CategoryId, BoundingBox> mean_;
  BoundingBox overall_{};
};

/// Mean absolute difference over (x, y, w, h).
[[nodiscard]] double box_l1(const BoundingBox& a, const BoundingBox& b);

}  // namespace ndn::boxgen
