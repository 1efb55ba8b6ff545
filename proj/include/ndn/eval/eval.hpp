#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "ndn/core/graph.hpp"
#include "ndn/nn/config.hpp"
#include "ndn/nn/graph.hpp"

namespace ndn::eval {

/// Mean over layouts of sum_i min_{j != i} min(|left|, |center-x|, |right| differences).
/// Single-component layouts contribute 0.
[[nodiscard]] double alignment_score(std::span<const Layout> layouts);
[[nodiscard]] double alignment_contribution(const Layout& layout);

/// Frechet distance between two Gaussians. 1e-6 I is added to both covariances.
[[nodiscard]] double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a,
                                      const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& cov_b);
/// FID between the Gaussian fits of two feature sets (rows are samples, N - 1 normalization).
[[nodiscard]] double fid(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b);

struct ClassifierConfig {
  nn::NetConfig net;
  int feature_dim = 128;
  int steps = 1500;
  int batch = 64;
  double lr = 1e-4;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
};

// Good/bad layout discriminator. Four graph convolutions over the layout's
// relation graph (node features: category embedding and box), mean pooling,
// then three fully connected layers; the second-to-last one is the feature tap.
class LayoutClassifier {
 public:
  static constexpr int kGraphLayers = 4;

  LayoutClassifier(int categories, nn::NetConfig net, int feature_dim, std::uint64_t seed);

  /// [N, feature_dim] feature-tap activations.
  [[nodiscard]] Eigen::MatrixXd features(std::span<const Layout> layouts) const;
  /// Probability of "good" per layout.
  [[nodiscard]] std::vector<double> probability(std::span<const Layout> layouts) const;
  [[nodiscard]] double accuracy(std::span<const Layout> good, std::span<const Layout> bad) const;

  double train_step(std::span<const Layout* const> layouts, std::span<const float> labels,
                    nn::Adam<float>& optimizer);

  [[nodiscard]] nn::ParamStore<float>& params() { return store_; }
  [[nodiscard]] const nn::ParamStore<float>& params() const { return store_; }
  [[nodiscard]] const nn::NetConfig& config() const { return net_; }
  [[nodiscard]] int feature_dim() const { return feature_dim_; }
  [[nodiscard]] int categories() const { return categories_; }
  /// FNV-1a over parameter names and values.
  [[nodiscard]] std::string content_hash() const;
  [[nodiscard]] bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

 private:
  std::vector<nn::Var<float>> forward(nn::Tape<float>& tape, const nn::EncodedGraph& graphs,
                                      const nn::Matrix<float>& boxes) const;
  template <typename Fn>
  void for_chunks(std::span<const Layout> layouts, Fn&& fn) const;

  int categories_;
  nn::NetConfig net_;
  int feature_dim_;
  nn::ParamStore<float> store_;
  nn::GraphEmbedding<float> embed_;
  nn::GraphConvStack<float> gnn_;
  nn::Mlp<float> head_;
  bool trained_ = false;
};

struct ClassifierReport {
  double train_accuracy = 0.0;
  double heldout_accuracy = 0.0;
  double final_loss = 0.0;
  int steps = 0;
};

struct TrainedClassifier {
  LayoutClassifier model;
  ClassifierReport report;
};

/// Trains on (real = 1, negatives = 0) with a held-out split of `val_fraction` from each side.
/// Throws ValidationError when either set is empty.
[[nodiscard]] TrainedClassifier train_classifier(std::span<const Layout> real, std::span<const Layout> negatives,
                                                 const ClassifierConfig& config, int categories,
                                                 const std::function<void(int, double)>& on_step = {});

struct MetricsReport {
  std::optional<double> fid;
  double alignment = 0.0;
  double consistency = 1.0;
  std::optional<double> pred_error;
  int samples = 0;
  int references = 0;
  std::string classifier_hash;
  nlohmann::json config = nlohmann::json::object();
};

[[nodiscard]] nlohmann::json to_json(const MetricsReport& r);

struct EvaluationInput {
  std::vector<Layout> generated;
  /// Constraint graph each generated layout was conditioned on (parallel to `generated`; may be empty).
  std::vector<LayoutGraph> constraints;
  std::vector<Layout> references;
  /// Leave-one-out predictions and their ground truth, when available.
  std::vector<BoundingBox> loo_predicted;
  std::vector<BoundingBox> loo_truth;
};

/// Throws PreconditionError when `want_fid` is set without a classifier.
[[nodiscard]] MetricsReport evaluate_generation(const EvaluationInput& input, const LayoutClassifier* classifier,
                                                bool want_fid);

}  // namespace ndn::eval
