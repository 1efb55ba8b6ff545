#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ndn/boxgen/boxgen.hpp"
#include "ndn/eval/eval.hpp"

namespace ndn::eval {

double alignment_contribution(const Layout& layout) {
  const auto& c = layout.components;
  double total = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    double best = INFINITY;
    for (size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      const BoundingBox& a = c[i].box;
      const BoundingBox& b = c[j].box;
      best = std::min({best, std::abs(a.x - b.x), std::abs(a.center_x() - b.center_x()), std::abs(a.right() - b.right())});
    }
    if (c.size() > 1) total += best;
  }
  return total;
}

double alignment_score(std::span<const Layout> layouts) {
  if (layouts.empty()) throw std::invalid_argument("alignment_score: no layouts");
  double sum = 0.0;
  for (const Layout& l : layouts) sum += alignment_contribution(l);
  return sum / static_cast<double>(layouts.size());
}

namespace {

constexpr double kCovarianceEpsilon = 1e-6;

// Trace of the square root of a symmetric positive semi-definite matrix.
double trace_sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  double t = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) t += std::sqrt(std::max(0.0, es.eigenvalues()[k]));
  return t;
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a, const Eigen::VectorXd& mu_b,
                        const Eigen::MatrixXd& cov_b) {
  const Eigen::Index d = mu_a.size();
  if (mu_b.size() != d || cov_a.rows() != d || cov_a.cols() != d || cov_b.rows() != d || cov_b.cols() != d) {
    throw std::invalid_argument("frechet_distance: dimension mismatch");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d) * kCovarianceEpsilon;
  const Eigen::MatrixXd a = cov_a + eye;
  const Eigen::MatrixXd b = cov_b + eye;
  // Tr sqrt(A B) = Tr sqrt(sqrt(A) B sqrt(A)), and the latter is symmetric.
  const Eigen::MatrixXd ra = sqrt_psd(a);
  const double cross = trace_sqrt_psd(ra * b * ra);
  const double value = (mu_a - mu_b).squaredNorm() + a.trace() + b.trace() - 2.0 * cross;
  return std::max(0.0, value);
}

double fid(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b) {
  if (features_a.cols() != features_b.cols()) throw std::invalid_argument("fid: feature dimensions differ");
  if (features_a.rows() < 2 || features_b.rows() < 2) throw std::invalid_argument("fid: need at least 2 samples per side");
  auto fit = [](const Eigen::MatrixXd& f) {
    const Eigen::VectorXd mu = f.colwise().mean().transpose();
    const Eigen::MatrixXd centered = f.rowwise() - mu.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(f.rows() - 1);
    return std::pair{mu, cov};
  };
  const auto [mu_a, cov_a] = fit(features_a);
  const auto [mu_b, cov_b] = fit(features_b);
  return frechet_distance(mu_a, cov_a, mu_b, cov_b);
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["fid"] = r.fid ? nlohmann::json(*r.fid) : nlohmann::json(nullptr);
  j["alignment"] = r.alignment;
  j["consistency"] = r.consistency;
  j["pred_error"] = r.pred_error ? nlohmann::json(*r.pred_error) : nlohmann::json(nullptr);
  j["samples"] = r.samples;
  j["references"] = r.references;
  j["classifier_hash"] = r.classifier_hash;
  j["config"] = r.config;
  return j;
}

MetricsReport evaluate_generation(const EvaluationInput& in, const LayoutClassifier* classifier, bool want_fid) {
  if (want_fid && classifier == nullptr) throw PreconditionError("evaluate_generation: FID needs a trained classifier");
  if (in.generated.empty()) throw std::invalid_argument("evaluate_generation: no generated layouts");
  if (!in.constraints.empty() && in.constraints.size() != in.generated.size()) {
    throw std::invalid_argument("evaluate_generation: one constraint graph per generated layout is required");
  }
  if (in.loo_predicted.size() != in.loo_truth.size()) {
    throw std::invalid_argument("evaluate_generation: leave-one-out predictions and truth differ in length");
  }
  MetricsReport r;
  r.samples = static_cast<int>(in.generated.size());
  r.references = static_cast<int>(in.references.size());
  r.alignment = alignment_score(in.generated);
  if (!in.constraints.empty()) {
    double sum = 0.0;
    for (size_t k = 0; k < in.generated.size(); ++k) sum += check_consistency(in.constraints[k], in.generated[k]);
    r.consistency = sum / static_cast<double>(in.generated.size());
  }
  if (!in.loo_truth.empty()) {
    double sum = 0.0;
    for (size_t k = 0; k < in.loo_truth.size(); ++k) sum += boxgen::box_l1(in.loo_predicted[k], in.loo_truth[k]);
    r.pred_error = sum / static_cast<double>(in.loo_truth.size());
  }
  if (want_fid) {
    r.fid = fid(classifier->features(in.references), classifier->features(in.generated));
    r.classifier_hash = classifier->content_hash();
  }
  return r;
}

}  // namespace ndn::eval
