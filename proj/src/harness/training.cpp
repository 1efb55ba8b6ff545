#include "ndn/harness/training.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ndn/core/io.hpp"
#include "ndn/data/data.hpp"

namespace ndn::harness {

namespace {

// Walks shuffled epochs so every layout is visited once per epoch.
class BatchSampler {
 public:
  BatchSampler(size_t n, std::mt19937_64& rng) : order_(n), rng_(rng) {
    std::iota(order_.begin(), order_.end(), size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<size_t> next(int batch) {
    std::vector<size_t> out;
    for (int b = 0; b < batch; ++b) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<size_t> order_;
  std::mt19937_64& rng_;
  size_t pos_ = 0;
};

class CurveLogger {
 public:
  CurveLogger(std::string module, std::vector<std::string> columns, int steps, int every, const ProgressFn& progress)
      : module_(std::move(module)), steps_(steps), every_(every), progress_(progress) {
    curve_.columns = std::move(columns);
  }

  void record(int step, std::vector<double> values) {
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw DivergenceError(module_ + ": loss became non-finite at step " + std::to_string(step));
      }
    }
    if (step % every_ == 0 || step == steps_ - 1) {
      if (progress_) progress_(module_, step, values.front());
      curve_.rows.push_back({step, std::move(values)});
    }
  }

  LossCurve take() { return std::move(curve_); }

 private:
  std::string module_;
  int steps_;
  int every_;
  const ProgressFn& progress_;
  LossCurve curve_;
};

nn::Adam<float> make_adam(const TrainingConfig& c) {
  return nn::Adam<float>(static_cast<float>(c.lr), static_cast<float>(c.beta1), static_cast<float>(c.beta2));
}

}  // namespace

TrainingResult train_all(const TrainingConfig& config, const CategoryTable& categories, std::span<const Layout> layouts,
                         const ProgressFn& progress) {
  config.validate();
  if (static_cast<int>(layouts.size()) < kMinTrainingLayouts) {
    throw ValidationError("train: at least " + std::to_string(kMinTrainingLayouts) + " layouts are required, got " +
                          std::to_string(layouts.size()));
  }
  for (const Layout& l : layouts) validate(l, categories);

  TrainingResult result{ModelBundle::create(categories, config), {}};
  ModelBundle& b = result.bundle;
  std::vector<LayoutGraph> graphs;
  graphs.reserve(layouts.size());
  for (const Layout& l : layouts) graphs.push_back(graph_from_layout(l));

  std::vector<double> frequency(static_cast<size_t>(categories.size()), 0.0);
  for (const Layout& l : layouts) {
    for (const Component& c : l.components) frequency[static_cast<size_t>(c.category)] += 1.0;
  }
  b.boxgen->set_category_frequency(frequency);

  std::mt19937_64 seeds(config.seed ^ 0x5eedf00dULL);

  {
    std::mt19937_64 rng(seeds());
    BatchSampler sampler(layouts.size(), rng);
    auto opt = make_adam(config);
    CurveLogger log("relnet", {"total", "cls", "kl"}, config.relnet.steps, config.log_every, progress);
    for (int step = 0; step < config.relnet.steps; ++step) {
      const auto idx = sampler.next(config.relnet.batch);
      std::vector<LayoutGraph> partial;
      partial.reserve(idx.size());
      for (size_t i : idx) partial.push_back(data::sample_partial(graphs[i], std::nullopt, rng()));
      std::vector<relnet::TrainingExample> batch;
      for (size_t k = 0; k < idx.size(); ++k) batch.push_back({&graphs[idx[k]], &partial[k]});
      const auto loss = b.relnet->train_step(batch, opt, rng);
      log.record(step, {loss.total, loss.cls, loss.kl});
    }
    b.relnet->mark_trained();
    result.curves["relnet"] = log.take();
  }

  {
    std::mt19937_64 rng(seeds());
    BatchSampler sampler(layouts.size(), rng);
    auto opt = make_adam(config);
    CurveLogger log("boxgen", {"total", "recon", "kl", "size_recon"}, config.boxgen.steps, config.log_every, progress);
    for (int step = 0; step < config.boxgen.steps; ++step) {
      std::vector<boxgen::TrainingExample> batch;
      for (size_t i : sampler.next(config.boxgen.batch)) batch.push_back({&layouts[i], &graphs[i]});
      const auto loss = b.boxgen->train_step(batch, opt, rng);
      log.record(step, {loss.total, loss.recon, loss.kl, loss.size_recon});
    }
    b.boxgen->mark_trained();
    result.curves["boxgen"] = log.take();
  }

  {
    std::mt19937_64 rng(seeds());
    BatchSampler sampler(layouts.size(), rng);
    auto opt = make_adam(config);
    CurveLogger log("refine", {"total"}, config.refine.steps, config.log_every, progress);
    for (int step = 0; step < config.refine.steps; ++step) {
      std::vector<refine::TrainingExample> batch;
      for (size_t i : sampler.next(config.refine.batch)) batch.push_back({&layouts[i], &graphs[i]});
      log.record(step, {b.refiner->train_step(batch, opt, rng)});
    }
    b.refiner->mark_trained();
    result.curves["refine"] = log.take();
  }

  const std::uint64_t classifier_seed = seeds();
  if (config.train_classifier) {
    const std::vector<Layout> real(layouts.begin(), layouts.end());
    const std::vector<Layout> negatives = data::make_negatives(real, classifier_seed);
    eval::ClassifierConfig cc;
    cc.net = config.net;
    cc.feature_dim = config.classifier_feature_dim;
    cc.steps = config.classifier.steps;
    cc.batch = config.classifier.batch;
    cc.lr = config.lr;
    cc.seed = classifier_seed;
    CurveLogger log("classifier", {"total"}, cc.steps, config.log_every, progress);
    auto trained = eval::train_classifier(real, negatives, cc, categories.size(),
                                          [&](int step, double loss) { log.record(step, {loss}); });
    trained.model.mark_trained();
    b.classifier = std::make_unique<eval::LayoutClassifier>(std::move(trained.model));
    b.reports["classifier"] = {{"train_accuracy", trained.report.train_accuracy},
                               {"heldout_accuracy", trained.report.heldout_accuracy},
                               {"final_loss", trained.report.final_loss},
                               {"steps", trained.report.steps}};
    result.curves["classifier"] = log.take();
  }
  b.reports["training"] = {{"layouts", layouts.size()}};
  return result;
}

void write_loss_curves(const std::map<std::string, LossCurve>& curves, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [module, curve] : curves) {
    std::ostringstream csv;
    csv.precision(9);
    csv << "step";
    for (const auto& c : curve.columns) csv << ',' << c;
    csv << '\n';
    for (const LossRow& row : curve.rows) {
      csv << row.step;
      for (double v : row.values) csv << ',' << v;
      csv << '\n';
    }
    write_text_file((dir / ("loss_" + module + ".csv")).string(), csv.str());
  }
}

}  // namespace ndn::harness
