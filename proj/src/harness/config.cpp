#include "ndn/harness/config.hpp"

#include <set>

#include "ndn/core/types.hpp"

namespace ndn::harness {

using nlohmann::json;

namespace {

json stage_json(const StageConfig& s) { return {{"steps", s.steps}, {"batch", s.batch}}; }

StageConfig stage_from(const json& j, StageConfig s) {
  s.steps = j.value("steps", s.steps);
  s.batch = j.value("batch", s.batch);
  return s;
}

}  // namespace

void TrainingConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("training config: " + what); };
  if (!(lr > 0.0)) fail("lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("betas must lie in [0, 1)");
  for (double l : {lambda_cls, lambda_kl1, lambda_recon, lambda_kl2, lambda_size_recon}) {
    if (!(l >= 0.0)) fail("loss weights must be non-negative");
  }
  for (const StageConfig* s : {&relnet, &boxgen, &refine, &classifier}) {
    if (s->steps < 0) fail("steps must be non-negative");
    if (s->batch < 1) fail("batch must be at least 1");
  }
  if (net.embed_dim < 1 || net.hidden_dim < 1 || net.latent_dim < 1 || net.gnn_layers < 1) {
    fail("network widths must be positive");
  }
  if (classifier_feature_dim < 1) fail("classifier_feature_dim must be positive");
  if (log_every < 1) fail("log_every must be at least 1");
}

json to_json(const TrainingConfig& c) {
  return {{"lr", c.lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"reference_batch", c.reference_batch},
          {"lambda_cls", c.lambda_cls},
          {"lambda_kl1", c.lambda_kl1},
          {"lambda_recon", c.lambda_recon},
          {"lambda_kl2", c.lambda_kl2},
          {"lambda_size_recon", c.lambda_size_recon},
          {"relnet", stage_json(c.relnet)},
          {"boxgen", stage_json(c.boxgen)},
          {"refine", stage_json(c.refine)},
          {"classifier", stage_json(c.classifier)},
          {"train_classifier", c.train_classifier},
          {"net", c.net},
          {"classifier_feature_dim", c.classifier_feature_dim},
          {"order", std::string(boxgen::to_string(c.order))},
          {"fixed_size_training", c.fixed_size_training},
          {"seed", c.seed},
          {"log_every", c.log_every}};
}

TrainingConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("training config: expected a JSON object");
  static const std::set<std::string> known{"lr", "beta1", "beta2", "reference_batch", "lambda_cls", "lambda_kl1",
                                           "lambda_recon", "lambda_kl2", "lambda_size_recon", "relnet", "boxgen",
                                           "refine", "classifier", "train_classifier", "net",
                                           "classifier_feature_dim", "order", "fixed_size_training", "seed",
                                           "log_every"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("training config: unknown key \"" + key + "\"");
  }
  TrainingConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.reference_batch = j.value("reference_batch", c.reference_batch);
    c.lambda_cls = j.value("lambda_cls", c.lambda_cls);
    c.lambda_kl1 = j.value("lambda_kl1", c.lambda_kl1);
    c.lambda_recon = j.value("lambda_recon", c.lambda_recon);
    c.lambda_kl2 = j.value("lambda_kl2", c.lambda_kl2);
    c.lambda_size_recon = j.value("lambda_size_recon", c.lambda_size_recon);
    if (j.contains("relnet")) c.relnet = stage_from(j.at("relnet"), c.relnet);
    if (j.contains("boxgen")) c.boxgen = stage_from(j.at("boxgen"), c.boxgen);
    if (j.contains("refine")) c.refine = stage_from(j.at("refine"), c.refine);
    if (j.contains("classifier")) c.classifier = stage_from(j.at("classifier"), c.classifier);
    c.train_classifier = j.value("train_classifier", c.train_classifier);
    if (j.contains("net")) {
      const json& n = j.at("net");
      c.net.embed_dim = n.value("embed_dim", c.net.embed_dim);
      c.net.hidden_dim = n.value("hidden_dim", c.net.hidden_dim);
      c.net.latent_dim = n.value("latent_dim", c.net.latent_dim);
      c.net.gnn_layers = n.value("gnn_layers", c.net.gnn_layers);
    }
    c.classifier_feature_dim = j.value("classifier_feature_dim", c.classifier_feature_dim);
    if (j.contains("order")) {
      const auto order = boxgen::parse_order(j.at("order").get<std::string>());
      if (!order) throw ParseError("training config: order must be random, size or occurrence");
      c.order = *order;
    }
    c.fixed_size_training = j.value("fixed_size_training", c.fixed_size_training);
    c.seed = j.value("seed", c.seed);
    c.log_every = j.value("log_every", c.log_every);
  } catch (const json::exception& e) {
    throw ParseError(std::string("training config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace ndn::harness
