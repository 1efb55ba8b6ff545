#include "ndn/harness/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "ndn/core/hash.hpp"
#include "ndn/core/io.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoints are written little-endian");

namespace ndn::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kParams = "params.bin";

std::vector<nn::ParamStore<float>*> stores(ModelBundle& b) {
  std::vector<nn::ParamStore<float>*> out{&b.relnet->params(), &b.boxgen->params(), &b.refiner->params()};
  if (b.classifier) out.push_back(&b.classifier->params());
  return out;
}

std::string compute_hash(const json& manifest, const std::string& params) {
  json body = manifest;
  body.erase("hash");
  Fnv1a h;
  h.update(body.dump());
  h.update(params);
  return h.hex();
}

}  // namespace

ModelBundle ModelBundle::create(const CategoryTable& categories, const TrainingConfig& config) {
  config.validate();
  ModelBundle b;
  b.categories = categories;
  b.config = config;
  const int c = categories.size();
  std::mt19937_64 seeds(config.seed);
  b.relnet = std::make_unique<relnet::RelationPredictor>(c, config.net, seeds());
  b.relnet->set_loss_weights({config.lambda_cls, config.lambda_kl1});
  b.boxgen = std::make_unique<boxgen::LayoutGenerator>(c, config.net, seeds());
  b.boxgen->set_loss_weights({config.lambda_recon, config.lambda_kl2, config.lambda_size_recon});
  b.boxgen->set_order_strategy(config.order);
  b.boxgen->set_fixed_size_training(config.fixed_size_training);
  b.refiner = std::make_unique<refine::Refiner>(c, config.net, seeds());
  const std::uint64_t classifier_seed = seeds();
  if (config.train_classifier) {
    b.classifier =
        std::make_unique<eval::LayoutClassifier>(c, config.net, config.classifier_feature_dim, classifier_seed);
  }
  return b;
}

std::string save_checkpoint(ModelBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  std::string params;
  json tensors = json::array();
  for (auto* store : stores(bundle)) {
    for (const auto& p : store->params()) {
      tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
      params.append(reinterpret_cast<const char*>(p->value.data()), static_cast<size_t>(p->value.size()) * sizeof(float));
    }
  }
  json manifest = {
      {"format", "ndn-checkpoint"},
      {"version", kCheckpointVersion},
      {"categories", bundle.categories.names()},
      {"config", to_json(bundle.config)},
      {"trained",
       {{"relnet", bundle.relnet->trained()},
        {"boxgen", bundle.boxgen->trained()},
        {"refine", bundle.refiner->trained()},
        {"classifier", bundle.classifier && bundle.classifier->trained()}}},
      {"has_classifier", bundle.classifier != nullptr},
      {"boxgen_category_frequency", bundle.boxgen->category_frequency()},
      {"reports", bundle.reports},
      {"tensors", tensors},
  };
  manifest["hash"] = compute_hash(manifest, params);
  {
    std::ofstream out(dir / kParams, std::ios::binary | std::ios::trunc);
    out.write(params.data(), static_cast<std::streamsize>(params.size()));
    if (!out) throw CheckpointError("cannot write " + (dir / kParams).string());
  }
  write_text_file((dir / kManifest).string(), manifest.dump(2) + "\n");
  bundle.hash = manifest["hash"].get<std::string>();
  return bundle.hash;
}

ModelBundle load_checkpoint(const fs::path& dir) {
  json manifest;
  std::string params;
  try {
    manifest = json::parse(read_text_file((dir / kManifest).string()));
    std::ifstream in(dir / kParams, std::ios::binary);
    if (!in) throw CheckpointError("cannot read " + (dir / kParams).string());
    params.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint manifest is not valid JSON: " + std::string(e.what()));
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(e.what());
  }

  try {
    if (manifest.value("format", "") != "ndn-checkpoint") throw CheckpointError("not an ndn checkpoint");
    const int version = manifest.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::string stored = manifest.at("hash").get<std::string>();
    const std::string actual = compute_hash(manifest, params);
    if (stored != actual) throw CheckpointError("checkpoint hash mismatch (stored " + stored + ", computed " + actual + ")");

    TrainingConfig config = config_from_json(manifest.at("config"));
    config.train_classifier = manifest.at("has_classifier").get<bool>();
    ModelBundle b =
        ModelBundle::create(CategoryTable(manifest.at("categories").get<std::vector<std::string>>()), config);
    b.boxgen->set_category_frequency(manifest.at("boxgen_category_frequency").get<std::vector<double>>());
    b.reports = manifest.value("reports", json::object());

    size_t offset = 0;
    std::vector<nn::Parameter<float>*> all;
    for (auto* store : stores(b)) {
      for (const auto& p : store->params()) all.push_back(p.get());
    }
    const json& tensors = manifest.at("tensors");
    if (tensors.size() != all.size()) throw CheckpointError("checkpoint tensor count does not match the networks");
    for (size_t k = 0; k < all.size(); ++k) {
      nn::Parameter<float>& p = *all[k];
      const json& t = tensors[k];
      if (t.at("name").get<std::string>() != p.name || t.at("rows").get<Eigen::Index>() != p.value.rows() ||
          t.at("cols").get<Eigen::Index>() != p.value.cols()) {
        throw CheckpointError("checkpoint tensor " + t.at("name").get<std::string>() + " does not match " + p.name);
      }
      const size_t bytes = static_cast<size_t>(p.value.size()) * sizeof(float);
      if (offset + bytes > params.size()) throw CheckpointError("params.bin is truncated");
      std::memcpy(p.value.data(), params.data() + offset, bytes);
      offset += bytes;
    }
    if (offset != params.size()) throw CheckpointError("params.bin has trailing bytes");

    const json& trained = manifest.at("trained");
    if (trained.at("relnet").get<bool>()) b.relnet->mark_trained();
    if (trained.at("boxgen").get<bool>()) b.boxgen->mark_trained();
    if (trained.at("refine").get<bool>()) b.refiner->mark_trained();
    if (b.classifier && trained.at("classifier").get<bool>()) b.classifier->mark_trained();
    b.hash = stored;
    return b;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint manifest: " + std::string(e.what()));
  } catch (const ParseError& e) {
    throw CheckpointError(e.what());
  } catch (const ValidationError& e) {
    throw CheckpointError(e.what());
  }
}

}  // namespace ndn::harness
