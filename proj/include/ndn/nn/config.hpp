#pragma once

#include <nlohmann/json.hpp>

namespace ndn::nn {

/// Widths shared by the graph networks.
struct NetConfig {
  int embed_dim = 64;
  int hidden_dim = 128;
  int latent_dim = 32;
  int gnn_layers = 3;

  bool operator==(const NetConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const NetConfig& c) {
  j = {{"embed_dim", c.embed_dim}, {"hidden_dim", c.hidden_dim}, {"latent_dim", c.latent_dim},
       {"gnn_layers", c.gnn_layers}};
}

inline void from_json(const nlohmann::json& j, NetConfig& c) {
  c.embed_dim = j.at("embed_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.latent_dim = j.at("latent_dim").get<int>();
  c.gnn_layers = j.at("gnn_layers").get<int>();
}

}  // namespace ndn::nn
