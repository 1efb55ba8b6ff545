#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ndn/core/graph.hpp"
#include "ndn/kernels/graph_kernels.hpp"
#include "ndn/nn/layers.hpp"

namespace ndn::nn {

/// Index structure of one graph or of several graphs batched block-diagonally.
struct GraphTopology {
  int nodes = 0;
  int graphs = 0;
  std::vector<int> src;
  std::vector<int> dst;
  std::vector<int> node_graph;   // graph id of each node
  std::vector<int> node_offset;  // first node of each graph, size graphs + 1
  std::vector<int> edge_offset;  // first edge of each graph, size graphs + 1
  kernels::Incidence incidence;

  [[nodiscard]] int edges() const { return static_cast<int>(src.size()); }
  /// Rebuilds `incidence` from src/dst.
  void finalize();
};

// Relation ids as seen by the embedding tables: location relations keep
// their enum value, size relations are offset by kLocationCount.
inline constexpr int kRelationVocabulary = kLocationCount + kSizeCount;
[[nodiscard]] constexpr int relation_id(LocationRelation r) { return static_cast<int>(r); }
[[nodiscard]] constexpr int relation_id(SizeRelation r) { return kLocationCount + static_cast<int>(r); }

// A LayoutGraph flattened for the networks. Within one graph, edges
// [0, P) are the location edges and [P, 2P) the size edges, both in
// canonical pair order, directed i -> j with i < j.
struct EncodedGraph {
  GraphTopology topo;
  std::vector<int> node_category;
  std::vector<int> edge_relation;
  std::vector<int> pair_count;  // per graph
};

[[nodiscard]] EncodedGraph encode_graph(const LayoutGraph& graph);
/// Concatenates graphs; node and edge indices are shifted per graph.
[[nodiscard]] EncodedGraph batch_graphs(std::span<const EncodedGraph* const> parts);
/// `copies` repetitions of one graph.
[[nodiscard]] EncodedGraph repeat_graph(const EncodedGraph& graph, int copies);

template <typename T>
struct GraphTensor {
  const GraphTopology* topo = nullptr;
  Var<T> nodes;
  Var<T> edges;
};

/// Category and relation lookup tables; unknown relations have their own rows.
template <typename T>
struct GraphEmbedding {
  Embedding<T> category;
  Embedding<T> relation;

  GraphEmbedding() = default;
  GraphEmbedding(ParamStore<T>& store, const std::string& name, int categories, int dim, std::mt19937_64& rng)
      : category(store, name + ".category", categories, dim, rng),
        relation(store, name + ".relation", kRelationVocabulary, dim, rng) {}
};

/// Node rows = category embedding (++ extra row when given); edge rows = relation embedding.
template <typename T>
GraphTensor<T> embed_graph(Tape<T>& tape, const EncodedGraph& graph, const GraphEmbedding<T>& tables,
                           std::optional<Var<T>> extra_node_features = std::nullopt);

// One round of triple-update message passing. For every edge (i, r, j) a
// two-layer perceptron maps [v_i, e_r, v_j] to candidates (v_i', e_r', v_j').
// A node becomes the leaky-rectified mean of its candidates; a node without
// edges takes a learned linear self-update instead. Edges become e_r'.
template <typename T>
class GraphConv {
 public:
  GraphConv() = default;
  GraphConv(ParamStore<T>& store, const std::string& name, int node_in, int edge_in, int hidden, int out,
            std::mt19937_64& rng);
  GraphTensor<T> operator()(const GraphTensor<T>& in) const;
  [[nodiscard]] int out() const { return out_; }

 private:
  Linear<T> message_in_;
  Linear<T> message_out_;
  Linear<T> self_;
  int node_in_ = 0;
  int edge_in_ = 0;
  int out_ = 0;
};

template <typename T>
class GraphConvStack {
 public:
  GraphConvStack() = default;
  GraphConvStack(ParamStore<T>& store, const std::string& name, int node_in, int edge_in, int hidden, int layers,
                 std::mt19937_64& rng);
  GraphTensor<T> operator()(GraphTensor<T> in) const;
  [[nodiscard]] int out() const { return layers_.back().out(); }

 private:
  std::vector<GraphConv<T>> layers_;
};

/// Mean of node rows per graph: graphs x D.
template <typename T>
Var<T> graph_pool(const GraphTensor<T>& gt);

extern template class GraphConv<float>;
extern template class GraphConv<double>;
extern template class GraphConvStack<float>;
extern template class GraphConvStack<double>;

}  // namespace ndn::nn
