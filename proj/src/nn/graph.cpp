#include "ndn/nn/graph.hpp"

#include <stdexcept>

namespace ndn::nn {

void GraphTopology::finalize() {
  incidence = kernels::Incidence::build(nodes, src, dst);
}

EncodedGraph encode_graph(const LayoutGraph& graph) {
  EncodedGraph g;
  const int n = graph.node_count();
  const int pairs = graph.edge_pair_count();
  g.topo.nodes = n;
  g.topo.graphs = 1;
  g.topo.node_graph.assign(static_cast<size_t>(n), 0);
  g.topo.node_offset = {0, n};
  g.topo.edge_offset = {0, 2 * pairs};
  g.node_category = graph.nodes();
  g.pair_count = {pairs};
  const auto pair_list = canonical_pairs(n);
  g.topo.src.reserve(static_cast<size_t>(2 * pairs));
  g.topo.dst.reserve(static_cast<size_t>(2 * pairs));
  for (int pass = 0; pass < 2; ++pass) {
    for (int p = 0; p < pairs; ++p) {
      g.topo.src.push_back(pair_list[static_cast<size_t>(p)].first);
      g.topo.dst.push_back(pair_list[static_cast<size_t>(p)].second);
      g.edge_relation.push_back(pass == 0 ? relation_id(graph.location_edges()[static_cast<size_t>(p)])
                                          : relation_id(graph.size_edges()[static_cast<size_t>(p)]));
    }
  }
  g.topo.finalize();
  return g;
}

EncodedGraph batch_graphs(std::span<const EncodedGraph* const> parts) {
  EncodedGraph out;
  out.topo.node_offset.push_back(0);
  out.topo.edge_offset.push_back(0);
  for (const EncodedGraph* part : parts) {
    const GraphTopology& t = part->topo;
    const int node_base = out.topo.nodes;
    const int graph_base = out.topo.graphs;
    for (int k = 0; k < t.edges(); ++k) {
      out.topo.src.push_back(t.src[static_cast<size_t>(k)] + node_base);
      out.topo.dst.push_back(t.dst[static_cast<size_t>(k)] + node_base);
    }
    for (int k = 0; k < t.nodes; ++k) out.topo.node_graph.push_back(t.node_graph[static_cast<size_t>(k)] + graph_base);
    for (int g = 1; g <= t.graphs; ++g) {
      out.topo.node_offset.push_back(t.node_offset[static_cast<size_t>(g)] + node_base);
      out.topo.edge_offset.push_back(t.edge_offset[static_cast<size_t>(g)] + out.topo.edge_offset[static_cast<size_t>(graph_base)]);
    }
    out.topo.nodes += t.nodes;
    out.topo.graphs += t.graphs;
    out.node_category.insert(out.node_category.end(), part->node_category.begin(), part->node_category.end());
    out.edge_relation.insert(out.edge_relation.end(), part->edge_relation.begin(), part->edge_relation.end());
    out.pair_count.insert(out.pair_count.end(), part->pair_count.begin(), part->pair_count.end());
  }
  out.topo.finalize();
  return out;
}

EncodedGraph repeat_graph(const EncodedGraph& graph, int copies) {
  std::vector<const EncodedGraph*> parts(static_cast<size_t>(copies), &graph);
  return batch_graphs(parts);
}

template <typename T>
GraphTensor<T> embed_graph(Tape<T>& tape, const EncodedGraph& graph, const GraphEmbedding<T>& tables,
                           std::optional<Var<T>> extra_node_features) {
  GraphTensor<T> gt;
  gt.topo = &graph.topo;
  gt.nodes = tables.category(tape, graph.node_category);
  if (extra_node_features) {
    if (extra_node_features->rows() != graph.topo.nodes) {
      throw std::invalid_argument("embed_graph: extra node features need one row per node");
    }
    gt.nodes = concat_cols<T>({gt.nodes, *extra_node_features});
  }
  gt.edges = tables.relation(tape, graph.edge_relation);
  return gt;
}

template <typename T>
GraphConv<T>::GraphConv(ParamStore<T>& store, const std::string& name, int node_in, int edge_in, int hidden, int out,
                        std::mt19937_64& rng)
    : message_in_(store, name + ".msg0", 2 * node_in + edge_in, hidden, rng),
      message_out_(store, name + ".msg1", hidden, 3 * out, rng),
      self_(store, name + ".self", node_in, out, rng),
      node_in_(node_in),
      edge_in_(edge_in),
      out_(out) {}

template <typename T>
GraphTensor<T> GraphConv<T>::operator()(const GraphTensor<T>& in) const {
  const GraphTopology& topo = *in.topo;
  if (in.nodes.cols() != node_in_ || in.edges.cols() != edge_in_) {
    throw std::invalid_argument("GraphConv: feature width mismatch");
  }
  const T slope = static_cast<T>(kLeakySlope);
  Var<T> triples = gather_triples(in.nodes, in.edges, topo.src, topo.dst, topo.incidence);
  Var<T> hidden = leaky_relu(message_in_(triples), slope);
  Var<T> cand = message_out_(hidden);
  Var<T> src_cand = slice_cols(cand, 0, out_);
  Var<T> edge_cand = slice_cols(cand, out_, out_);
  Var<T> dst_cand = slice_cols(cand, 2 * out_, out_);
  Var<T> self_cand = self_(in.nodes);
  GraphTensor<T> result;
  result.topo = in.topo;
  result.nodes = leaky_relu(incident_mean(src_cand, dst_cand, self_cand, topo.src, topo.dst, topo.incidence), slope);
  result.edges = leaky_relu(edge_cand, slope);
  return result;
}

template <typename T>
GraphConvStack<T>::GraphConvStack(ParamStore<T>& store, const std::string& name, int node_in, int edge_in, int hidden,
                                  int layers, std::mt19937_64& rng) {
  for (int k = 0; k < layers; ++k) {
    layers_.emplace_back(store, name + ".gc" + std::to_string(k), k == 0 ? node_in : hidden, k == 0 ? edge_in : hidden,
                         hidden, hidden, rng);
  }
}

template <typename T>
GraphTensor<T> GraphConvStack<T>::operator()(GraphTensor<T> in) const {
  for (const auto& layer : layers_) in = layer(in);
  return in;
}

template <typename T>
Var<T> graph_pool(const GraphTensor<T>& gt) {
  if (gt.topo->nodes == 0) throw std::invalid_argument("graph_pool: empty graph");
  return segment_mean(gt.nodes, gt.topo->node_graph, gt.topo->graphs);
}

template GraphTensor<float> embed_graph(Tape<float>&, const EncodedGraph&, const GraphEmbedding<float>&,
                                        std::optional<Var<float>>);
template GraphTensor<double> embed_graph(Tape<double>&, const EncodedGraph&, const GraphEmbedding<double>&,
                                         std::optional<Var<double>>);
template Var<float> graph_pool(const GraphTensor<float>&);
template Var<double> graph_pool(const GraphTensor<double>&);
template class GraphConv<float>;
template class GraphConv<double>;
template class GraphConvStack<float>;
template class GraphConvStack<double>;

}  // namespace ndn::nn
