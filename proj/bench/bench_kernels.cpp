#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ndn/kernels/graph_kernels.hpp"

namespace k = ndn::kernels;
using Mat = k::Matrix<float>;

namespace {

// A random graph with `nodes` nodes and 4 edges per node.
struct Problem {
  int nodes;
  std::vector<int> src, dst;
  k::Incidence inc;
  Mat node_feat, edge_feat, triples;

  explicit Problem(int n, int dim = 64) : nodes(n) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < 4 * n; ++e) {
      int a = pick(rng), b = pick(rng);
      if (a == b) b = (b + 1) % n;
      src.push_back(a);
      dst.push_back(b);
    }
    inc = k::Incidence::build(n, src, dst);
    node_feat = Mat::Random(n, dim);
    edge_feat = Mat::Random(static_cast<Eigen::Index>(src.size()), dim);
    triples = Mat::Random(static_cast<Eigen::Index>(src.size()), 3 * dim);
  }
};

template <bool Parallel>
void BM_GatherTriples(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  Mat out;
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::gather_triples(p.node_feat, p.edge_feat, p.src, p.dst, out);
    else k::serial::gather_triples(p.node_feat, p.edge_feat, p.src, p.dst, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_GatherTriplesBackward(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const int dim = static_cast<int>(p.node_feat.cols());
  for (auto _ : state) {
    Mat dn = Mat::Zero(p.nodes, dim), de = Mat::Zero(p.edge_feat.rows(), dim);
    if constexpr (Parallel) k::parallel::gather_triples_backward(p.triples, p.src, p.dst, p.inc, dim, dn, de);
    else k::serial::gather_triples_backward(p.triples, p.src, p.dst, p.inc, dim, dn, de);
    benchmark::DoNotOptimize(dn.data());
  }
}

template <bool Parallel>
void BM_IncidentMean(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  Mat out;
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::incident_mean(p.edge_feat, p.edge_feat, p.node_feat, p.src, p.dst, p.inc, out);
    else k::serial::incident_mean(p.edge_feat, p.edge_feat, p.node_feat, p.src, p.dst, p.inc, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_IncidentMeanBackward(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const Eigen::Index dim = p.node_feat.cols();
  for (auto _ : state) {
    Mat ds = Mat::Zero(p.edge_feat.rows(), dim), dd = ds, dself = Mat::Zero(p.nodes, dim);
    if constexpr (Parallel) k::parallel::incident_mean_backward(p.node_feat, p.src, p.dst, p.inc, ds, dd, dself);
    else k::serial::incident_mean_backward(p.node_feat, p.src, p.dst, p.inc, ds, dd, dself);
    benchmark::DoNotOptimize(ds.data());
  }
}

template <bool Parallel>
void BM_LeakyRelu(benchmark::State& state) {
  const Mat in = Mat::Random(state.range(0), 128);
  Mat out;
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::leaky_relu(in, 0.2f, out);
    else k::serial::leaky_relu(in, 0.2f, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_LeakyReluBackward(benchmark::State& state) {
  const Mat in = Mat::Random(state.range(0), 128), d_out = Mat::Random(state.range(0), 128);
  Mat d_in;
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::leaky_relu_backward(in, d_out, 0.2f, d_in);
    else k::serial::leaky_relu_backward(in, d_out, 0.2f, d_in);
    benchmark::DoNotOptimize(d_in.data());
  }
}

}  // namespace

#define NDN_BENCH_PAIR(fn)                                                  \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(8)->Range(64, 32768); \
  BENCHMARK(fn<true>)->Name(#fn "/parallel")->RangeMultiplier(8)->Range(64, 32768);

NDN_BENCH_PAIR(BM_GatherTriples)
NDN_BENCH_PAIR(BM_GatherTriplesBackward)
NDN_BENCH_PAIR(BM_IncidentMean)
NDN_BENCH_PAIR(BM_IncidentMeanBackward)
NDN_BENCH_PAIR(BM_LeakyRelu)
NDN_BENCH_PAIR(BM_LeakyReluBackward)

BENCHMARK_MAIN();
