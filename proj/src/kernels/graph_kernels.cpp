#include "ndn/kernels/graph_kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ndn::kernels {

Incidence Incidence::build(int nodes, std::span<const int> src, std::span<const int> dst) {
  Incidence inc;
  inc.offsets.assign(static_cast<size_t>(nodes) + 1, 0);
  for (size_t e = 0; e < src.size(); ++e) {
    ++inc.offsets[static_cast<size_t>(src[e]) + 1];
    ++inc.offsets[static_cast<size_t>(dst[e]) + 1];
  }
  for (int n = 0; n < nodes; ++n) inc.offsets[n + 1] += inc.offsets[n];
  inc.entries.resize(static_cast<size_t>(inc.offsets.back()));
  std::vector<int> cursor(inc.offsets.begin(), inc.offsets.end() - 1);
  for (size_t e = 0; e < src.size(); ++e) {
    inc.entries[static_cast<size_t>(cursor[static_cast<size_t>(src[e])]++)] = static_cast<int>(e) * 2;
    inc.entries[static_cast<size_t>(cursor[static_cast<size_t>(dst[e])]++)] = static_cast<int>(e) * 2 + 1;
  }
  return inc;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// Serial reference: straightforward edge-centric loops.

namespace serial {

template <typename T>
void gather_triples(const Matrix<T>& nodes, const Matrix<T>& edges, std::span<const int> src,
                    std::span<const int> dst, Matrix<T>& out) {
  const auto dn = nodes.cols();
  const auto de = edges.cols();
  out.resize(edges.rows(), 2 * dn + de);
  for (Eigen::Index e = 0; e < edges.rows(); ++e) {
    out.row(e).segment(0, dn) = nodes.row(src[e]);
    out.row(e).segment(dn, de) = edges.row(e);
    out.row(e).segment(dn + de, dn) = nodes.row(dst[e]);
  }
}

template <typename T>
void gather_triples_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,
                             const Incidence& /*inc*/, int node_dim, Matrix<T>& d_nodes, Matrix<T>& d_edges) {
  const auto de = d_out.cols() - 2 * node_dim;
  for (Eigen::Index e = 0; e < d_out.rows(); ++e) {
    d_nodes.row(src[e]) += d_out.row(e).segment(0, node_dim);
    d_nodes.row(dst[e]) += d_out.row(e).segment(node_dim + de, node_dim);
    d_edges.row(e) += d_out.row(e).segment(node_dim, de);
  }
}

template <typename T>
void incident_mean(const Matrix<T>& src_cand, const Matrix<T>& dst_cand, const Matrix<T>& self_cand,
                   std::span<const int> src, std::span<const int> dst, const Incidence& /*inc*/, Matrix<T>& out) {
  const auto nodes = self_cand.rows();
  out.setZero(nodes, self_cand.cols());
  std::vector<int> count(static_cast<size_t>(nodes), 0);
  for (size_t e = 0; e < src.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    out.row(src[e]) += src_cand.row(i);
    ++count[static_cast<size_t>(src[e])];
    out.row(dst[e]) += dst_cand.row(i);
    ++count[static_cast<size_t>(dst[e])];
  }
  for (Eigen::Index n = 0; n < nodes; ++n) {
    const int c = count[static_cast<size_t>(n)];
    if (c == 0) {
      out.row(n) = self_cand.row(n);
    } else {
      out.row(n) /= static_cast<T>(c);
    }
  }
}

template <typename T>
void incident_mean_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,
                            const Incidence& inc, Matrix<T>& d_src, Matrix<T>& d_dst, Matrix<T>& d_self) {
  for (size_t e = 0; e < src.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    d_src.row(i) += d_out.row(src[e]) / static_cast<T>(inc.degree(src[e]));
    d_dst.row(i) += d_out.row(dst[e]) / static_cast<T>(inc.degree(dst[e]));
  }
  for (int n = 0; n < inc.nodes(); ++n) {
    if (inc.degree(n) == 0) d_self.row(n) += d_out.row(n);
  }
}

template <typename T>
void leaky_relu(const Matrix<T>& in, T slope, Matrix<T>& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    const T v = in.data()[i];
    out.data()[i] = v > T(0) ? v : slope * v;
  }
}

template <typename T>
void leaky_relu_backward(const Matrix<T>& in, const Matrix<T>& d_out, T slope, Matrix<T>& d_in) {
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    d_in.data()[i] += in.data()[i] > T(0) ? d_out.data()[i] : slope * d_out.data()[i];
  }
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP versions: each thread owns a disjoint block of output rows.

namespace parallel {

template <typename T>
void gather_triples(const Matrix<T>& nodes, const Matrix<T>& edges, std::span<const int> src,
                    std::span<const int> dst, Matrix<T>& out) {
  const auto dn = nodes.cols();
  const auto de = edges.cols();
  const auto m = edges.rows();
  out.resize(m, 2 * dn + de);
#pragma omp parallel for schedule(static)
  for (Eigen::Index e = 0; e < m; ++e) {
    T* row = out.data() + e * out.cols();
    const T* a = nodes.data() + static_cast<Eigen::Index>(src[e]) * dn;
    const T* b = edges.data() + e * de;
    const T* c = nodes.data() + static_cast<Eigen::Index>(dst[e]) * dn;
    std::copy(a, a + dn, row);
    std::copy(b, b + de, row + dn);
    std::copy(c, c + dn, row + dn + de);
  }
}

template <typename T>
void gather_triples_backward(const Matrix<T>& d_out, std::span<const int> /*src*/, std::span<const int> /*dst*/,
                             const Incidence& inc, int node_dim, Matrix<T>& d_nodes, Matrix<T>& d_edges) {
  const auto de = d_out.cols() - 2 * node_dim;
  const auto m = d_out.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index e = 0; e < m; ++e) d_edges.row(e) += d_out.row(e).segment(node_dim, de);

  const int nodes = inc.nodes();
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    for (int k = inc.offsets[n]; k < inc.offsets[n + 1]; ++k) {
      const int entry = inc.entries[static_cast<size_t>(k)];
      const Eigen::Index offset = entry % 2 == 0 ? 0 : node_dim + de;
      d_nodes.row(n) += d_out.row(entry / 2).segment(offset, node_dim);
    }
  }
}

template <typename T>
void incident_mean(const Matrix<T>& src_cand, const Matrix<T>& dst_cand, const Matrix<T>& self_cand,
                   std::span<const int> /*src*/, std::span<const int> /*dst*/, const Incidence& inc, Matrix<T>& out) {
  const int nodes = inc.nodes();
  out.resize(nodes, self_cand.cols());
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    const int deg = inc.degree(n);
    if (deg == 0) {
      out.row(n) = self_cand.row(n);
      continue;
    }
    out.row(n).setZero();
    for (int k = inc.offsets[n]; k < inc.offsets[n + 1]; ++k) {
      const int entry = inc.entries[static_cast<size_t>(k)];
      out.row(n) += (entry % 2 == 0 ? src_cand : dst_cand).row(entry / 2);
    }
    out.row(n) /= static_cast<T>(deg);
  }
}

template <typename T>
void incident_mean_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,
                            const Incidence& inc, Matrix<T>& d_src, Matrix<T>& d_dst, Matrix<T>& d_self) {
  const auto m = static_cast<Eigen::Index>(src.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index e = 0; e < m; ++e) {
    d_src.row(e) += d_out.row(src[e]) / static_cast<T>(inc.degree(src[e]));
    d_dst.row(e) += d_out.row(dst[e]) / static_cast<T>(inc.degree(dst[e]));
  }
  const int nodes = inc.nodes();
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    if (inc.degree(n) == 0) d_self.row(n) += d_out.row(n);
  }
}

template <typename T>
void leaky_relu(const Matrix<T>& in, T slope, Matrix<T>& out) {
  out.resize(in.rows(), in.cols());
  const auto size = in.size();
  const T* src = in.data();
  T* dst = out.data();
#pragma omp parallel for simd schedule(static)
  for (Eigen::Index i = 0; i < size; ++i) dst[i] = src[i] > T(0) ? src[i] : slope * src[i];
}

template <typename T>
void leaky_relu_backward(const Matrix<T>& in, const Matrix<T>& d_out, T slope, Matrix<T>& d_in) {
  const auto size = in.size();
  const T* x = in.data();
  const T* g = d_out.data();
  T* d = d_in.data();
#pragma omp parallel for simd schedule(static)
  for (Eigen::Index i = 0; i < size; ++i) d[i] += x[i] > T(0) ? g[i] : slope * g[i];
}

}  // namespace parallel

// ---------------------------------------------------------------------------
// Dispatch.

namespace {
bool go_parallel(Eigen::Index rows) { return max_threads() > 1 && rows >= kParallelRowThreshold; }
}  // namespace

template <typename T>
void gather_triples(const Matrix<T>& nodes, const Matrix<T>& edges, std::span<const int> src,
                    std::span<const int> dst, Matrix<T>& out) {
  if (go_parallel(edges.rows())) return parallel::gather_triples(nodes, edges, src, dst, out);
  serial::gather_triples(nodes, edges, src, dst, out);
}

template <typename T>
void gather_triples_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,
                             const Incidence& inc, int node_dim, Matrix<T>& d_nodes, Matrix<T>& d_edges) {
  if (go_parallel(d_out.rows())) {
    return parallel::gather_triples_backward(d_out, src, dst, inc, node_dim, d_nodes, d_edges);
  }
  serial::gather_triples_backward(d_out, src, dst, inc, node_dim, d_nodes, d_edges);
}

template <typename T>
void incident_mean(const Matrix<T>& src_cand, const Matrix<T>& dst_cand, const Matrix<T>& self_cand,
                   std::span<const int> src, std::span<const int> dst, const Incidence& inc, Matrix<T>& out) {
  if (go_parallel(inc.nodes())) return parallel::incident_mean(src_cand, dst_cand, self_cand, src, dst, inc, out);
  serial::incident_mean(src_cand, dst_cand, self_cand, src, dst, inc, out);
}

template <typename T>
void incident_mean_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,
                            const Incidence& inc, Matrix<T>& d_src, Matrix<T>& d_dst, Matrix<T>& d_self) {
  if (go_parallel(static_cast<Eigen::Index>(src.size()))) {
    return parallel::incident_mean_backward(d_out, src, dst, inc, d_src, d_dst, d_self);
  }
  serial::incident_mean_backward(d_out, src, dst, inc, d_src, d_dst, d_self);
}

template <typename T>
void leaky_relu(const Matrix<T>& in, T slope, Matrix<T>& out) {
  if (go_parallel(in.size() / 64)) return parallel::leaky_relu(in, slope, out);
  serial::leaky_relu(in, slope, out);
}

template <typename T>
void leaky_relu_backward(const Matrix<T>& in, const Matrix<T>& d_out, T slope, Matrix<T>& d_in) {
  if (go_parallel(in.size() / 64)) return parallel::leaky_relu_backward(in, d_out, slope, d_in);
  serial::leaky_relu_backward(in, d_out, slope, d_in);
}

#define NDN_INSTANTIATE(NS, T)                                                                                     \
  template void NS gather_triples<T>(const Matrix<T>&, const Matrix<T>&, std::span<const int>,                    \
                                     std::span<const int>, Matrix<T>&);                                           \
  template void NS gather_triples_backward<T>(const Matrix<T>&, std::span<const int>, std::span<const int>,       \
                                              const Incidence&, int, Matrix<T>&, Matrix<T>&);                     \
  template void NS incident_mean<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, std::span<const int>,   \
                                    std::span<const int>, const Incidence&, Matrix<T>&);                          \
  template void NS incident_mean_backward<T>(const Matrix<T>&, std::span<const int>, std::span<const int>,        \
                                             const Incidence&, Matrix<T>&, Matrix<T>&, Matrix<T>&);               \
  template void NS leaky_relu<T>(const Matrix<T>&, T, Matrix<T>&);                                                \
  template void NS leaky_relu_backward<T>(const Matrix<T>&, const Matrix<T>&, T, Matrix<T>&);

NDN_INSTANTIATE(serial::, float)
NDN_INSTANTIATE(serial::, double)
NDN_INSTANTIATE(parallel::, float)
NDN_INSTANTIATE(parallel::, double)
NDN_INSTANTIATE(, float)
NDN_INSTANTIATE(, double)

#undef NDN_INSTANTIATE

}  // namespace ndn::kernels
