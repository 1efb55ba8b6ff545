#pragma once

// Message-passing inner loops. Every kernel has a serial reference in
// `serial::` and an OpenMP version in `parallel::` with identical results:
// parallel loops partition output rows, and each output row accumulates its
// inputs in the same order as the serial loop, so the two agree bitwise.
// The unqualified entry points pick the parallel version for large inputs.

#include <Eigen/Core>
#include <span>
#include <vector>

namespace ndn::kernels {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Node -> incident (edge, side) lists in edge order. side 0 = source, 1 = destination.
struct Incidence {
  std::vector<int> offsets;  // size nodes + 1
  std::vector<int> entries;  // edge * 2 + side

  static Incidence build(int nodes, std::span<const int> src, std::span<const int> dst);
  [[nodiscard]] int degree(int node) const { return offsets[node + 1] - offsets[node]; }
  [[nodiscard]] int nodes() const { return static_cast<int>(offsets.size()) - 1; }
};

/// Below this many output rows the dispatching entry points stay serial.
inline constexpr int kParallelRowThreshold = 256;

#define NDN_KERNEL_DECLS                                                                                          \
  /* out.row(e) = [nodes.row(src[e]), edges.row(e), nodes.row(dst[e])] */                                        \
  template <typename T>                                                                                           \
  void gather_triples(const Matrix<T>& nodes, const Matrix<T>& edges, std::span<const int> src,                  \
                      std::span<const int> dst, Matrix<T>& out);                                                  \
  /* Adjoint of gather_triples: accumulates into d_nodes / d_edges. */                                            \
  template <typename T>                                                                                           \
  void gather_triples_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,        \
                               const Incidence& inc, int node_dim, Matrix<T>& d_nodes, Matrix<T>& d_edges);       \
  /* Node row = mean of its incident candidates, or self_cand row when isolated. */                               \
  template <typename T>                                                                                           \
  void incident_mean(const Matrix<T>& src_cand, const Matrix<T>& dst_cand, const Matrix<T>& self_cand,            \
                     std::span<const int> src, std::span<const int> dst, const Incidence& inc, Matrix<T>& out);   \
  template <typename T>                                                                                           \
  void incident_mean_backward(const Matrix<T>& d_out, std::span<const int> src, std::span<const int> dst,          \
                              const Incidence& inc, Matrix<T>& d_src, Matrix<T>& d_dst, Matrix<T>& d_self);       \
  template <typename T>                                                                                           \
  void leaky_relu(const Matrix<T>& in, T slope, Matrix<T>& out);                                                  \
  template <typename T>                                                                                           \
  void leaky_relu_backward(const Matrix<T>& in, const Matrix<T>& d_out, T slope, Matrix<T>& d_in);

namespace serial {
NDN_KERNEL_DECLS
}  // namespace serial

namespace parallel {
NDN_KERNEL_DECLS
}  // namespace parallel

NDN_KERNEL_DECLS

#undef NDN_KERNEL_DECLS

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace ndn::kernels
