#pragma once

#include <span>
#include <vector>

#include "ndn/kernels/graph_kernels.hpp"
#include "ndn/nn/tape.hpp"

namespace ndn::nn {

// Differentiable ops. Each records its result on the tape of its first
// argument. Index vectors passed by value are copied into the backward
// closure; the graph ops keep references to `src`, `dst` and `inc`, which
// must outlive the tape.

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
/// a + broadcast(bias), bias is 1 x cols(a).
template <typename T> Var<T> add_bias(Var<T> a, Var<T> bias);
template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
template <typename T> Var<T> scale(Var<T> a, T s);

template <typename T> Var<T> leaky_relu(Var<T> a, T slope);
template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> exp(Var<T> a);
template <typename T> Var<T> abs(Var<T> a);

template <typename T> Var<T> concat_cols(const std::vector<Var<T>>& parts);
template <typename T> Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count);
template <typename T> Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count);
/// out.row(k) = a.row(index[k]); repeated indices accumulate in backward.
template <typename T> Var<T> gather_rows(Var<T> a, std::vector<int> index);
/// out.row(s) = mean of a.row(k) with segment[k] == s. Empty segments give zero rows.
template <typename T> Var<T> segment_mean(Var<T> a, std::vector<int> segment, int segments);

/// Per-edge concatenation [node(src), edge, node(dst)].
template <typename T>
Var<T> gather_triples(Var<T> nodes, Var<T> edges, const std::vector<int>& src, const std::vector<int>& dst,
                      const kernels::Incidence& inc);
/// Per-node mean of incident edge candidates; isolated nodes take their self candidate.
template <typename T>
Var<T> incident_mean(Var<T> src_cand, Var<T> dst_cand, Var<T> self_cand, const std::vector<int>& src,
                     const std::vector<int>& dst, const kernels::Incidence& inc);

template <typename T> Var<T> sum(Var<T> a);
template <typename T> Var<T> mean(Var<T> a);

/// Per-row softmax cross-entropy restricted to columns [lo[r], hi[r]); target[r] is an absolute column.
/// Returns a rows x 1 column. Logits are shifted by the row max for stability.
template <typename T>
Var<T> cross_entropy(Var<T> logits, std::vector<int> target, std::vector<int> lo, std::vector<int> hi);
/// Mean binary cross-entropy of a rows x 1 logit column against {0,1} labels.
template <typename T> Var<T> bce_with_logits(Var<T> logits, std::vector<T> labels);

/// Sum over all entries of KL(N(mu, exp(logvar)) || N(0, 1)).
template <typename T> Var<T> kl_standard_normal(Var<T> mu, Var<T> logvar);
/// Sum over all entries of KL(N(mu_q, exp(lv_q)) || N(mu_p, exp(lv_p))).
template <typename T> Var<T> kl_gaussians(Var<T> mu_q, Var<T> logvar_q, Var<T> mu_p, Var<T> logvar_p);

/// mu + exp(logvar / 2) * eps with eps supplied by the caller.
template <typename T> Var<T> reparameterize(Var<T> mu, Var<T> logvar, const Matrix<T>& eps);

}  // namespace ndn::nn
