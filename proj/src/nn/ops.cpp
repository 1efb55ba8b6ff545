#include "ndn/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ndn::nn {
namespace {

template <typename T>
void require_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

template <typename T>
bool any_grad(const Tape<T>& t, std::initializer_list<int> ids) {
  return std::any_of(ids.begin(), ids.end(), [&](int id) { return t.needs_grad(id); });
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Tape<T>& t = *a.tape();
  Matrix<T> out;
  out.noalias() = a.value() * b.value();
  const int ia = a.id();
  const int ib = b.id();
  return t.push(std::move(out), any_grad(t, {ia, ib}), [ia, ib](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    if (tp.needs_grad(ia)) tp.grad(ia).noalias() += g * tp.value(ib).transpose();
    if (tp.needs_grad(ib)) tp.grad(ib).noalias() += tp.value(ia).transpose() * g;
  });
}

template <typename T>
Var<T> add_bias(Var<T> a, Var<T> bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) throw std::invalid_argument("add_bias: bias shape");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().rowwise() + bias.value().row(0);
  const int ia = a.id();
  const int ib = bias.id();
  return t.push(std::move(out), any_grad(t, {ia, ib}), [ia, ib](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    if (tp.needs_grad(ia)) tp.grad(ia) += g;
    if (tp.needs_grad(ib)) tp.grad(ib) += g.colwise().sum();
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_shape(a, b, "add");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value() + b.value();
  const int ia = a.id();
  const int ib = b.id();
  return t.push(std::move(out), any_grad(t, {ia, ib}), [ia, ib](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    if (tp.needs_grad(ia)) tp.grad(ia) += g;
    if (tp.needs_grad(ib)) tp.grad(ib) += g;
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  require_same_shape(a, b, "sub");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value() - b.value();
  const int ia = a.id();
  const int ib = b.id();
  return t.push(std::move(out), any_grad(t, {ia, ib}), [ia, ib](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    if (tp.needs_grad(ia)) tp.grad(ia) += g;
    if (tp.needs_grad(ib)) tp.grad(ib) -= g;
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require_same_shape(a, b, "mul");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().cwiseProduct(b.value());
  const int ia = a.id();
  const int ib = b.id();
  return t.push(std::move(out), any_grad(t, {ia, ib}), [ia, ib](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    if (tp.needs_grad(ia)) tp.grad(ia) += g.cwiseProduct(tp.value(ib));
    if (tp.needs_grad(ib)) tp.grad(ib) += g.cwiseProduct(tp.value(ia));
  });
}

template <typename T>
Var<T> scale(Var<T> a, T s) {
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value() * s;
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia, s](Tape<T>& tp, int self) { tp.grad(ia) += tp.grad(self) * s; });
}

template <typename T>
Var<T> leaky_relu(Var<T> a, T slope) {
  Tape<T>& t = *a.tape();
  Matrix<T> out;
  kernels::leaky_relu(a.value(), slope, out);
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia, slope](Tape<T>& tp, int self) {
    kernels::leaky_relu_backward(tp.value(ia), tp.grad(self), slope, tp.grad(ia));
  });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia](Tape<T>& tp, int self) {
    const Matrix<T>& y = tp.value(self);
    tp.grad(ia).array() += tp.grad(self).array() * y.array() * (T(1) - y.array());
  });
}

template <typename T>
Var<T> exp(Var<T> a) {
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().array().exp().matrix();
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia](Tape<T>& tp, int self) {
    tp.grad(ia).array() += tp.grad(self).array() * tp.value(self).array();
  });
}

template <typename T>
Var<T> abs(Var<T> a) {
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().cwiseAbs();
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia](Tape<T>& tp, int self) {
    const Matrix<T>& x = tp.value(ia);
    const Matrix<T>& g = tp.grad(self);
    Matrix<T>& d = tp.grad(ia);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const T v = x.data()[k];
      d.data()[k] += v > T(0) ? g.data()[k] : (v < T(0) ? -g.data()[k] : T(0));
    }
  });
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  Tape<T>& t = *parts.front().tape();
  const auto rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix<T> out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  bool needs = false;
  for (const auto& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    ids.push_back(p.id());
    offsets.push_back(off);
    needs = needs || t.needs_grad(p.id());
    off += p.cols();
  }
  return t.push(std::move(out), needs, [ids, offsets](Tape<T>& tp, int self) {
    for (size_t k = 0; k < ids.size(); ++k) {
      if (!tp.needs_grad(ids[k])) continue;
      Matrix<T>& d = tp.grad(ids[k]);
      d += tp.grad(self).middleCols(offsets[k], d.cols());
    }
  });
}

template <typename T>
Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw std::invalid_argument("slice_cols: out of range");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().middleCols(start, count);
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia, start, count](Tape<T>& tp, int self) {
    tp.grad(ia).middleCols(start, count) += tp.grad(self);
  });
}

template <typename T>
Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw std::invalid_argument("slice_rows: out of range");
  Tape<T>& t = *a.tape();
  Matrix<T> out = a.value().middleRows(start, count);
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia, start, count](Tape<T>& tp, int self) {
    tp.grad(ia).middleRows(start, count) += tp.grad(self);
  });
}

template <typename T>
Var<T> gather_rows(Var<T> a, std::vector<int> index) {
  Tape<T>& t = *a.tape();
  const Matrix<T>& src = a.value();
  Matrix<T> out(static_cast<Eigen::Index>(index.size()), src.cols());
  for (size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= src.rows()) throw std::invalid_argument("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(k)) = src.row(index[k]);
  }
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia, index = std::move(index)](Tape<T>& tp, int self) {
    const Matrix<T>& g = tp.grad(self);
    Matrix<T>& d = tp.grad(ia);
    for (size_t k = 0; k < index.size(); ++k) d.row(index[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

template <typename T>
Var<T> segment_mean(Var<T> a, std::vector<int> segment, int segments) {
  if (static_cast<Eigen::Index>(segment.size()) != a.rows()) throw std::invalid_argument("segment_mean: size");
  Tape<T>& t = *a.tape();
  Matrix<T> out = Matrix<T>::Zero(segments, a.cols());
  std::vector<int> count(static_cast<size_t>(segments), 0);
  for (size_t k = 0; k < segment.size(); ++k) {
    out.row(segment[k]) += a.value().row(static_cast<Eigen::Index>(k));
    ++count[static_cast<size_t>(segment[k])];
  }
  for (int s = 0; s < segments; ++s) {
    if (count[static_cast<size_t>(s)] > 0) out.row(s) /= static_cast<T>(count[static_cast<size_t>(s)]);
  }
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia),
                [ia, segment = std::move(segment), count = std::move(count)](Tape<T>& tp, int self) {
                  const Matrix<T>& g = tp.grad(self);
                  Matrix<T>& d = tp.grad(ia);
                  for (size_t k = 0; k < segment.size(); ++k) {
                    const int s = segment[k];
                    d.row(static_cast<Eigen::Index>(k)) += g.row(s) / static_cast<T>(count[static_cast<size_t>(s)]);
                  }
                });
}

template <typename T>
Var<T> gather_triples(Var<T> nodes, Var<T> edges, const std::vector<int>& src, const std::vector<int>& dst,
                      const kernels::Incidence& inc) {
  Tape<T>& t = *nodes.tape();
  Matrix<T> out;
  kernels::gather_triples(nodes.value(), edges.value(), std::span<const int>(src), std::span<const int>(dst), out);
  const int in = nodes.id();
  const int ie = edges.id();
  const int node_dim = static_cast<int>(nodes.cols());
  return t.push(std::move(out), any_grad(t, {in, ie}), [in, ie, node_dim, &src, &dst, &inc](Tape<T>& tp, int self) {
    // Both buffers are needed by the kernel even if only one input wants a gradient.
    Matrix<T>& dn = tp.grad(in);
    Matrix<T>& de = tp.grad(ie);
    kernels::gather_triples_backward(tp.grad(self), std::span<const int>(src), std::span<const int>(dst), inc,
                                     node_dim, dn, de);
  });
}

template <typename T>
Var<T> incident_mean(Var<T> src_cand, Var<T> dst_cand, Var<T> self_cand, const std::vector<int>& src,
                     const std::vector<int>& dst, const kernels::Incidence& inc) {
  Tape<T>& t = *src_cand.tape();
  Matrix<T> out;
  kernels::incident_mean(src_cand.value(), dst_cand.value(), self_cand.value(), std::span<const int>(src),
                         std::span<const int>(dst), inc, out);
  const int is = src_cand.id();
  const int id = dst_cand.id();
  const int iself = self_cand.id();
  return t.push(std::move(out), any_grad(t, {is, id, iself}), [is, id, iself, &src, &dst, &inc](Tape<T>& tp, int self) {
    Matrix<T>& ds = tp.grad(is);
    Matrix<T>& dd = tp.grad(id);
    Matrix<T>& dself = tp.grad(iself);
    kernels::incident_mean_backward(tp.grad(self), std::span<const int>(src), std::span<const int>(dst), inc, ds, dd,
                                    dself);
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  Tape<T>& t = *a.tape();
  Matrix<T> out(1, 1);
  out(0, 0) = a.value().sum();
  const int ia = a.id();
  return t.push(std::move(out), t.needs_grad(ia), [ia](Tape<T>& tp, int self) {
    tp.grad(ia).array() += tp.grad(self)(0, 0);
  });
}

template <typename T>
Var<T> mean(Var<T> a) {
  if (a.value().size() == 0) throw std::invalid_argument("mean: empty input");
  return scale(sum(a), T(1) / static_cast<T>(a.value().size()));
}

template <typename T>
Var<T> cross_entropy(Var<T> logits, std::vector<int> target, std::vector<int> lo, std::vector<int> hi) {
  const auto rows = logits.rows();
  if (static_cast<Eigen::Index>(target.size()) != rows || lo.size() != target.size() || hi.size() != target.size()) {
    throw std::invalid_argument("cross_entropy: one target and range per row");
  }
  const Matrix<T>& x = logits.value();
  Matrix<T> out(rows, 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int a = lo[static_cast<size_t>(r)];
    const int b = hi[static_cast<size_t>(r)];
    const int y = target[static_cast<size_t>(r)];
    if (a < 0 || b > x.cols() || a >= b || y < a || y >= b) throw std::invalid_argument("cross_entropy: bad range");
    const T m = x.row(r).segment(a, b - a).maxCoeff();
    const T lse = m + std::log((x.row(r).segment(a, b - a).array() - m).exp().sum());
    out(r, 0) = lse - x(r, y);
  }
  Tape<T>& t = *logits.tape();
  const int il = logits.id();
  return t.push(std::move(out), t.needs_grad(il),
                [il, target = std::move(target), lo = std::move(lo), hi = std::move(hi)](Tape<T>& tp, int self) {
                  const Matrix<T>& xv = tp.value(il);
                  const Matrix<T>& g = tp.grad(self);
                  Matrix<T>& d = tp.grad(il);
                  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
                    const int a = lo[static_cast<size_t>(r)];
                    const int n = hi[static_cast<size_t>(r)] - a;
                    const T m = xv.row(r).segment(a, n).maxCoeff();
                    auto e = (xv.row(r).segment(a, n).array() - m).exp();
                    const T z = e.sum();
                    d.row(r).segment(a, n).array() += g(r, 0) * e / z;
                    d(r, target[static_cast<size_t>(r)]) -= g(r, 0);
                  }
                });
}

template <typename T>
Var<T> bce_with_logits(Var<T> logits, std::vector<T> labels) {
  if (logits.cols() != 1 || static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw std::invalid_argument("bce_with_logits: expects rows x 1 logits and one label per row");
  }
  const Matrix<T>& x = logits.value();
  T total = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const T v = x(r, 0);
    total += std::max(v, T(0)) - v * labels[static_cast<size_t>(r)] + std::log1p(std::exp(-std::abs(v)));
  }
  Matrix<T> out(1, 1);
  out(0, 0) = total / static_cast<T>(x.rows());
  Tape<T>& t = *logits.tape();
  const int il = logits.id();
  return t.push(std::move(out), t.needs_grad(il), [il, labels = std::move(labels)](Tape<T>& tp, int self) {
    const Matrix<T>& xv = tp.value(il);
    const T g = tp.grad(self)(0, 0) / static_cast<T>(xv.rows());
    Matrix<T>& d = tp.grad(il);
    for (Eigen::Index r = 0; r < xv.rows(); ++r) {
      const T p = T(1) / (T(1) + std::exp(-xv(r, 0)));
      d(r, 0) += g * (p - labels[static_cast<size_t>(r)]);
    }
  });
}

template <typename T>
Var<T> kl_standard_normal(Var<T> mu, Var<T> logvar) {
  require_same_shape(mu, logvar, "kl_standard_normal");
  const auto m = mu.value().array();
  const auto lv = logvar.value().array();
  Matrix<T> out(1, 1);
  out(0, 0) = T(0.5) * (m.square() + lv.exp() - T(1) - lv).sum();
  Tape<T>& t = *mu.tape();
  const int im = mu.id();
  const int il = logvar.id();
  return t.push(std::move(out), any_grad(t, {im, il}), [im, il](Tape<T>& tp, int self) {
    const T g = tp.grad(self)(0, 0);
    if (tp.needs_grad(im)) tp.grad(im) += g * tp.value(im);
    if (tp.needs_grad(il)) tp.grad(il).array() += g * T(0.5) * (tp.value(il).array().exp() - T(1));
  });
}

template <typename T>
Var<T> kl_gaussians(Var<T> mu_q, Var<T> logvar_q, Var<T> mu_p, Var<T> logvar_p) {
  require_same_shape(mu_q, logvar_q, "kl_gaussians");
  require_same_shape(mu_q, mu_p, "kl_gaussians");
  require_same_shape(mu_q, logvar_p, "kl_gaussians");
  const auto diff = (mu_q.value() - mu_p.value()).array();
  const auto lvq = logvar_q.value().array();
  const auto lvp = logvar_p.value().array();
  Matrix<T> out(1, 1);
  out(0, 0) = T(0.5) * (lvp - lvq + (lvq.exp() + diff.square()) * (-lvp).exp() - T(1)).sum();
  Tape<T>& t = *mu_q.tape();
  const int a = mu_q.id();
  const int b = logvar_q.id();
  const int c = mu_p.id();
  const int d = logvar_p.id();
  return t.push(std::move(out), any_grad(t, {a, b, c, d}), [a, b, c, d](Tape<T>& tp, int self) {
    const T g = tp.grad(self)(0, 0);
    const auto dif = (tp.value(a) - tp.value(c)).array();
    const auto inv_p = (-tp.value(d).array()).exp();
    const auto var_q = tp.value(b).array().exp();
    if (tp.needs_grad(a)) tp.grad(a).array() += g * dif * inv_p;
    if (tp.needs_grad(c)) tp.grad(c).array() -= g * dif * inv_p;
    if (tp.needs_grad(b)) tp.grad(b).array() += g * T(0.5) * (var_q * inv_p - T(1));
    if (tp.needs_grad(d)) tp.grad(d).array() += g * T(0.5) * (T(1) - (var_q + dif.square()) * inv_p);
  });
}

template <typename T>
Var<T> reparameterize(Var<T> mu, Var<T> logvar, const Matrix<T>& eps) {
  Tape<T>& t = *mu.tape();
  return add(mu, mul(exp(scale(logvar, T(0.5))), t.constant(eps)));
}

#define NDN_INSTANTIATE_OPS(T)                                                                                    \
  template Var<T> matmul(Var<T>, Var<T>);                                                                         \
  template Var<T> add_bias(Var<T>, Var<T>);                                                                       \
  template Var<T> add(Var<T>, Var<T>);                                                                            \
  template Var<T> sub(Var<T>, Var<T>);                                                                            \
  template Var<T> mul(Var<T>, Var<T>);                                                                            \
  template Var<T> scale(Var<T>, T);                                                                               \
  template Var<T> leaky_relu(Var<T>, T);                                                                          \
  template Var<T> sigmoid(Var<T>);                                                                                \
  template Var<T> exp(Var<T>);                                                                                    \
  template Var<T> abs(Var<T>);                                                                                    \
  template Var<T> concat_cols(const std::vector<Var<T>>&);                                                        \
  template Var<T> slice_cols(Var<T>, Eigen::Index, Eigen::Index);                                                 \
  template Var<T> slice_rows(Var<T>, Eigen::Index, Eigen::Index);                                                 \
  template Var<T> gather_rows(Var<T>, std::vector<int>);                                                          \
  template Var<T> segment_mean(Var<T>, std::vector<int>, int);                                                    \
  template Var<T> gather_triples(Var<T>, Var<T>, const std::vector<int>&, const std::vector<int>&,                \
                                 const kernels::Incidence&);                                                      \
  template Var<T> incident_mean(Var<T>, Var<T>, Var<T>, const std::vector<int>&, const std::vector<int>&,         \
                                const kernels::Incidence&);                                                       \
  template Var<T> sum(Var<T>);                                                                                    \
  template Var<T> mean(Var<T>);                                                                                   \
  template Var<T> cross_entropy(Var<T>, std::vector<int>, std::vector<int>, std::vector<int>);                    \
  template Var<T> bce_with_logits(Var<T>, std::vector<T>);                                                        \
  template Var<T> kl_standard_normal(Var<T>, Var<T>);                                                             \
  template Var<T> kl_gaussians(Var<T>, Var<T>, Var<T>, Var<T>);                                                   \
  template Var<T> reparameterize(Var<T>, Var<T>, const Matrix<T>&);

NDN_INSTANTIATE_OPS(float)
NDN_INSTANTIATE_OPS(double)

}  // namespace ndn::nn
