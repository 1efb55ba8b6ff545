#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ndn/nn/graph.hpp"

namespace ndn::testing {

template <typename T>
inline nn::Matrix<T> random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  nn::Matrix<T> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(n(rng));
  return m;
}

inline nn::GraphTopology make_topology(int nodes, std::vector<int> src, std::vector<int> dst) {
  nn::GraphTopology t;
  t.nodes = nodes;
  t.graphs = 1;
  t.src = std::move(src);
  t.dst = std::move(dst);
  t.node_graph.assign(static_cast<size_t>(nodes), 0);
  t.node_offset = {0, nodes};
  t.edge_offset = {0, t.edges()};
  t.finalize();
  return t;
}

// Largest relative error between analytic and central-difference gradients of
// `loss` with respect to every parameter entry in `store`.
inline double gradient_check(nn::ParamStore<double>& store,
                             const std::function<nn::Var<double>(nn::Tape<double>&)>& loss) {
  store.zero_grad();
  {
    nn::Tape<double> tape;
    tape.backward(loss(tape));
  }
  const double h = 1e-6;
  double worst = 0.0;
  for (const auto& p : store.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double saved = p->value.data()[i];
      p->value.data()[i] = saved + h;
      nn::Tape<double> plus(false);
      const double lp = loss(plus).value()(0, 0);
      p->value.data()[i] = saved - h;
      nn::Tape<double> minus(false);
      const double lm = loss(minus).value()(0, 0);
      p->value.data()[i] = saved;
      const double numeric = (lp - lm) / (2 * h);
      const double analytic = p->grad.data()[i];
      const double err = std::abs(numeric - analytic) / std::max(1e-6, std::abs(numeric) + std::abs(analytic));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace ndn::testing
