#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "ndn/nn/graph.hpp"
#include "ndn/nn/ops.hpp"
#include "support/gradcheck.hpp"

using namespace ndn;
using namespace ndn::nn;

using testing::gradient_check;
using testing::make_topology;
using testing::random_matrix;

TEST_CASE("graph conv layer gradients match finite differences in double precision") {
  std::mt19937_64 rng(42);
  ParamStore<double> store;
  GraphConv<double> conv(store, "conv", 5, 3, 8, 6, rng);
  const GraphTopology topo = make_topology(3, {0, 0, 1, 0, 0, 1}, {1, 2, 2, 1, 2, 2});
  const Matrix<double> nodes = random_matrix<double>(3, 5, rng);
  const Matrix<double> edges = random_matrix<double>(6, 3, rng);
  const Matrix<double> wn = random_matrix<double>(3, 6, rng);
  const Matrix<double> we = random_matrix<double>(6, 6, rng);
  auto loss = [&](Tape<double>& tape) {
    const GraphTensor<double> out = conv({&topo, tape.constant(nodes), tape.constant(edges)});
    return add(sum(mul(out.nodes, tape.constant(wn))), sum(mul(out.edges, tape.constant(we))));
  };
  CHECK(gradient_check(store, loss) < 1e-3);
}

TEST_CASE("mlp and loss op gradients match finite differences") {
  std::mt19937_64 rng(1);
  ParamStore<double> store;
  Mlp<double> mlp(store, "mlp", {4, 7, 6}, rng);
  const Matrix<double> x = random_matrix<double>(5, 4, rng);
  auto ce = [&](Tape<double>& tape) {
    const Var<double> logits = mlp(tape.constant(x));
    return mean(cross_entropy(logits, {0, 3, 5, 2, 4}, {0, 2, 4, 0, 2}, {2, 4, 6, 6, 6}));
  };
  CHECK(gradient_check(store, ce) < 1e-3);

  auto kl = [&](Tape<double>& tape) {
    const Var<double> out = mlp(tape.constant(x));
    const Var<double> mu_q = slice_cols(out, 0, 2), lv_q = slice_cols(out, 2, 2), mu_p = slice_cols(out, 4, 2);
    return add(kl_gaussians(mu_q, lv_q, mu_p, scale(lv_q, 0.5)), kl_standard_normal(mu_q, lv_q));
  };
  CHECK(gradient_check(store, kl) < 1e-3);

  auto misc = [&](Tape<double>& tape) {
    const Var<double> out = sigmoid(mlp(tape.constant(x)));
    const Var<double> g = gather_rows(out, {4, 0, 0, 2});
    const Var<double> s = segment_mean(g, {0, 1, 1, 0}, 2);
    return add(sum(abs(sub(s, tape.constant(Matrix<double>::Constant(2, 6, 0.5))))),
               bce_with_logits(slice_cols(out, 1, 1), std::vector<double>{1, 0, 1, 0, 1}));
  };
  CHECK(gradient_check(store, misc) < 1e-3);
}

TEST_CASE("cross entropy of uniform logits is ln V") {
  Tape<double> tape;
  const Var<double> logits = tape.constant(Matrix<double>::Zero(3, 22));
  const Var<double> ce = cross_entropy(logits, {1, 12, 20}, {0, 10, 19}, {10, 19, 22});
  CHECK(ce.value()(0, 0) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK(ce.value()(1, 0) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  CHECK(ce.value()(2, 0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("KL identities") {
  Tape<double> tape;
  const Var<double> zero = tape.constant(Matrix<double>::Zero(1, 32));
  const Var<double> one = tape.constant(Matrix<double>::Ones(1, 32));
  CHECK(std::abs(kl_standard_normal(zero, zero).value()(0, 0)) < 1e-12);
  CHECK(kl_standard_normal(one, zero).value()(0, 0) == doctest::Approx(16.0).epsilon(1e-12));
  std::mt19937_64 rng(2);
  const Var<double> mu = tape.constant(random_matrix<double>(2, 8, rng));
  const Var<double> lv = tape.constant(random_matrix<double>(2, 8, rng));
  CHECK(std::abs(kl_gaussians(mu, lv, mu, lv).value()(0, 0)) < 1e-12);
  CHECK(kl_gaussians(mu, lv, mu, scale(lv, 2.0)).value()(0, 0) >= 0.0);
}

TEST_CASE("embedding shapes follow the graph") {
  std::mt19937_64 rng(3);
  ParamStore<float> store;
  GraphEmbedding<float> tables(store, "emb", 7, 16, rng);
  LayoutGraph g({2, 2});
  g.set_location(1, 2, LocationRelation::Above);
  const EncodedGraph enc = encode_graph(g);
  Tape<float> tape(false);
  const auto gt = embed_graph(tape, enc, tables);
  CHECK(gt.nodes.rows() == 3);
  CHECK(gt.nodes.cols() == 16);
  CHECK(gt.edges.rows() == 6);
  // Identical categories give identical rows.
  CHECK(gt.nodes.value().row(1) == gt.nodes.value().row(2));
  const auto with_box = embed_graph(tape, enc, tables, std::optional{tape.constant(Matrix<float>::Zero(3, 4))});
  CHECK(with_box.nodes.cols() == 20);
}

TEST_CASE("encoded graphs put location edges before size edges") {
  LayoutGraph g({1, 2, 3});
  g.set_location(1, 3, LocationRelation::LeftOf);
  g.set_size(0, 2, SizeRelation::Larger);
  const EncodedGraph enc = encode_graph(g);
  const int p = pair_count(4);
  REQUIRE(enc.topo.edges() == 2 * p);
  CHECK(enc.edge_relation[static_cast<size_t>(pair_index(1, 3, 4))] == relation_id(LocationRelation::LeftOf));
  CHECK(enc.edge_relation[static_cast<size_t>(p + pair_index(0, 2, 4))] == relation_id(SizeRelation::Larger));
  CHECK(enc.edge_relation[0] == relation_id(LocationRelation::Unknown));
  const EncodedGraph* parts[] = {&enc, &enc};
  const EncodedGraph both = batch_graphs(parts);
  CHECK(both.topo.nodes == 8);
  CHECK(both.topo.src[static_cast<size_t>(2 * p)] == 4);
}

TEST_CASE("graph conv preserves shapes and is permutation equivariant") {
  std::mt19937_64 rng(4);
  ParamStore<double> store;
  GraphConvStack<double> stack(store, "gcn", 6, 5, 10, 3, rng);
  const std::vector<int> src{0, 0, 1, 2, 3}, dst{1, 2, 2, 3, 0};
  const GraphTopology topo = make_topology(4, src, dst);
  const Matrix<double> nodes = random_matrix<double>(4, 6, rng);
  const Matrix<double> edges = random_matrix<double>(5, 5, rng);
  Tape<double> tape(false);
  const auto out = stack({&topo, tape.constant(nodes), tape.constant(edges)});
  CHECK(out.nodes.rows() == 4);
  CHECK(out.nodes.cols() == 10);
  CHECK(out.edges.rows() == 5);

  const std::vector<int> perm{2, 0, 3, 1};  // old node -> new node
  std::vector<int> psrc, pdst;
  for (size_t e = 0; e < src.size(); ++e) {
    psrc.push_back(perm[static_cast<size_t>(src[e])]);
    pdst.push_back(perm[static_cast<size_t>(dst[e])]);
  }
  const GraphTopology ptopo = make_topology(4, psrc, pdst);
  Matrix<double> pnodes(4, 6);
  for (int i = 0; i < 4; ++i) pnodes.row(perm[static_cast<size_t>(i)]) = nodes.row(i);
  const auto pout = stack({&ptopo, tape.constant(pnodes), tape.constant(edges)});
  for (int i = 0; i < 4; ++i) {
    CHECK((pout.nodes.value().row(perm[static_cast<size_t>(i)]) - out.nodes.value().row(i)).cwiseAbs().maxCoeff() < 1e-5);
  }
  CHECK((pout.edges.value() - out.edges.value()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("three layers carry information across a path graph") {
  std::mt19937_64 rng(5);
  ParamStore<double> store;
  GraphConvStack<double> stack(store, "gcn", 4, 4, 8, 3, rng);
  const GraphTopology topo = make_topology(4, {0, 1, 2}, {1, 2, 3});
  Matrix<double> nodes = random_matrix<double>(4, 4, rng);
  const Matrix<double> edges = random_matrix<double>(3, 4, rng);
  Tape<double> tape(false);
  const Matrix<double> before = stack({&topo, tape.constant(nodes), tape.constant(edges)}).nodes.value();
  nodes.row(0).array() += 1.0;
  const Matrix<double> after = stack({&topo, tape.constant(nodes), tape.constant(edges)}).nodes.value();
  CHECK((after.row(3) - before.row(3)).cwiseAbs().maxCoeff() > 1e-9);
}

TEST_CASE("isolated nodes take the self update") {
  std::mt19937_64 rng(6);
  ParamStore<double> store;
  GraphConv<double> conv(store, "conv", 3, 3, 4, 3, rng);
  const GraphTopology topo = make_topology(3, {0}, {1});
  Tape<double> tape(false);
  Matrix<double> nodes = random_matrix<double>(3, 3, rng);
  const Matrix<double> edges = random_matrix<double>(1, 3, rng);
  const Matrix<double> a = conv({&topo, tape.constant(nodes), tape.constant(edges)}).nodes.value();
  nodes.row(0).array() += 1.0;
  const Matrix<double> b = conv({&topo, tape.constant(nodes), tape.constant(edges)}).nodes.value();
  CHECK(a.row(2) == b.row(2));
}

TEST_CASE("graph pool is the node mean") {
  Tape<double> tape(false);
  const GraphTopology one = make_topology(1, {}, {});
  Matrix<double> v(1, 3);
  v << 1, 2, 3;
  CHECK(graph_pool<double>({&one, tape.constant(v), tape.constant(Matrix<double>(0, 3))}).value() == v);
  const GraphTopology three = make_topology(3, {}, {});
  const Matrix<double> same = v.replicate(3, 1);
  CHECK((graph_pool<double>({&three, tape.constant(same), tape.constant(Matrix<double>(0, 3))}).value() - v)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("adam reduces a quadratic") {
  std::mt19937_64 rng(8);
  ParamStore<double> store;
  Parameter<double>& p = store.add("p", 1, 4);
  p.value = random_matrix<double>(1, 4, rng);
  Adam<double> opt(0.05, 0.9, 0.999);
  auto loss = [&] {
    Tape<double> tape;
    const Var<double> l = sum(mul(tape.param(p), tape.param(p)));
    tape.backward(l);
    return l.value()(0, 0);
  };
  const double first = loss();
  opt.step(store);
  for (int k = 0; k < 200; ++k) {
    loss();
    opt.step(store);
  }
  CHECK(loss() < 0.01 * first);
}
