#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "walkgen/chain.hpp"

using namespace walkgen;
using namespace wgtest;

namespace {

// random nearest-neighbor chain on a connected simple graph
VertexChain random_chain(Rng& rng, int max_v = 6) {
  const int nv = unii(rng, 2, max_v);
  VertexChain chain;
  for (int v = 0; v < nv; ++v) chain.vertices.push_back("u" + std::to_string(v));
  std::vector<std::vector<int>> adj(nv);
  int next = 0;
  auto connect = [&](int a, int b) {
    chain.internal.push_back({"l" + std::to_string(next++), chain.vertices[a],
                              chain.vertices[b], 1.0});
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int v = 1; v < nv; ++v) connect(unii(rng, 0, v - 1), v);
  for (int extra = unii(rng, 0, 3); extra > 0; --extra) {
    const int a = unii(rng, 0, nv - 1);
    int b = unii(rng, 0, nv - 2);
    if (b >= a) ++b;
    bool exists = false;
    for (int w : adj[a]) exists |= (w == b);
    if (!exists) connect(a, b);
  }
  chain.p = Eigen::MatrixXd::Zero(nv, nv);
  for (int v = 0; v < nv; ++v) {
    double sum = 0.0;
    for (int w : adj[v]) {
      chain.p(w, v) = unif(rng, 0.1, 1.0);
      sum += chain.p(w, v);
    }
    chain.p.col(v) /= sum;
  }
  return chain;
}

}  // namespace

TEST_CASE("path chain punctured at one end") {
  VertexChain chain;
  chain.vertices = {"vinf", "u", "w"};
  chain.internal = {{"l0", "vinf", "u", 1.0}, {"l1", "u", "w", 1.0}};
  chain.p = Eigen::MatrixXd::Zero(3, 3);
  // columns: vinf -> u, u -> vinf/w evenly, w -> u
  chain.p(1, 0) = 1.0;
  chain.p(0, 1) = 0.5;
  chain.p(2, 1) = 0.5;
  chain.p(1, 2) = 1.0;

  EdgeModel em = chain_to_edge_model(chain, "vinf");
  CHECK(em.graph.vertex_count() == 2);
  CHECK(em.graph.internal_count() == 1);
  CHECK(em.graph.external_count() == 1);
  CHECK(classify(em.graph, em.matrices).columns_equal);
  CHECK(classify(em.graph, em.matrices).stochastic);
  // M(u) rows: external row carries P(vinf,u), internal row carries P(w,u)
  const int u = em.graph.vertex_index("u");
  CHECK(em.matrices.at(u)(0, 0) == cplx(0.5));
  CHECK(em.matrices.at(u)(1, 0) == cplx(0.5));

  VertexChain back = edge_model_to_chain(em.graph, em.matrices);
  REQUIRE(back.vertices.size() == 3);
  // u and w rows/cols restored exactly; v_inf column uniform over |E| = 1
  const auto idx = [&](const std::string& id) {
    for (size_t i = 0; i < back.vertices.size(); ++i)
      if (back.vertices[i] == id) return static_cast<int>(i);
    return -1;
  };
  CHECK(back.p(idx("w"), idx("u")) == 0.5);
  CHECK(back.p(idx("v_inf"), idx("u")) == 0.5);
  CHECK(back.p(idx("u"), idx("w")) == 1.0);
  CHECK(back.p(idx("u"), idx("v_inf")) == 1.0);
}

TEST_CASE("star chain punctured at the center leaves only trivial walks") {
  VertexChain chain;
  chain.vertices = {"c", "u0", "u1", "u2"};
  chain.internal = {{"l0", "c", "u0", 1.0}, {"l1", "c", "u1", 1.0},
                    {"l2", "c", "u2", 1.0}};
  chain.p = Eigen::MatrixXd::Zero(4, 4);
  for (int leaf = 1; leaf <= 3; ++leaf) {
    chain.p(leaf, 0) = 1.0 / 3.0;  // center spreads to leaves
    chain.p(0, leaf) = 1.0;        // leaves return to the center
  }
  EdgeModel em = chain_to_edge_model(chain, "c");
  CHECK(em.graph.internal_count() == 0);
  CHECK(em.graph.external_count() == 3);
  CHECK(em.graph.vertex_count() == 3);
  // every walk is trivial; T(0) is the external corner of the global matrix
  Matrix t = eval_T(em.graph, assemble_global(em.graph, em.matrices), 0.0).value;
  for (int c = 0; c < 3; ++c) CHECK(std::abs(t.col(c).sum() - 1.0) < 1e-14);
}

TEST_CASE("puncturing an unknown vertex fails") {
  VertexChain chain;
  chain.vertices = {"a", "b"};
  chain.internal = {{"l0", "a", "b", 1.0}};
  chain.p = Eigen::MatrixXd::Zero(2, 2);
  chain.p(1, 0) = 1.0;
  chain.p(0, 1) = 1.0;
  CHECK_THROWS_AS(chain_to_edge_model(chain, "zz"), Error);
}

TEST_CASE("segment edge model converts to a three-vertex chain") {
  MetricGraph g = seg_graph();
  // columns equal: at v0 rows (ep, i) = (0.3, 0.7); at v1 rows (e, i) = (0.6, 0.4)
  Matrix m0(2, 2), m1(2, 2);
  m0 << 0.3, 0.3, 0.7, 0.7;
  m1 << 0.6, 0.6, 0.4, 0.4;
  std::vector<Matrix> mats(2);
  mats[g.vertex_index("v0")] = m0;
  mats[g.vertex_index("v1")] = m1;
  TransitionCollection mc(g, std::move(mats));

  VertexChain chain = edge_model_to_chain(g, mc);
  REQUIRE(chain.vertices == std::vector<std::string>{"v0", "v1", "v_inf"});
  // P: from v0 the walker moves to v1 w.p. 0.7 and leaves w.p. 0.3
  CHECK(chain.p(1, 0) == 0.7);
  CHECK(chain.p(2, 0) == 0.3);
  CHECK(chain.p(0, 1) == 0.4);
  CHECK(chain.p(2, 1) == 0.6);
  CHECK(chain.p(0, 2) == 0.5);
  CHECK(chain.p(1, 2) == 0.5);
}

TEST_CASE("unequal columns are rejected") {
  MetricGraph g = seg_graph();
  SegWeights w = seg_stochastic();
  w.t0p = 0.3, w.r0p = 0.7;
  TransitionCollection mc = seg_collection(g, w);
  CHECK_THROWS_AS(edge_model_to_chain(g, mc), Error);
  try {
    edge_model_to_chain(g, mc);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::columns_not_equal);
  }
}

TEST_CASE("multi-edges are rejected in the reverse direction") {
  GraphSpec spec;
  spec.vertices = {"a", "b"};
  spec.internal = {{"i0", "a", "b", 1.0}, {"i1", "a", "b", 1.0}};
  spec.external = {{"e", "a"}};
  MetricGraph g = build_graph(spec);
  std::vector<Matrix> mats(2);
  for (int v = 0; v < 2; ++v) {
    const int d = g.degree(v);
    Matrix m(d, d);
    m.setConstant(1.0 / d);
    mats[v] = m;
  }
  TransitionCollection mc(g, std::move(mats));
  CHECK_THROWS_AS(edge_model_to_chain(g, mc), Error);
  try {
    edge_model_to_chain(g, mc);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::multi_edge);
  }
}

TEST_CASE("round trips restore the chain exactly") {
  Rng rng(163);
  for (int trial = 0; trial < 50; ++trial) {
    VertexChain chain = random_chain(rng);
    const int nv = static_cast<int>(chain.vertices.size());
    const std::string v_inf = chain.vertices[unii(rng, 0, nv - 1)];
    EdgeModel em = chain_to_edge_model(chain, v_inf);
    VertexChain back = edge_model_to_chain(em.graph, em.matrices);

    auto idx_in = [&](const std::vector<std::string>& ids, const std::string& id) {
      for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
      FAIL("missing vertex");
      return -1;
    };
    // entries not involving v_inf restore exactly
    for (const std::string& r : chain.vertices) {
      if (r == v_inf) continue;
      for (const std::string& c : chain.vertices) {
        if (c == v_inf) continue;
        const double orig = chain.p(idx_in(chain.vertices, r), idx_in(chain.vertices, c));
        const double got = back.p(idx_in(back.vertices, r), idx_in(back.vertices, c));
        CHECK(std::abs(orig - got) <= 1e-14);
      }
    }
    // the v_inf row restores, the v_inf column is uniform 1/|E|
    const int ne = em.graph.external_count();
    const int binf = idx_in(back.vertices, "v_inf");
    for (const std::string& r : chain.vertices) {
      if (r == v_inf) continue;
      const double orig = chain.p(idx_in(chain.vertices, v_inf), idx_in(chain.vertices, r));
      CHECK(std::abs(back.p(binf, idx_in(back.vertices, r)) - orig) <= 1e-14);
      const double col_inf = back.p(idx_in(back.vertices, r), binf);
      if (col_inf != 0.0) CHECK(col_inf == doctest::Approx(1.0 / ne).epsilon(1e-14));
    }
    // both directions preserve column-stochasticity
    for (int c = 0; c < static_cast<int>(back.vertices.size()); ++c)
      CHECK(std::abs(back.p.col(c).sum() - 1.0) <= 1e-14);
  }
}
