#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "walkgen/families.hpp"

using namespace walkgen;
using namespace wgtest;

namespace {

std::vector<std::string> edge_ids(const MetricGraph& g, const Walk& w) {
  std::vector<std::string> ids;
  for (int i : w.edges) ids.push_back(g.internal(i).id);
  return ids;
}

long long factorial(int n) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

TEST_CASE("segment enumeration up to length 3") {
  MetricGraph g = seg_graph();
  auto walks = enumerate_walks(g, "ep", "e", 3);
  REQUIRE(walks.size() == 2);
  CHECK(edge_ids(g, walks[0]) == std::vector<std::string>{"i"});
  CHECK(edge_ids(g, walks[1]) == std::vector<std::string>{"i", "i", "i"});
  CHECK(walks[0].metric_length == 1.0);
  CHECK(walks[1].metric_length == 3.0);
  CHECK(walks[1].score == std::vector<int>{3});

  CHECK(enumerate_walks(g, "ep", "e", 0).empty());
}

TEST_CASE("one-external graph enumeration includes the shared-vertex trivial walk") {
  GraphSpec spec;
  spec.vertices = {"v0", "v1"};
  spec.internal = {{"i", "v0", "v1", 1.0}};
  spec.external = {{"e", "v0"}};
  MetricGraph g = build_graph(spec);
  auto walks = enumerate_walks(g, "e", "e", 2);
  REQUIRE(walks.size() == 2);
  CHECK(walks[0].comb_length() == 0);
  CHECK(edge_ids(g, walks[1]) == std::vector<std::string>{"i", "i"});
}

TEST_CASE("walk weights on the segment graph") {
  MetricGraph g = seg_graph();
  SegWeights w;
  w.t0 = cplx(0.3, 0.1), w.r0p = cplx(0.7, -0.2), w.t1 = cplx(0.5, 0.4), w.r1 = 0.25;
  TransitionCollection mc = seg_collection(g, w);
  auto walks = enumerate_walks(g, "ep", "e", 3);
  REQUIRE(walks.size() == 2);
  CHECK(std::abs(walk_weight(g, mc, walks[0]) - w.t1 * w.t0) < 1e-15);
  CHECK(std::abs(walk_weight(g, mc, walks[1]) - w.t1 * w.r0p * w.r1 * w.t0) < 1e-15);
}

TEST_CASE("trivial walk weight at a shared vertex") {
  GraphSpec spec;
  spec.vertices = {"v"};
  spec.external = {{"e0", "v"}, {"e1", "v"}};
  MetricGraph g = build_graph(spec);
  Matrix m(2, 2);
  m << cplx(0.1, 0), cplx(0.2, 0), cplx(0.3, 0), cplx(0.4, 0);
  TransitionCollection mc(g, {m});
  auto walks = enumerate_walks(g, "e1", "e0", 0);
  REQUIRE(walks.size() == 1);
  CHECK(walk_weight(g, mc, walks[0]) == cplx(0.2, 0));  // M_{e0,e1}
}

TEST_CASE("reversal preserves score and length and reverses vertices") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    MetricGraph g = random_graph(rng);
    const std::string src = g.external(0).id;
    const std::string snk = g.external(g.external_count() - 1).id;
    for (const Walk& w : enumerate_walks(g, src, snk, 4)) {
      Walk r = reverse_walk(g, w);
      CHECK(r.score == w.score);
      CHECK(r.metric_length == w.metric_length);
      std::vector<int> vs = w.vertices;
      std::reverse(vs.begin(), vs.end());
      CHECK(r.vertices == vs);
    }
  }
}

TEST_CASE("segment series against the closed geometric form") {
  MetricGraph g = seg_graph();
  TransitionCollection mc = seg_collection(g, seg_stochastic());
  const cplx beta(0.5, 0.0);
  WalkSeriesResult res = series_T(g, mc, beta, 81);
  const double x = std::exp(-0.5);
  const double expect = 0.5 * x / (1.0 - 0.5 * x * x);
  const int e = g.external_index("e");
  const int ep = g.external_index("ep");
  CHECK(res.tail_bound < 1e-4);
  CHECK(std::abs(res.value(e, ep) - expect) <= res.tail_bound);
}

TEST_CASE("zero collection sums to zero but still enumerates") {
  MetricGraph g = seg_graph();
  std::vector<Matrix> zeros = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  TransitionCollection mc(g, std::move(zeros));
  WalkSeriesResult res = series_T(g, mc, 0.0, 5);
  CHECK(res.value.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.walk_count > 0);
}

TEST_CASE("catalan counts at beta=0 with exact truncation") {
  auto [g, mc] = make_family(Family::catalan, 4);
  WalkSeriesResult res = series_T(g, mc, 0.0, 8, /*relevant_only=*/true);
  const int e = g.external_index("e");
  const int ep = g.external_index("ep");
  CHECK(res.value(e, ep).real() == doctest::Approx(14.0).epsilon(1e-12));
  CHECK(std::abs(res.value(e, e)) == 0.0);
  CHECK(std::abs(res.value(ep, e)) == 0.0);
  CHECK(std::abs(res.value(ep, ep)) == 0.0);
  CHECK(res.walk_count == 14);  // number of relevant walks
}

TEST_CASE("score coefficients on the segment graph") {
  MetricGraph g = seg_graph();
  SegWeights w = seg_stochastic();
  TransitionCollection mc = seg_collection(g, w);

  auto to_e = score_coefficients(g, mc, "ep", "e", 5);
  CHECK(to_e.count({1}));
  CHECK(to_e.count({3}));
  CHECK_FALSE(to_e.count({2}));
  CHECK(std::abs(to_e.at({1}) - w.t1 * w.t0) < 1e-15);
  CHECK(std::abs(to_e.at({3}) - w.t1 * w.r0p * w.r1 * w.t0) < 1e-15);

  auto back = score_coefficients(g, mc, "ep", "ep", 5);
  // the trivial walk exists at the shared vertex; its weight is r0
  CHECK(back.count({0}));
  CHECK(std::abs(back.at({0}) - w.r0) < 1e-15);
  CHECK(back.count({2}));
  CHECK(std::abs(back.at({2}) - w.t0p * w.r1 * w.t0) < 1e-15);
}

TEST_CASE("walk count per score respects the multinomial bound") {
  Rng rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    MetricGraph g = random_graph(rng, 4, 5, 2);
    TransitionCollection mc = random_collection(rng, g);
    auto coeff = score_coefficients(g, mc, g.external(0).id, g.external(0).id, 4);
    for (const auto& [score, value] : coeff) {
      int total = 0;
      long long denom = 1;
      for (int c : score) {
        total += c;
        denom *= factorial(c);
      }
      // count walks with this exact score by enumeration
      long long count = 0;
      for (const Walk& w : enumerate_walks(g, g.external(0).id, g.external(0).id, total))
        if (w.score == score) ++count;
      CHECK(count >= 1);
      CHECK(count <= factorial(total) / denom);
    }
  }
}

TEST_CASE("beta0 bound") {
  MetricGraph g = seg_graph();
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  TransitionCollection unit(g, {swap, swap});
  CHECK(beta0_bound(g, unit) == doctest::Approx(0.0));

  auto [gf, mcf] = make_family(Family::catalan, 4);
  const double m = matrix_norm_max(mcf);
  CHECK(beta0_bound(gf, mcf) == doctest::Approx(std::log(m) + std::log(30.0)));

  GraphSpec spec;
  spec.vertices = {"v"};
  spec.external = {{"e0", "v"}};
  MetricGraph g0 = build_graph(spec);
  TransitionCollection mc0(g0, {Matrix::Identity(1, 1)});
  CHECK_THROWS_AS(beta0_bound(g0, mc0), Error);
}

TEST_CASE("series tail is finite above the bound and controls truncation error") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    MetricGraph g = random_graph(rng, 3, 4, 2);
    TransitionCollection mc = random_collection(rng, g);
    const double b0 = beta0_bound(g, mc);
    const double beta = std::max(b0, 0.0) + 2.0;
    WalkSeriesResult coarse = series_T(g, mc, beta, 4);
    WalkSeriesResult fine = series_T(g, mc, beta, 10);
    CHECK(std::isfinite(coarse.tail_bound));
    CHECK(((fine.value - coarse.value).cwiseAbs().maxCoeff() <= coarse.tail_bound));
  }
}

TEST_CASE("time reversal: symmetric collections give symmetric partial sums") {
  Rng rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    MetricGraph g = random_graph(rng);
    TransitionCollection mc = random_collection(rng, g, Entries::symmetric);
    WalkSeriesResult res = series_T(g, mc, cplx(0.7, 0.3), 6);
    CHECK((res.value - res.value.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("monotonicity in beta for stochastic collections") {
  Rng rng(23);
  MetricGraph g = random_graph(rng);
  TransitionCollection mc = random_collection(rng, g, Entries::stochastic);
  WalkSeriesResult lo = series_T(g, mc, 0.2, 8);
  WalkSeriesResult hi = series_T(g, mc, 0.9, 8);
  for (int r = 0; r < g.external_count(); ++r)
    for (int c = 0; c < g.external_count(); ++c)
      CHECK(hi.value(r, c).real() <= lo.value(r, c).real() + 1e-15);
}

TEST_CASE("large-beta limit approaches the boundary weights") {
  Rng rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    MetricGraph g = random_graph(rng);
    TransitionCollection mc = random_collection(rng, g);
    const double beta = 40.0 / g.a_min();
    WalkSeriesResult res = series_T(g, mc, beta, 3);
    const double m = matrix_norm_max(mc);
    Matrix boundary = Matrix::Zero(g.external_count(), g.external_count());
    for (int e = 0; e < g.external_count(); ++e)
      for (int ep = 0; ep < g.external_count(); ++ep)
        if (g.external(e).at == g.external(ep).at)
          boundary(e, ep) = mc.at(g.external(e).at)(
              g.star_position_external(e), g.star_position_external(ep));
    const double bound = res.tail_bound +
                         g.external_count() * g.external_count() * m * m *
                             std::exp(-beta * g.a_min());
    CHECK((res.value - boundary).cwiseAbs().maxCoeff() <= bound);
  }
}
