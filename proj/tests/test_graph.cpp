#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "common.hpp"
#include "walkgen/families.hpp"

using namespace walkgen;
using wgtest::seg_graph;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::bad_argument;
}

}  // namespace

TEST_CASE("segment graph builds and validates") {
  MetricGraph g = seg_graph();
  CHECK(g.vertex_count() == 2);
  CHECK(g.internal_count() == 1);
  CHECK(g.external_count() == 2);
  CHECK(g.degree(g.vertex_index("v0")) == 2);
  CHECK(g.degree(g.vertex_index("v1")) == 2);
  CHECK(g.a_min() == 1.0);
  CHECK(g.k_dim() == 4);
}

TEST_CASE("build_graph rejects invalid specs") {
  GraphSpec tadpole;
  tadpole.vertices = {"v0", "v1"};
  tadpole.internal = {{"i", "v0", "v0", 1.0}};
  tadpole.external = {{"e", "v1"}};
  CHECK(code_of([&] { build_graph(tadpole); }) == Errc::tadpole_edge);

  GraphSpec neg;
  neg.vertices = {"v0", "v1"};
  neg.internal = {{"i", "v0", "v1", -2.0}};
  neg.external = {{"e", "v0"}};
  CHECK(code_of([&] { build_graph(neg); }) == Errc::nonpositive_length);

  GraphSpec dangling;
  dangling.vertices = {"v0"};
  dangling.external = {{"e", "vX"}};
  CHECK(code_of([&] { build_graph(dangling); }) == Errc::dangling_reference);

  // compact component that cannot reach an external line
  GraphSpec disconnected;
  disconnected.vertices = {"v0", "v1", "v2", "v3"};
  disconnected.internal = {{"i0", "v0", "v1", 1.0},
                           {"i1", "v2", "v3", 1.0},
                           {"i2", "v3", "v2", 1.0}};
  disconnected.external = {{"e", "v0"}};
  CHECK(code_of([&] { build_graph(disconnected); }) == Errc::disconnected_graph);

  GraphSpec compact;
  compact.vertices = {"v0", "v1"};
  compact.internal = {{"i", "v0", "v1", 1.0}};
  CHECK(code_of([&] { build_graph(compact); }) == Errc::no_external_lines);

  GraphSpec dup;
  dup.vertices = {"v0", "v1"};
  dup.internal = {{"x", "v0", "v1", 1.0}};
  dup.external = {{"x", "v0"}};
  CHECK(code_of([&] { build_graph(dup); }) == Errc::duplicate_id);
}

TEST_CASE("multi-edges and shared external vertices are allowed") {
  GraphSpec spec;
  spec.vertices = {"v0", "v1"};
  spec.internal = {{"i0", "v0", "v1", 1.0}, {"i1", "v0", "v1", 2.0}};
  spec.external = {{"e0", "v0"}, {"e1", "v0"}};
  MetricGraph g = build_graph(spec);
  CHECK(g.degree(g.vertex_index("v0")) == 4);
  CHECK(g.a_min() == 1.0);
  CHECK(g.a_max() == 2.0);
}

TEST_CASE("canonical star order: externals first, then internals, by id") {
  GraphSpec spec;
  spec.vertices = {"u", "w"};
  spec.internal = {{"ib", "u", "w", 1.0}, {"ia", "w", "u", 1.0}};
  spec.external = {{"zz", "u"}, {"aa", "u"}};
  MetricGraph g = build_graph(spec);
  const auto& star = g.star(g.vertex_index("u"));
  REQUIRE(star.size() == 4);
  CHECK(star[0].is_external);
  CHECK(g.external(star[0].edge).id == "aa");
  CHECK(g.external(star[1].edge).id == "zz");
  CHECK_FALSE(star[2].is_external);
  CHECK(g.internal(star[2].edge).id == "ia");
  CHECK(g.internal(star[2].edge).to == g.vertex_index("u"));
  CHECK(star[2].at_terminal);
  CHECK(g.internal(star[3].edge).id == "ib");
}

TEST_CASE("vertex_sequence on the segment graph") {
  MetricGraph g = seg_graph();
  CHECK(vertex_sequence(g, {"ep", "i", "e"}) == std::vector<std::string>{"v0", "v1"});
  CHECK(vertex_sequence(g, {"ep", "i", "i", "ep"}) ==
        std::vector<std::string>{"v0", "v1", "v0"});
}

TEST_CASE("vertex_sequence matches the one-external example") {
  GraphSpec spec;
  spec.vertices = {"v0", "v1"};
  spec.internal = {{"i", "v0", "v1", 1.0}};
  spec.external = {{"e", "v0"}};
  MetricGraph g = build_graph(spec);
  CHECK(code_of([&] { vertex_sequence(g, {"e", "i", "e"}); }) == Errc::not_a_walk);
  CHECK(vertex_sequence(g, {"e", "i", "i", "e"}) ==
        std::vector<std::string>{"v0", "v1", "v0"});
}

TEST_CASE("first theorem of graph theory") {
  wgtest::Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    MetricGraph g = wgtest::random_graph(rng);
    int degsum = 0;
    for (int v = 0; v < g.vertex_count(); ++v) degsum += g.degree(v);
    CHECK(degsum == g.external_count() + 2 * g.internal_count());
  }
}

TEST_CASE("staircase family graph has the pinned size") {
  auto [g, mc] = make_family(Family::catalan, 4);
  CHECK(g.vertex_count() == 15);
  CHECK(g.internal_count() == 30);
  CHECK(g.external_count() == 2);
  for (int i = 0; i < g.internal_count(); ++i) CHECK(g.internal(i).length == 1.0);
  // lines run from the lexicographically smaller endpoint
  for (int i = 0; i < g.internal_count(); ++i)
    CHECK(g.vertex_id(g.internal(i).from) < g.vertex_id(g.internal(i).to));
  const TransitionFlags flags = classify(g, mc);
  CHECK(flags.combinatorial);
  CHECK_FALSE(flags.stochastic);
}

TEST_CASE("square family graph carries both diagonal directions") {
  auto [g, mc] = make_family(Family::dyck, 2);
  CHECK(g.vertex_count() == 9);
  // rows 6 + cols 6 + diag 4 + antidiag 4
  CHECK(g.internal_count() == 20);
  CHECK(classify(g, mc).combinatorial);
}

TEST_CASE("family order must be positive") {
  CHECK(code_of([] { make_family(Family::motzkin, 0); }) == Errc::bad_argument);
}
