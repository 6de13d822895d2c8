#include "walkgen/chain.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace walkgen {

namespace {

constexpr double kTol = 1e-12;

std::map<std::string, int> index_of(const std::vector<std::string>& ids) {
  std::map<std::string, int> m;
  for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
    if (!m.emplace(ids[i], i).second) fail(Errc::duplicate_id, "vertex '" + ids[i] + "'");
  }
  return m;
}

}  // namespace

void validate_chain(const VertexChain& chain) {
  const int n = static_cast<int>(chain.vertices.size());
  const auto vidx = index_of(chain.vertices);
  if (chain.p.rows() != n || chain.p.cols() != n)
    fail(Errc::shape_mismatch, "P must be |V| x |V|");

  std::set<std::pair<int, int>> adjacent;
  std::set<std::string> line_ids;
  for (const auto& l : chain.internal) {
    auto from = vidx.find(l.from);
    auto to = vidx.find(l.to);
    if (from == vidx.end() || to == vidx.end())
      fail(Errc::dangling_reference, "line '" + l.id + "'");
    if (from->second == to->second) fail(Errc::tadpole_edge, "line '" + l.id + "'");
    if (!line_ids.insert(l.id).second) fail(Errc::duplicate_id, "line '" + l.id + "'");
    if (adjacent.count({from->second, to->second}))
      fail(Errc::multi_edge, "vertices '" + l.from + "' and '" + l.to +
                                 "' are joined by more than one line");
    adjacent.insert({from->second, to->second});
    adjacent.insert({to->second, from->second});
  }

  for (int c = 0; c < n; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < n; ++r) {
      const double x = chain.p(r, c);
      if (x < -kTol) fail(Errc::not_normalized, "negative entry in P");
      colsum += x;
      if (x > kTol && !adjacent.count({r, c}))
        fail(Errc::bad_file, "P couples non-adjacent vertices '" + chain.vertices[r] +
                                 "' and '" + chain.vertices[c] + "'");
    }
    if (std::abs(colsum - 1.0) > 1e-10)
      fail(Errc::not_normalized,
           "column of '" + chain.vertices[c] + "' sums to " + std::to_string(colsum));
  }
}

EdgeModel chain_to_edge_model(const VertexChain& chain, const std::string& v_inf) {
  validate_chain(chain);
  const auto vidx = index_of(chain.vertices);
  auto inf_it = vidx.find(v_inf);
  if (inf_it == vidx.end()) fail(Errc::unknown_vertex, "vertex '" + v_inf + "'");
  const int inf = inf_it->second;

  GraphSpec spec;
  for (const auto& v : chain.vertices)
    if (v != v_inf) spec.vertices.push_back(v);
  // Every line touching v_inf becomes an external line at its other end.
  for (const auto& l : chain.internal) {
    const double len = l.length > 0.0 ? l.length : 1.0;
    if (l.from == v_inf) {
      spec.external.push_back({l.id, l.to});
    } else if (l.to == v_inf) {
      spec.external.push_back({l.id, l.from});
    } else {
      spec.internal.push_back({l.id, l.from, l.to, len});
    }
  }

  MetricGraph g = [&] {
    try {
      return build_graph(spec);
    } catch (const Error& e) {
      if (e.code() == Errc::disconnected_graph)
        fail(Errc::isolated_remainder, e.what());
      throw;
    }
  }();

  // M(v)_{i,j} = P(across i, v), independent of the incoming column j.
  std::vector<Matrix> mats(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int vc = vidx.at(g.vertex_id(v));
    const int deg = g.degree(v);
    Matrix m(deg, deg);
    const auto& star = g.star(v);
    for (int r = 0; r < deg; ++r) {
      const int across = star[r].is_external
                             ? inf
                             : vidx.at(g.vertex_id(g.other_endpoint(star[r].edge, v)));
      m.row(r).setConstant(chain.p(across, vc));
    }
    mats[v] = std::move(m);
  }
  TransitionCollection mc(g, std::move(mats));
  return {std::move(g), std::move(mc)};
}

VertexChain edge_model_to_chain(const MetricGraph& g, const TransitionCollection& mc) {
  const TransitionFlags flags = classify(g, mc);
  if (!flags.columns_equal)
    fail(Errc::columns_not_equal, "the collection does not define a vertex chain");
  // column sums must be 1 (entries may be any nonnegative reals)
  for (int v = 0; v < g.vertex_count(); ++v) {
    const cplx s = mc.at(v).col(0).sum();
    if (std::abs(s.imag()) > kTol || std::abs(s.real() - 1.0) > 1e-10)
      fail(Errc::not_normalized, "columns at vertex '" + g.vertex_id(v) + "' sum to " +
                                     std::to_string(s.real()));
    for (int r = 0; r < g.degree(v); ++r)
      if (mc.at(v)(r, 0).real() < -kTol || std::abs(mc.at(v)(r, 0).imag()) > kTol)
        fail(Errc::not_normalized, "negative or complex entry at vertex '" +
                                       g.vertex_id(v) + "'");
  }
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < g.internal_count(); ++i) {
    auto key = std::minmax(g.internal(i).from, g.internal(i).to);
    if (!seen.insert({key.first, key.second}).second)
      fail(Errc::multi_edge, "vertices '" + g.vertex_id(key.first) + "' and '" +
                                 g.vertex_id(key.second) +
                                 "' are joined by more than one line");
  }

  VertexChain chain;
  chain.vertices = [&] {
    std::vector<std::string> ids;
    for (int v = 0; v < g.vertex_count(); ++v) ids.push_back(g.vertex_id(v));
    ids.push_back("v_inf");
    if (index_of(ids).size() != ids.size()) fail(Errc::duplicate_id, "v_inf");
    return ids;
  }();
  const int n = g.vertex_count() + 1;
  const int inf = n - 1;
  chain.p = Eigen::MatrixXd::Zero(n, n);

  for (const auto& l : g.to_spec().internal) chain.internal.push_back(l);
  for (int e = 0; e < g.external_count(); ++e)
    chain.internal.push_back(
        {g.external(e).id, g.vertex_id(g.external(e).at), "v_inf", 1.0});

  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& star = g.star(v);
    for (int r = 0; r < g.degree(v); ++r) {
      const double val = mc.at(v)(r, 0).real();
      if (star[r].is_external) {
        chain.p(inf, v) += val;
      } else {
        chain.p(g.other_endpoint(star[r].edge, v), v) += val;
      }
    }
  }
  // the uniform choice out of v_inf: one 1/|E| share per external line
  for (int e = 0; e < g.external_count(); ++e)
    chain.p(g.external(e).at, inf) += 1.0 / g.external_count();

  validate_chain(chain);
  return chain;
}

}  // namespace walkgen
