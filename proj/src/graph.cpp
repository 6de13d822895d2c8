#include "walkgen/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace walkgen {

namespace {

int lookup(const std::map<std::string, int>& m, const std::string& id, Errc err,
           const char* what) {
  auto it = m.find(id);
  if (it == m.end()) fail(err, std::string(what) + " '" + id + "'");
  return it->second;
}

}  // namespace

int MetricGraph::vertex_index(const std::string& id) const {
  for (int v = 0; v < vertex_count(); ++v)
    if (vertices_[v] == id) return v;
  fail(Errc::unknown_vertex, "vertex '" + id + "'");
}

int MetricGraph::internal_index(const std::string& id) const {
  for (int i = 0; i < internal_count(); ++i)
    if (internal_[i].id == id) return i;
  fail(Errc::unknown_edge, "internal line '" + id + "'");
}

int MetricGraph::external_index(const std::string& id) const {
  for (int e = 0; e < external_count(); ++e)
    if (external_[e].id == id) return e;
  fail(Errc::unknown_edge, "external line '" + id + "'");
}

double MetricGraph::a_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : internal_) m = std::min(m, l.length);
  return m;
}

double MetricGraph::a_max() const {
  double m = 0.0;
  for (const auto& l : internal_) m = std::max(m, l.length);
  return m;
}

std::vector<double> MetricGraph::lengths() const {
  std::vector<double> a(internal_.size());
  for (size_t i = 0; i < internal_.size(); ++i) a[i] = internal_[i].length;
  return a;
}

int MetricGraph::slot_vertex(int slot) const {
  if (slot < external_count()) return external_[slot].at;
  slot -= external_count();
  if (slot < internal_count()) return internal_[slot].from;
  return internal_[slot - internal_count()].to;
}

GraphSpec MetricGraph::to_spec() const {
  GraphSpec spec;
  spec.vertices = vertices_;
  for (const auto& l : internal_)
    spec.internal.push_back({l.id, vertices_[l.from], vertices_[l.to], l.length});
  for (const auto& l : external_)
    spec.external.push_back({l.id, vertices_[l.at]});
  return spec;
}

MetricGraph build_graph(const GraphSpec& spec) {
  MetricGraph g;

  g.vertices_ = spec.vertices;
  std::sort(g.vertices_.begin(), g.vertices_.end());
  std::map<std::string, int> vidx;
  for (int v = 0; v < static_cast<int>(g.vertices_.size()); ++v) {
    if (!vidx.emplace(g.vertices_[v], v).second)
      fail(Errc::duplicate_id, "vertex '" + g.vertices_[v] + "'");
  }

  std::set<std::string> edge_ids;
  auto claim_edge_id = [&edge_ids](const std::string& id) {
    if (!edge_ids.insert(id).second)
      fail(Errc::duplicate_id, "edge '" + id + "'");
  };

  g.internal_.reserve(spec.internal.size());
  for (const auto& l : spec.internal) {
    claim_edge_id(l.id);
    InternalLine line;
    line.id = l.id;
    line.from = lookup(vidx, l.from, Errc::dangling_reference,
                       ("line '" + l.id + "' references vertex").c_str());
    line.to = lookup(vidx, l.to, Errc::dangling_reference,
                     ("line '" + l.id + "' references vertex").c_str());
    line.length = l.length;
    if (line.from == line.to)
      fail(Errc::tadpole_edge, "internal line '" + l.id + "'");
    if (!(line.length > 0.0) || !std::isfinite(line.length))
      fail(Errc::nonpositive_length, "internal line '" + l.id + "'");
    g.internal_.push_back(std::move(line));
  }
  std::sort(g.internal_.begin(), g.internal_.end(),
            [](const InternalLine& a, const InternalLine& b) { return a.id < b.id; });

  g.external_.reserve(spec.external.size());
  for (const auto& l : spec.external) {
    claim_edge_id(l.id);
    ExternalLine line;
    line.id = l.id;
    line.at = lookup(vidx, l.at, Errc::dangling_reference,
                     ("line '" + l.id + "' references vertex").c_str());
    g.external_.push_back(std::move(line));
  }
  std::sort(g.external_.begin(), g.external_.end(),
            [](const ExternalLine& a, const ExternalLine& b) { return a.id < b.id; });

  if (g.external_.empty())
    fail(Errc::no_external_lines, "a non-compact graph needs at least one external line");

  // Stars in canonical order: externals first, internals second, each sorted
  // by id (both lists are already sorted, so incidence order is canonical).
  const int nv = g.vertex_count();
  g.stars_.assign(nv, {});
  g.ext_star_pos_.assign(g.external_.size(), -1);
  g.int_star_pos_from_.assign(g.internal_.size(), -1);
  g.int_star_pos_to_.assign(g.internal_.size(), -1);
  for (int e = 0; e < g.external_count(); ++e)
    g.stars_[g.external_[e].at].push_back({true, e, false});
  for (int i = 0; i < g.internal_count(); ++i) {
    g.stars_[g.internal_[i].from].push_back({false, i, false});
    g.stars_[g.internal_[i].to].push_back({false, i, true});
  }
  for (int v = 0; v < nv; ++v) {
    for (int p = 0; p < static_cast<int>(g.stars_[v].size()); ++p) {
      const StarEntry& s = g.stars_[v][p];
      if (s.is_external) {
        g.ext_star_pos_[s.edge] = p;
      } else if (s.at_terminal) {
        g.int_star_pos_to_[s.edge] = p;
      } else {
        g.int_star_pos_from_[s.edge] = p;
      }
    }
    if (g.stars_[v].empty())
      fail(Errc::disconnected_graph, "vertex '" + g.vertices_[v] + "' has no incident edge");
  }

  // Connectivity: every internal-line component must carry at least one
  // external stub; the stubs all meet at the common point at infinity.
  std::vector<int> comp(nv, -1);
  int ncomp = 0;
  for (int v0 = 0; v0 < nv; ++v0) {
    if (comp[v0] >= 0) continue;
    std::vector<int> stack{v0};
    comp[v0] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const StarEntry& s : g.stars_[v]) {
        if (s.is_external) continue;
        int w = g.other_endpoint(s.edge, v);
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }
  if (ncomp > 1) {
    std::vector<bool> has_external(ncomp, false);
    for (const auto& l : g.external_) has_external[comp[l.at]] = true;
    for (int v = 0; v < nv; ++v) {
      if (!has_external[comp[v]])
        fail(Errc::disconnected_graph,
             "vertex '" + g.vertices_[v] + "' cannot reach an external line");
    }
  }

  return g;
}

std::vector<std::string> vertex_sequence(const MetricGraph& g,
                                         const std::vector<std::string>& edges) {
  if (edges.size() < 2)
    fail(Errc::not_a_walk, "a walk needs a source and a sink external line");
  const int source = g.external_index(edges.front());
  const int sink = g.external_index(edges.back());
  std::vector<int> interior;
  interior.reserve(edges.size() - 2);
  for (size_t k = 1; k + 1 < edges.size(); ++k)
    interior.push_back(g.internal_index(edges[k]));

  const int v0 = g.external(source).at;
  const int vn = g.external(sink).at;
  std::vector<int> seq{v0};
  if (interior.empty()) {
    if (v0 != vn)
      fail(Errc::not_a_walk, "trivial walk endpoints lie at different vertices");
  } else {
    int v = v0;
    for (size_t k = 0; k < interior.size(); ++k) {
      const InternalLine& line = g.internal(interior[k]);
      if (line.from != v && line.to != v)
        fail(Errc::not_a_walk,
             "line '" + line.id + "' is not incident with vertex '" + g.vertex_id(v) + "'");
      // Consecutive vertices differ, so each traversal flips the endpoint.
      v = g.other_endpoint(interior[k], v);
      seq.push_back(v);
    }
    if (v != vn)
      fail(Errc::not_a_walk, "sink external line is not incident with the final vertex");
  }

  std::vector<std::string> ids;
  ids.reserve(seq.size());
  for (int v : seq) ids.push_back(g.vertex_id(v));
  return ids;
}

}  // namespace walkgen
