#include "walkgen/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace walkgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Depth-first traversal of the walk state machine. The visitor is called
// once per completed walk with (sink index, edge stack, weight product,
// metric length). Weights multiply transition entries right-to-left along
// the walk, matching M(v)_{out,in}.
template <typename Visit>
void walk_dfs(const MetricGraph& g, const TransitionCollection& mc, int source,
              int n_max, bool relevant_only, Visit&& visit) {
  std::vector<int> edges;
  edges.reserve(n_max);

  // (vertex, incoming star position, weight so far, length so far)
  auto step = [&](auto&& self, int v, int pos_in, cplx weight, double length,
                  int depth) -> void {
    const Matrix& m = mc.at(v);
    const auto& star = g.star(v);
    for (int p = 0; p < static_cast<int>(star.size()); ++p) {
      const cplx w = m(p, pos_in) * weight;
      if (star[p].is_external) {
        visit(star[p].edge, edges, w, length);
      } else if (depth < n_max) {
        if (relevant_only && w == cplx(0.0)) continue;
        const int i = star[p].edge;
        const int u = g.other_endpoint(i, v);
        edges.push_back(i);
        self(self, u, g.star_position_internal(i, u == g.internal(i).to),
             w, length + g.internal(i).length, depth + 1);
        edges.pop_back();
      }
    }
  };

  const int v0 = g.external(source).at;
  step(step, v0, g.star_position_external(source), cplx(1.0), 0.0, 0);
}

}  // namespace

std::vector<Walk> enumerate_walks(const MetricGraph& g, const std::string& source,
                                  const std::string& sink, int n_max) {
  const int src = g.external_index(source);
  const int snk = g.external_index(sink);
  if (n_max < 0) fail(Errc::bad_argument, "n_max must be nonnegative");

  // Enumeration needs no weights; feed an all-ones collection.
  std::vector<Matrix> ones(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v)
    ones[v] = Matrix::Ones(g.degree(v), g.degree(v));
  TransitionCollection unit(g, std::move(ones));

  std::vector<Walk> out;
  walk_dfs(g, unit, src, n_max, false,
           [&](int exit, const std::vector<int>& edges, cplx, double length) {
             if (exit != snk) return;
             Walk w;
             w.source = src;
             w.sink = snk;
             w.edges = edges;
             w.metric_length = length;
             w.score.assign(g.internal_count(), 0);
             for (int i : edges) ++w.score[i];
             w.vertices.push_back(g.external(src).at);
             int v = g.external(src).at;
             for (int i : edges) {
               v = g.other_endpoint(i, v);
               w.vertices.push_back(v);
             }
             out.push_back(std::move(w));
           });

  std::stable_sort(out.begin(), out.end(), [&](const Walk& a, const Walk& b) {
    if (a.comb_length() != b.comb_length()) return a.comb_length() < b.comb_length();
    for (int k = 0; k < a.comb_length(); ++k) {
      const std::string& ia = g.internal(a.edges[k]).id;
      const std::string& ib = g.internal(b.edges[k]).id;
      if (ia != ib) return ia < ib;
    }
    return false;
  });
  return out;
}

Walk reverse_walk(const MetricGraph& g, const Walk& w) {
  (void)g;
  Walk r = w;
  std::swap(r.source, r.sink);
  std::reverse(r.edges.begin(), r.edges.end());
  std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

cplx walk_weight(const MetricGraph& g, const TransitionCollection& mc, const Walk& w) {
  if (w.edges.empty())
    return mc.at(g.external(w.sink).at)(g.star_position_external(w.sink),
                                        g.star_position_external(w.source));
  cplx acc = 1.0;
  int v = g.external(w.source).at;
  int pos_in = g.star_position_external(w.source);
  for (int i : w.edges) {
    const int pos_out = g.star_position_internal(i, v == g.internal(i).to);
    acc *= mc.at(v)(pos_out, pos_in);
    v = g.other_endpoint(i, v);
    pos_in = g.star_position_internal(i, v == g.internal(i).to);
  }
  acc *= mc.at(v)(g.star_position_external(w.sink), pos_in);
  return acc;
}

WalkSeriesResult series_T(const MetricGraph& g, const TransitionCollection& mc,
                          cplx beta, int n_max, bool relevant_only) {
  if (n_max < 0) fail(Errc::bad_argument, "n_max must be nonnegative");
  WalkSeriesResult res;
  res.n_max = n_max;
  res.value = Matrix::Zero(g.external_count(), g.external_count());
  for (int src = 0; src < g.external_count(); ++src) {
    walk_dfs(g, mc, src, n_max, relevant_only,
             [&](int exit, const std::vector<int>&, cplx weight, double length) {
               if (relevant_only && weight == cplx(0.0)) return;
               res.value(exit, src) += weight * std::exp(-beta * length);
               ++res.walk_count;
             });
  }
  res.tail_bound = series_tail_bound(matrix_norm_max(mc), g.internal_count(),
                                     g.a_min(), beta.real(), n_max);
  return res;
}

std::map<Score, cplx> score_coefficients(const MetricGraph& g,
                                         const TransitionCollection& mc,
                                         const std::string& source,
                                         const std::string& sink, int n_max) {
  const int src = g.external_index(source);
  const int snk = g.external_index(sink);
  std::map<Score, cplx> out;
  Score score(g.internal_count(), 0);
  walk_dfs(g, mc, src, n_max, false,
           [&](int exit, const std::vector<int>& edges, cplx weight, double) {
             if (exit != snk) return;
             std::fill(score.begin(), score.end(), 0);
             for (int i : edges) ++score[i];
             out[score] += weight;
           });
  return out;
}

double beta0_bound(const MetricGraph& g, const TransitionCollection& mc) {
  if (g.internal_count() == 0)
    fail(Errc::no_internal_lines, "T is a finite sum; the bound is meaningless");
  return (std::log(matrix_norm_max(mc)) + std::log(double(g.internal_count()))) /
         g.a_min();
}

double series_tail_bound(double m, int internal_count, double a_min,
                         double re_beta, int n_max) {
  if (internal_count == 0 || m == 0.0) return 0.0;
  const double q = internal_count * std::exp(-re_beta * a_min);
  const double r = m * q;
  if (!(r < 1.0)) return kInf;
  // sum_{N > n_max} m^{N+1} q^N = m r^{n_max+1} / (1-r)
  return m * std::pow(r, n_max + 1) / (1.0 - r);
}

}  // namespace walkgen
