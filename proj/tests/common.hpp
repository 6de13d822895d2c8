#pragma once

// Shared fixtures for the test suites: the two-vertex segment graph, random
// graph/collection generators, and the directed enumeration oracle.

#include <random>
#include <vector>

#include "walkgen/genfun.hpp"
#include "walkgen/graph.hpp"
#include "walkgen/transition.hpp"
#include "walkgen/walks.hpp"

namespace wgtest {

using namespace walkgen;

// Segment graph: v0 --i(a)-- v1, source "ep" at v0, sink "e" at v1.
inline MetricGraph seg_graph(double a = 1.0) {
  GraphSpec spec;
  spec.vertices = {"v0", "v1"};
  spec.internal = {{"i", "v0", "v1", a}};
  spec.external = {{"e", "v1"}, {"ep", "v0"}};
  return build_graph(spec);
}

// Entries named as in the reflection/transmission picture:
//   M(v0) in order (ep, i) = [[r0, t0p], [t0, r0p]]
//   M(v1) in order (e, i)  = [[r1p, t1], [t1p, r1]]
struct SegWeights {
  cplx t0 = 1.0, r0 = 0.0, r0p = 1.0, t0p = 0.0;
  cplx t1 = 0.5, r1 = 0.5, t1p = 0.5, r1p = 0.5;
};

inline TransitionCollection seg_collection(const MetricGraph& g, const SegWeights& w) {
  Matrix m0(2, 2), m1(2, 2);
  m0 << w.r0, w.t0p, w.t0, w.r0p;
  m1 << w.r1p, w.t1, w.t1p, w.r1;
  std::vector<Matrix> mats(2);
  mats[g.vertex_index("v0")] = m0;
  mats[g.vertex_index("v1")] = m1;
  return TransitionCollection(g, std::move(mats));
}

// The stochastic instance used throughout: enter i for sure at v0, reflect
// for sure back at v0, exit or reflect with probability 1/2 at v1.
inline SegWeights seg_stochastic() { return SegWeights{}; }

using Rng = std::mt19937_64;

inline double unif(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int unii(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random connected graph with nv in [2, max_v], a spanning tree plus extra
// internal lines up to max_i total, and 1..max_e external lines.
inline MetricGraph random_graph(Rng& rng, int max_v = 4, int max_i = 6,
                                int max_e = 3, double len_lo = 0.8,
                                double len_hi = 1.5) {
  const int nv = unii(rng, 2, max_v);
  GraphSpec spec;
  for (int v = 0; v < nv; ++v) spec.vertices.push_back("v" + std::to_string(v));
  int next_edge = 0;
  auto add_line = [&](int a, int b) {
    spec.internal.push_back({"i" + std::to_string(next_edge++),
                             "v" + std::to_string(a), "v" + std::to_string(b),
                             unif(rng, len_lo, len_hi)});
  };
  for (int v = 1; v < nv; ++v) add_line(unii(rng, 0, v - 1), v);
  const int extra = unii(rng, 0, std::max(0, max_i - (nv - 1)));
  for (int k = 0; k < extra; ++k) {
    const int a = unii(rng, 0, nv - 1);
    int b = unii(rng, 0, nv - 2);
    if (b >= a) ++b;
    add_line(a, b);
  }
  const int ne = unii(rng, 1, max_e);
  for (int e = 0; e < ne; ++e)
    spec.external.push_back(
        {"e" + std::to_string(e), "v" + std::to_string(unii(rng, 0, nv - 1))});
  return build_graph(spec);
}

enum class Entries { generic, symmetric, hermitian, stochastic };

// Random collection with max_v ||M(v)|| <= norm_cap (exact rescale).
inline TransitionCollection random_collection(Rng& rng, const MetricGraph& g,
                                              Entries kind = Entries::generic,
                                              double norm_cap = 1.5) {
  std::vector<Matrix> mats(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int d = g.degree(v);
    Matrix m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = cplx(unif(rng, -1, 1), unif(rng, -1, 1));
    switch (kind) {
      case Entries::generic: break;
      case Entries::symmetric: m = 0.5 * (m + m.transpose()).eval(); break;
      case Entries::hermitian: m = 0.5 * (m + m.adjoint()).eval(); break;
      case Entries::stochastic: {
        for (int c = 0; c < d; ++c) {
          double sum = 0.0;
          for (int r = 0; r < d; ++r) {
            m(r, c) = -std::log(unif(rng, 1e-12, 1.0));
            sum += m(r, c).real();
          }
          m.col(c) /= sum;
        }
        break;
      }
    }
    if (kind != Entries::stochastic) {
      const double n = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
      if (n > norm_cap) m *= norm_cap / n;
    }
    mats[v] = std::move(m);
  }
  return TransitionCollection(g, std::move(mats));
}

// Directed series oracle: enumerate walks and apply the per-direction
// penalties (initial->terminal uses a, the reverse uses b). Independent of
// the coupling-matrix implementation path.
inline Matrix directed_series(const MetricGraph& g, const TransitionCollection& mc,
                              cplx beta, const std::vector<double>& a,
                              const std::vector<double>& b, int n_max) {
  const int ne = g.external_count();
  Matrix out = Matrix::Zero(ne, ne);
  for (int src = 0; src < ne; ++src) {
    for (int snk = 0; snk < ne; ++snk) {
      for (const Walk& w :
           enumerate_walks(g, g.external(src).id, g.external(snk).id, n_max)) {
        double penalty = 0.0;
        int v = g.external(src).at;
        for (int i : w.edges) {
          penalty += (v == g.internal(i).from) ? a[i] : b[i];
          v = g.other_endpoint(i, v);
        }
        out(snk, src) += walk_weight(g, mc, w) * std::exp(-beta * penalty);
      }
    }
  }
  return out;
}

}  // namespace wgtest
