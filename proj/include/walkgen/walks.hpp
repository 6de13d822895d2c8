#pragma once

#include <map>
#include <vector>

#include "walkgen/transition.hpp"

namespace walkgen {

// A walk from one external line to another. Interior edges are internal
// lines; the trivial walk (no interior edges) exists when source and sink
// share their vertex. The vertex sequence is the unique consistent one.
struct Walk {
  int source = -1;            // external index
  int sink = -1;              // external index
  std::vector<int> edges;     // internal indices, in traversal order
  std::vector<int> vertices;  // edges.size()+1 vertex indices
  std::vector<int> score;     // per internal line, canonical order
  double metric_length = 0.0;

  int comb_length() const { return static_cast<int>(edges.size()); }
};

// All walks from source to sink with combinatorial length <= n_max, ordered
// by length and then lexicographically by edge id sequence.
std::vector<Walk> enumerate_walks(const MetricGraph& g, const std::string& source,
                                  const std::string& sink, int n_max);

Walk reverse_walk(const MetricGraph& g, const Walk& w);

// Product of transition entries along the walk; the trivial walk carries
// M(v)_{sink,source} at the shared vertex.
cplx walk_weight(const MetricGraph& g, const TransitionCollection& mc, const Walk& w);

struct WalkSeriesResult {
  Matrix value;               // E x E, entry (e, e') sums walks from e' to e
  int n_max = 0;
  double tail_bound = 0.0;    // +inf outside the convergent regime
  long long walk_count = 0;   // walks enumerated across all pairs
};

// Truncated series evaluation of T(beta) by exhaustive enumeration up to
// combinatorial length n_max. With relevant_only, zero-weight prefixes are
// pruned; the sum is unchanged and walk_count counts relevant walks only.
WalkSeriesResult series_T(const MetricGraph& g, const TransitionCollection& mc,
                          cplx beta, int n_max, bool relevant_only = false);

using Score = std::vector<int>;

// Score-resolved coefficients T(n) for one pair; keys present iff some walk
// with that score exists.
std::map<Score, cplx> score_coefficients(const MetricGraph& g,
                                         const TransitionCollection& mc,
                                         const std::string& source,
                                         const std::string& sink, int n_max);

// (1/a_min)(log max_v ||M(v)|| + log |I|); the series tail is finite for
// Re beta strictly above this. Throws NoInternalLines when I is empty.
double beta0_bound(const MetricGraph& g, const TransitionCollection& mc);

// Geometric tail sum_{N>n_max} m^{N+1} q^N with q = |I| e^{-re_beta a_min};
// +inf when m*q >= 1.
double series_tail_bound(double m, int internal_count, double a_min,
                         double re_beta, int n_max);

}  // namespace walkgen
