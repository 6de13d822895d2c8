#pragma once

#include <string>
#include <vector>

#include "walkgen/transition.hpp"

namespace walkgen {

// A vertex-state Markov chain on a compact graph: column-stochastic P with
// support on adjacent vertex pairs, rows/cols in the order of `vertices`.
struct VertexChain {
  std::vector<std::string> vertices;
  std::vector<InternalLineSpec> internal;  // lengths optional, default 1
  Eigen::MatrixXd p;
};

// Column sums 1, nonnegative entries, support restricted to adjacency,
// tadpole-free lines. Throws NotNormalized / BadFile on violations.
void validate_chain(const VertexChain& chain);

struct EdgeModel {
  MetricGraph graph;
  TransitionCollection matrices;
};

// Puncture the chain at v_inf: lines incident with v_inf become external
// lines at their other endpoint, and M(v)_{i,j} = P(across(i), v) for every
// column j (columns equal by construction).
EdgeModel chain_to_edge_model(const VertexChain& chain, const std::string& v_inf);

// Rebuild the chain from a columns-equal stochastic edge model: externals
// re-attach to a fresh vertex v_inf and P(.,v_inf) spreads 1/|E| per
// external line. Requires at most one internal line per vertex pair.
VertexChain edge_model_to_chain(const MetricGraph& g, const TransitionCollection& mc);

}  // namespace walkgen
