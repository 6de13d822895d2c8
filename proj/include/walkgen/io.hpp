#pragma once

#include <optional>
#include <string>
#include <utility>

#include "walkgen/chain.hpp"
#include "walkgen/transition.hpp"

namespace walkgen {

// Graph description files (JSON):
//   { "vertices": ["v0", ...],
//     "internal": [{"id","from","to","length"}, ...],
//     "external": [{"id","at"}, ...],
//     "matrices": { "<vertex>": {"order": [edge ids],
//                                "entries": [[x, ...], ...]}, ... } }
// Matrix entries are [re, im] pairs; a bare number means imaginary part 0.
// `order` may be any permutation of the star; entries are re-permuted into
// canonical star order on load. Round-trips are bit-exact apart from float
// formatting (17 significant digits).

struct LoadedGraph {
  MetricGraph graph;
  std::optional<TransitionCollection> matrices;
};

LoadedGraph parse_graph_json(const std::string& text);
LoadedGraph load_graph_file(const std::string& path);
std::string graph_to_json(const MetricGraph& g,
                          const TransitionCollection* mc = nullptr);
void save_graph_file(const std::string& path, const MetricGraph& g,
                     const TransitionCollection* mc = nullptr);

// Chain files (JSON):
//   { "vertices": [...], "internal": [{"id","from","to"[,"length"]}, ...],
//     "order": [vertex ids],            // optional, defaults to `vertices`
//     "P": [[col-stochastic rows]] }
VertexChain parse_chain_json(const std::string& text);
VertexChain load_chain_file(const std::string& path);
std::string chain_to_json(const VertexChain& chain);
void save_chain_file(const std::string& path, const VertexChain& chain);

// Boundary-condition files: { "A": [[...]], "B": [[...]] } with [re, im]
// entries, dimension (|E|+2|I|) squared in the K-slot order.
std::pair<Matrix, Matrix> load_bc_file(const std::string& path, int dim);

}  // namespace walkgen
