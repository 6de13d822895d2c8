#pragma once

#include <string>
#include <vector>

#include "walkgen/error.hpp"

namespace walkgen {

struct InternalLineSpec {
  std::string id;
  std::string from;
  std::string to;
  double length = 1.0;
};

struct ExternalLineSpec {
  std::string id;
  std::string at;
};

// Plain description of a graph as it appears in input files.
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<InternalLineSpec> internal;
  std::vector<ExternalLineSpec> external;
};

struct InternalLine {
  std::string id;
  int from = -1;  // initial vertex index
  int to = -1;    // terminal vertex index
  double length = 1.0;
};

struct ExternalLine {
  std::string id;
  int at = -1;
};

// One incident edge in a vertex star. Canonical star order: external lines
// first, then internal lines, each group sorted by edge id.
struct StarEntry {
  bool is_external = false;
  int edge = -1;             // index into externals or internals
  bool at_terminal = false;  // internal only: this vertex is the terminal end
};

// A finite non-compact metric graph: vertices, directed internal lines with
// positive lengths, and half-infinite external lines. Immutable after
// construction; all queries are safe for concurrent readers.
//
// K-space slot layout (dimension |E| + 2|I|): external lines sorted by id,
// then internal lines (initial-endpoint slots) sorted by id, then internal
// lines (terminal-endpoint slots) in the same order.
class MetricGraph {
 public:
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int internal_count() const { return static_cast<int>(internal_.size()); }
  int external_count() const { return static_cast<int>(external_.size()); }

  const std::string& vertex_id(int v) const { return vertices_[v]; }
  const InternalLine& internal(int i) const { return internal_[i]; }
  const ExternalLine& external(int e) const { return external_[e]; }

  int vertex_index(const std::string& id) const;    // throws UnknownVertex
  int internal_index(const std::string& id) const;  // throws UnknownEdge
  int external_index(const std::string& id) const;  // throws UnknownEdge

  const std::vector<StarEntry>& star(int v) const { return stars_[v]; }
  int degree(int v) const { return static_cast<int>(stars_[v].size()); }

  // Position of an edge within the canonical star order of its vertex.
  int star_position_external(int e) const { return ext_star_pos_[e]; }
  int star_position_internal(int i, bool at_terminal) const {
    return at_terminal ? int_star_pos_to_[i] : int_star_pos_from_[i];
  }

  int other_endpoint(int i, int v) const {
    return internal_[i].from == v ? internal_[i].to : internal_[i].from;
  }

  double a_min() const;
  double a_max() const;
  std::vector<double> lengths() const;

  // K-space dimension and slots.
  int k_dim() const { return external_count() + 2 * internal_count(); }
  int slot_external(int e) const { return e; }
  int slot_minus(int i) const { return external_count() + i; }
  int slot_plus(int i) const { return external_count() + internal_count() + i; }
  // Owning vertex v(h) of a slot.
  int slot_vertex(int slot) const;

  GraphSpec to_spec() const;

  friend MetricGraph build_graph(const GraphSpec& spec);

 private:
  std::vector<std::string> vertices_;
  std::vector<InternalLine> internal_;
  std::vector<ExternalLine> external_;
  std::vector<std::vector<StarEntry>> stars_;
  std::vector<int> ext_star_pos_;
  std::vector<int> int_star_pos_from_;
  std::vector<int> int_star_pos_to_;
};

// Validates and builds a graph: no tadpoles, positive finite lengths, no
// dangling references, unique ids, at least one external line, and
// connectivity (every internal-line component must reach an external line;
// external lines count as stubs to a common point at infinity).
MetricGraph build_graph(const GraphSpec& spec);

// The unique vertex sequence of a candidate walk given as the full edge id
// sequence {source external, internal..., sink external}. Throws NotAWalk
// when no consistent sequence exists.
std::vector<std::string> vertex_sequence(const MetricGraph& g,
                                         const std::vector<std::string>& edges);

}  // namespace walkgen
