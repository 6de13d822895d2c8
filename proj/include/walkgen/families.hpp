#pragma once

#include <string>
#include <utility>

#include "walkgen/transition.hpp"

namespace walkgen {

// Lattice counting families. catalan and schroeder live on the staircase
// region 0 <= x2 <= x1 <= n with source at (0,0) and sink at (n,n);
// dyck and motzkin live on the full square 0 <= x1, x2 <= n with source at
// (0,0) and sink at (n,0). All internal lines have unit length and the
// per-vertex matrices are 0/1, built from the family step set.
enum class Family { catalan, schroeder, dyck, motzkin };

Family parse_family(const std::string& name);
const char* family_name(Family f);

struct FamilyInstance {
  MetricGraph graph;
  TransitionCollection matrices;
};

FamilyInstance make_family(Family f, int n);

}  // namespace walkgen
