#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "walkgen/graph.hpp"

namespace walkgen {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Per-vertex transition matrices M(v), rows/cols in the canonical star order
// of the vertex. Entry (j1, j2) is the amplitude for entering through j2 and
// leaving through j1.
class TransitionCollection {
 public:
  TransitionCollection() = default;
  // Throws ShapeMismatch when a matrix does not match deg(v).
  TransitionCollection(const MetricGraph& g, std::vector<Matrix> per_vertex);

  const Matrix& at(int v) const { return m_[v]; }
  Matrix& at(int v) { return m_[v]; }
  int size() const { return static_cast<int>(m_.size()); }

 private:
  std::vector<Matrix> m_;
};

struct TransitionFlags {
  bool stochastic = false;     // nonnegative entries, columns sum to 1
  bool combinatorial = false;  // every entry 0 or 1
  bool symmetric = false;
  bool hermitian = false;
  bool columns_equal = false;  // within each M(v) all columns coincide
};

TransitionFlags classify(const MetricGraph& g, const TransitionCollection& mc);

// max over v of the operator 2-norm of M(v).
double matrix_norm_max(const TransitionCollection& mc);

// The global transition matrix on K = K_E ⊕ K_I⁻ ⊕ K_I⁺: entry (h1, h2)
// equals M(v)_{j(h1), j(h2)} when both slots belong to the same vertex v and
// vanishes otherwise.
struct GlobalTransition {
  Matrix mat;  // (|E|+2|I|) × (|E|+2|I|)
};

GlobalTransition assemble_global(const MetricGraph& g, const TransitionCollection& mc);

// K-space slots of the star of v, aligned with the canonical star order.
std::vector<int> vertex_slots(const MetricGraph& g, int v);

}  // namespace walkgen
