#pragma once

#include <vector>

#include "walkgen/transition.hpp"
#include "walkgen/walks.hpp"

namespace walkgen {

// Boundary conditions (A, B) for the metric-graph Laplacian. Either built
// from a transition collection (block-local, A_v = (I-M(v))/2,
// B_v = -(I+M(v))/(2 beta)) or supplied explicitly as global matrices.
struct BoundaryConditions {
  Matrix a;  // d x d
  Matrix b;  // d x d
  // per-vertex blocks in canonical star order; empty for explicit input
  std::vector<Matrix> a_blocks;
  std::vector<Matrix> b_blocks;
  bool self_adjoint = false;  // A B^dagger self-adjoint to 1e-12
  bool from_m = false;
  double beta = 0.0;  // construction parameter when from_m

  bool has_blocks() const { return !a_blocks.empty(); }
};

BoundaryConditions bc_from_M(const MetricGraph& g, const TransitionCollection& mc,
                             double beta);

// Validates maximal rank of (A, B); flags self-adjointness of A B^dagger.
BoundaryConditions bc_explicit(const MetricGraph& g, Matrix a, Matrix b);

// Single-vertex scattering matrix -(A + ikB)^{-1}(A - ikB).
Matrix single_vertex_S(const Matrix& a, const Matrix& b, cplx k);

struct ScatterResult {
  Matrix s;         // E x E
  Matrix alpha;     // I x E interior amplitudes
  Matrix beta_amp;  // I x E
  cplx k;
  double unitarity_defect = 0.0;  // ||S^dagger S - I||_2
  double residual = 0.0;          // of the linear system, Frobenius
};

// Solves Z(k;A,B,a) [S; alpha; beta] = -(A - ikB)(I;0;0). On a singular but
// consistent Z the minimum-norm least-squares solution is returned; an
// irreducible residual raises InconsistentSystem.
ScatterResult solve_scattering(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k);
// Same with the internal lengths overridden (Fourier machinery).
ScatterResult solve_scattering(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k, const std::vector<double>& lengths);

// The collection {S_v(k)} of single-vertex scattering matrices; requires
// block-local boundary conditions.
TransitionCollection vertex_scattering(const MetricGraph& g,
                                       const BoundaryConditions& bc, cplx k);

// Walk-sum Fourier coefficient: sum over walks with the given score of the
// per-vertex scattering factors. Scores with a negative entry give 0.
Matrix fourier_walk_coefficient(const MetricGraph& g, const TransitionCollection& sv,
                                const std::vector<int>& score);
Matrix fourier_walk_coefficient(const MetricGraph& g, const BoundaryConditions& bc,
                                cplx k, const std::vector<int>& score);

struct FourierSeries {
  Matrix value;
  double tail_bound = 0.0;      // heuristic: sampled max ||S_v(k)||
  std::vector<Matrix> layers;   // contribution of each total score 0..n_max
};

// Partial sums of the combinatorial expansion
// sum_n S^_n(k) e^{ik<n,a>} truncated at |n| <= n_max.
FourierSeries fourier_series_S(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k, int n_max);

// Tensor trapezoid approximation of the Fourier coefficient integral over
// [0, 2 pi/k]^{|I|}; |I| <= 2, k > 0.
Matrix fourier_quadrature(const MetricGraph& g, const BoundaryConditions& bc,
                          double k, const std::vector<int>& score, int mesh);

}  // namespace walkgen
