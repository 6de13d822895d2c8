#include "walkgen/scattering.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

#include "dense.hpp"

namespace walkgen {

namespace {

// X(k;a) and Y(k;a) of the boundary-value pencil.
void pencil_xy(const MetricGraph& g, cplx k, const std::vector<double>& a,
               Matrix& x, Matrix& y) {
  const int d = g.k_dim();
  const int ne = g.external_count();
  x = Matrix::Zero(d, d);
  y = Matrix::Zero(d, d);
  x.topLeftCorner(ne, ne).setIdentity();
  y.topLeftCorner(ne, ne).setIdentity();
  const cplx iu(0.0, 1.0);
  for (int i = 0; i < g.internal_count(); ++i) {
    const cplx ep = std::exp(iu * k * a[i]);
    const cplx em = std::exp(-iu * k * a[i]);
    const int sm = g.slot_minus(i), sp = g.slot_plus(i);
    x(sm, sm) = 1.0;
    x(sm, sp) = 1.0;
    x(sp, sm) = ep;
    x(sp, sp) = em;
    y(sm, sm) = 1.0;
    y(sm, sp) = -1.0;
    y(sp, sm) = -ep;
    y(sp, sp) = em;
  }
}

ScatterResult solve_at(const MetricGraph& g, const BoundaryConditions& bc, cplx k,
                       const std::vector<double>& a) {
  if (k == cplx(0.0)) fail(Errc::bad_argument, "k must be nonzero");
  if (static_cast<int>(a.size()) != g.internal_count())
    fail(Errc::shape_mismatch, "length vector");
  const int d = g.k_dim();
  const int ne = g.external_count();
  const int ni = g.internal_count();
  const cplx iu(0.0, 1.0);

  Matrix x, y;
  pencil_xy(g, k, a, x, y);
  const Matrix z = bc.a * x + iu * k * (bc.b * y);
  const Matrix rhs = -(bc.a - iu * k * bc.b).leftCols(ne);

  // Rank-revealing minimum-norm least squares; on the singular set this
  // realizes the kernel-orthogonal solution.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(z);
  const Matrix sol = cod.solve(rhs);

  ScatterResult res;
  res.k = k;
  res.residual = (z * sol - rhs).norm();
  const double scale = rhs.norm() + z.norm() * sol.norm();
  if (res.residual > 1e-8 * (scale + 1.0))
    fail(Errc::inconsistent_system,
         "scattering system residual " + std::to_string(res.residual));
  res.s = sol.topRows(ne);
  res.alpha = sol.middleRows(ne, ni);
  res.beta_amp = sol.bottomRows(ni);
  res.unitarity_defect = detail::op_norm(res.s.adjoint() * res.s - Matrix::Identity(ne, ne));
  return res;
}

}  // namespace

BoundaryConditions bc_from_M(const MetricGraph& g, const TransitionCollection& mc,
                             double beta) {
  if (!(beta > 0.0)) fail(Errc::bad_argument, "beta must be positive");
  const GlobalTransition big = assemble_global(g, mc);
  const int d = g.k_dim();

  BoundaryConditions bc;
  bc.from_m = true;
  bc.beta = beta;
  bc.a = 0.5 * (Matrix::Identity(d, d) - big.mat);
  bc.b = -(0.5 / beta) * (Matrix::Identity(d, d) + big.mat);
  bc.a_blocks.resize(g.vertex_count());
  bc.b_blocks.resize(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int deg = g.degree(v);
    bc.a_blocks[v] = 0.5 * (Matrix::Identity(deg, deg) - mc.at(v));
    bc.b_blocks[v] = -(0.5 / beta) * (Matrix::Identity(deg, deg) + mc.at(v));
  }

  // Ker A ∩ Ker B = {0} holds by construction; keep the assertion.
  Matrix ab(d, 2 * d);
  ab << bc.a, bc.b;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ab);
  if (cod.rank() < d) fail(Errc::rank_deficient, "(A,B) lost maximal rank");

  const Matrix ab_dag = bc.a * bc.b.adjoint();
  bc.self_adjoint = (ab_dag - ab_dag.adjoint()).cwiseAbs().maxCoeff() <=
                    1e-12 * (1.0 + ab_dag.cwiseAbs().maxCoeff());
  return bc;
}

BoundaryConditions bc_explicit(const MetricGraph& g, Matrix a, Matrix b) {
  const int d = g.k_dim();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
    fail(Errc::shape_mismatch, "boundary condition matrices must be " +
                                   std::to_string(d) + "x" + std::to_string(d));
  BoundaryConditions bc;
  bc.a = std::move(a);
  bc.b = std::move(b);
  Matrix ab(d, 2 * d);
  ab << bc.a, bc.b;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ab);
  if (cod.rank() < d) fail(Errc::rank_deficient, "(A,B) does not have maximal rank");
  const Matrix ab_dag = bc.a * bc.b.adjoint();
  bc.self_adjoint = (ab_dag - ab_dag.adjoint()).cwiseAbs().maxCoeff() <=
                    1e-12 * (1.0 + ab_dag.cwiseAbs().maxCoeff());
  return bc;
}

Matrix single_vertex_S(const Matrix& a, const Matrix& b, cplx k) {
  const cplx iu(0.0, 1.0);
  Eigen::PartialPivLU<Matrix> lu(a + iu * k * b);
  if (!(detail::lu_rcond(lu) >= 1e-14))
    fail(Errc::singular_pencil, "A + ikB is numerically singular");
  return -lu.solve(a - iu * k * b);
}

ScatterResult solve_scattering(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k) {
  return solve_at(g, bc, k, g.lengths());
}

ScatterResult solve_scattering(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k, const std::vector<double>& lengths) {
  return solve_at(g, bc, k, lengths);
}

TransitionCollection vertex_scattering(const MetricGraph& g,
                                       const BoundaryConditions& bc, cplx k) {
  if (!bc.has_blocks())
    fail(Errc::bad_argument,
         "per-vertex scattering needs block-local boundary conditions");
  std::vector<Matrix> sv(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v)
    sv[v] = single_vertex_S(bc.a_blocks[v], bc.b_blocks[v], k);
  return TransitionCollection(g, std::move(sv));
}

Matrix fourier_walk_coefficient(const MetricGraph& g, const TransitionCollection& sv,
                                const std::vector<int>& score) {
  const int ne = g.external_count();
  Matrix out = Matrix::Zero(ne, ne);
  if (static_cast<int>(score.size()) != g.internal_count())
    fail(Errc::shape_mismatch, "score vector");
  int total = 0;
  for (int c : score) {
    if (c < 0) return out;  // coefficients with a negative entry vanish
    total += c;
  }

  // Depth-first over walks with the exact score; remaining[] prunes.
  std::vector<int> remaining = score;
  auto step = [&](auto&& self, int src, int v, int pos_in, cplx weight,
                  int depth) -> void {
    const Matrix& m = sv.at(v);
    const auto& star = g.star(v);
    for (int p = 0; p < static_cast<int>(star.size()); ++p) {
      const cplx w = m(p, pos_in) * weight;
      if (star[p].is_external) {
        if (depth == total) out(star[p].edge, src) += w;
      } else {
        const int i = star[p].edge;
        if (remaining[i] == 0) continue;
        --remaining[i];
        const int u = g.other_endpoint(i, v);
        self(self, src, u, g.star_position_internal(i, u == g.internal(i).to), w,
             depth + 1);
        ++remaining[i];
      }
    }
  };
  for (int src = 0; src < ne; ++src)
    step(step, src, g.external(src).at, g.star_position_external(src), cplx(1.0), 0);
  return out;
}

Matrix fourier_walk_coefficient(const MetricGraph& g, const BoundaryConditions& bc,
                                cplx k, const std::vector<int>& score) {
  return fourier_walk_coefficient(g, vertex_scattering(g, bc, k), score);
}

FourierSeries fourier_series_S(const MetricGraph& g, const BoundaryConditions& bc,
                               cplx k, int n_max) {
  if (n_max < 0) fail(Errc::bad_argument, "n_max must be nonnegative");
  const TransitionCollection sv = vertex_scattering(g, bc, k);
  const int ne = g.external_count();
  const cplx iu(0.0, 1.0);

  FourierSeries out;
  out.layers.assign(n_max + 1, Matrix::Zero(ne, ne));

  // One DFS per source accumulates every score layer at once; the phase
  // factor e^{ik a_i} is picked up per traversal.
  auto step = [&](auto&& self, int src, int v, int pos_in, cplx weight,
                  int depth) -> void {
    const Matrix& m = sv.at(v);
    const auto& star = g.star(v);
    for (int p = 0; p < static_cast<int>(star.size()); ++p) {
      const cplx w = m(p, pos_in) * weight;
      if (star[p].is_external) {
        out.layers[depth](star[p].edge, src) += w;
      } else if (depth < n_max) {
        const int i = star[p].edge;
        const int u = g.other_endpoint(i, v);
        self(self, src, u, g.star_position_internal(i, u == g.internal(i).to),
             w * std::exp(iu * k * g.internal(i).length), depth + 1);
      }
    }
  };
  for (int src = 0; src < ne; ++src)
    step(step, src, g.external(src).at, g.star_position_external(src), cplx(1.0), 0);

  out.value = Matrix::Zero(ne, ne);
  for (const Matrix& l : out.layers) out.value += l;

  // Heuristic geometric tail from the sampled vertex factor bound.
  double c = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) c = std::max(c, detail::op_norm(sv.at(v)));
  out.tail_bound = g.internal_count() == 0
                       ? 0.0
                       : series_tail_bound(c, g.internal_count(), g.a_min(),
                                           k.imag(), n_max);
  return out;
}

Matrix fourier_quadrature(const MetricGraph& g, const BoundaryConditions& bc,
                          double k, const std::vector<int>& score, int mesh) {
  const int ni = g.internal_count();
  if (ni > 2) fail(Errc::too_many_internal_lines, "quadrature supports |I| <= 2");
  if (!(k > 0.0)) fail(Errc::bad_argument, "k must be positive");
  if (mesh < 1) fail(Errc::bad_argument, "mesh must be positive");
  if (static_cast<int>(score.size()) != ni) fail(Errc::shape_mismatch, "score vector");

  const int ne = g.external_count();
  const double period = 2.0 * std::numbers::pi / k;
  const cplx iu(0.0, 1.0);

  Matrix acc = Matrix::Zero(ne, ne);
  std::vector<double> a(ni, 0.0);
  std::vector<int> idx(ni, 0);
  const long long nodes = ni == 0 ? 1 : [&] {
    long long t = 1;
    for (int i = 0; i < ni; ++i) t *= mesh;
    return t;
  }();
  for (long long node = 0; node < nodes; ++node) {
    long long rest = node;
    double phase = 0.0;
    for (int i = 0; i < ni; ++i) {
      idx[i] = static_cast<int>(rest % mesh);
      rest /= mesh;
      a[i] = period * idx[i] / mesh;
      phase += score[i] * a[i];
    }
    Matrix s;
    try {
      s = solve_at(g, bc, k, a).s;
    } catch (const Error&) {
      // singular node; nudge off the singular point
      std::vector<double> ap = a;
      for (double& x : ap) x += 1e-9 * period;
      s = solve_at(g, bc, k, ap).s;
    }
    acc += s * std::exp(-iu * k * phase);
  }
  double weight = 1.0;
  for (int i = 0; i < ni; ++i) weight /= mesh;
  return acc * weight;
}

}  // namespace walkgen
