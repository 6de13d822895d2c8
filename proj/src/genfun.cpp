#include "walkgen/genfun.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "dense.hpp"

namespace walkgen {

namespace {

void check_penalties(const MetricGraph& g, const std::vector<double>& a,
                     const char* name) {
  if (static_cast<int>(a.size()) != g.internal_count())
    fail(Errc::shape_mismatch, std::string("penalty vector ") + name +
                                   " must have one entry per internal line");
  for (double x : a)
    if (!(x > 0.0) || !std::isfinite(x))
      fail(Errc::nonpositive_length, std::string("penalty vector ") + name);
}

GenFunResult solve_closed(const MetricGraph& g, const GlobalTransition& big,
                          const Coupling& cpl) {
  const int d = g.k_dim();
  const int ne = g.external_count();
  if (big.mat.rows() != d) fail(Errc::shape_mismatch, "global matrix dimension");

  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(d, d) - cpl.k);
  GenFunResult res;
  res.method = GenFunMethod::closed;
  res.rcond = detail::lu_rcond(lu);
  if (!(res.rcond >= 1e-14))
    fail(Errc::singular_d, "I-K(beta) is numerically singular, rcond=" +
                               std::to_string(res.rcond));
  res.value = lu.solve(big.mat.leftCols(ne)).topRows(ne);
  return res;
}

}  // namespace

Coupling coupling(const MetricGraph& g, const GlobalTransition& big, cplx beta,
                  const std::vector<double>* a, const std::vector<double>* b) {
  const int d = g.k_dim();
  if (big.mat.rows() != d || big.mat.cols() != d)
    fail(Errc::shape_mismatch, "global matrix dimension");
  std::vector<double> av = a ? *a : g.lengths();
  check_penalties(g, av, "a");
  const std::vector<double>* bv = b ? b : &av;
  if (b) check_penalties(g, *bv, "b");

  Coupling c;
  c.beta = beta;
  c.gh = Matrix::Zero(d, d);
  for (int i = 0; i < g.internal_count(); ++i) {
    // initial -> terminal hop decays with a_i, the reverse hop with b_i
    c.gh(g.slot_plus(i), g.slot_minus(i)) = std::exp(-beta * av[i]);
    c.gh(g.slot_minus(i), g.slot_plus(i)) = std::exp(-beta * (*bv)[i]);
  }
  c.k = big.mat * c.gh;
  return c;
}

GenFunResult eval_T(const MetricGraph& g, const GlobalTransition& big, cplx beta) {
  return solve_closed(g, big, coupling(g, big, beta));
}

GenFunResult eval_T_directed(const MetricGraph& g, const GlobalTransition& big,
                             cplx beta, const std::vector<double>& a,
                             const std::vector<double>& b) {
  return solve_closed(g, big, coupling(g, big, beta, &a, &b));
}

GenFunResult neumann_T(const MetricGraph& g, const GlobalTransition& big,
                       cplx beta, int terms) {
  if (terms < 0) fail(Errc::bad_argument, "terms must be nonnegative");
  const int ne = g.external_count();
  const Coupling cpl = coupling(g, big, beta);

  GenFunResult res;
  res.method = GenFunMethod::neumann;
  Matrix r = big.mat.leftCols(ne);  // K^n M (I 0 0)^T
  res.value = r.topRows(ne);
  for (int n = 1; n <= terms; ++n) {
    r = cpl.k * r;
    res.value += r.topRows(ne);
  }

  const double q = cpl.k.size() == 0 ? 0.0
                                     : Eigen::JacobiSVD<Matrix>(cpl.k).singularValues()(0);
  const double m = Eigen::JacobiSVD<Matrix>(big.mat).singularValues()(0);
  res.tail_bound = q < 1.0 ? m * std::pow(q, terms + 1) / (1.0 - q)
                           : std::numeric_limits<double>::infinity();
  return res;
}

Matrix d_matrix(const MetricGraph& g, const GlobalTransition& big, cplx beta) {
  if (g.internal_count() > 0 && beta.real() * g.a_max() > 700.0)
    fail(Errc::exp_overflow, "e^{+beta a} exceeds the double exponent range");
  const int d = g.k_dim();
  const int ne = g.external_count();
  const int ni = g.internal_count();

  // X and Y of the boundary-value pencil at k = i beta.
  Matrix x = Matrix::Zero(d, d);
  Matrix y = Matrix::Zero(d, d);
  x.topLeftCorner(ne, ne).setIdentity();
  y.topLeftCorner(ne, ne).setIdentity();
  for (int i = 0; i < ni; ++i) {
    const cplx decay = std::exp(-beta * g.internal(i).length);
    const cplx grow = std::exp(beta * g.internal(i).length);
    const int sm = g.slot_minus(i), sp = g.slot_plus(i);
    x(sm, sm) = 1.0;
    x(sm, sp) = 1.0;
    x(sp, sm) = decay;
    x(sp, sp) = grow;
    y(sm, sm) = 1.0;
    y(sm, sp) = -1.0;
    y(sp, sm) = -decay;
    y(sp, sp) = grow;
  }
  return 0.5 * (x + y) - 0.5 * (big.mat * (x - y));
}

}  // namespace walkgen
