#include "walkgen/transition.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace walkgen {

namespace {
constexpr double kFlagTol = 1e-12;
}

TransitionCollection::TransitionCollection(const MetricGraph& g,
                                           std::vector<Matrix> per_vertex)
    : m_(std::move(per_vertex)) {
  if (static_cast<int>(m_.size()) != g.vertex_count())
    fail(Errc::shape_mismatch, "expected one matrix per vertex");
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int d = g.degree(v);
    if (m_[v].rows() != d || m_[v].cols() != d)
      fail(Errc::shape_mismatch,
           "matrix at vertex '" + g.vertex_id(v) + "' is not " + std::to_string(d) +
               "x" + std::to_string(d));
  }
}

TransitionFlags classify(const MetricGraph& g, const TransitionCollection& mc) {
  TransitionFlags f;
  f.stochastic = true;
  f.combinatorial = true;
  f.symmetric = true;
  f.hermitian = true;
  f.columns_equal = true;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const Matrix& m = mc.at(v);
    const int d = static_cast<int>(m.rows());
    for (int c = 0; c < d; ++c) {
      cplx colsum = 0.0;
      for (int r = 0; r < d; ++r) {
        const cplx x = m(r, c);
        colsum += x;
        if (std::abs(x.imag()) > kFlagTol || x.real() < -kFlagTol) f.stochastic = false;
        if (std::min(std::abs(x), std::abs(x - 1.0)) > kFlagTol) f.combinatorial = false;
        if (std::abs(x - m(c, r)) > kFlagTol) f.symmetric = false;
        if (std::abs(x - std::conj(m(c, r))) > kFlagTol) f.hermitian = false;
        if (c > 0 && std::abs(x - m(r, 0)) > kFlagTol) f.columns_equal = false;
      }
      if (std::abs(colsum - 1.0) > 1e-10) f.stochastic = false;
    }
  }
  return f;
}

double matrix_norm_max(const TransitionCollection& mc) {
  double m = 0.0;
  for (int v = 0; v < mc.size(); ++v) {
    if (mc.at(v).size() == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(mc.at(v));
    m = std::max(m, svd.singularValues()(0));
  }
  return m;
}

std::vector<int> vertex_slots(const MetricGraph& g, int v) {
  const auto& star = g.star(v);
  std::vector<int> slots(star.size());
  for (size_t p = 0; p < star.size(); ++p) {
    const StarEntry& s = star[p];
    if (s.is_external) {
      slots[p] = g.slot_external(s.edge);
    } else {
      slots[p] = s.at_terminal ? g.slot_plus(s.edge) : g.slot_minus(s.edge);
    }
  }
  return slots;
}

GlobalTransition assemble_global(const MetricGraph& g, const TransitionCollection& mc) {
  if (mc.size() != g.vertex_count())
    fail(Errc::shape_mismatch, "collection does not match the graph");
  GlobalTransition big;
  big.mat = Matrix::Zero(g.k_dim(), g.k_dim());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const std::vector<int> slots = vertex_slots(g, v);
    const Matrix& m = mc.at(v);
    for (size_t r = 0; r < slots.size(); ++r)
      for (size_t c = 0; c < slots.size(); ++c)
        big.mat(slots[r], slots[c]) = m(r, c);
  }
  return big;
}

}  // namespace walkgen
