#pragma once

// Internal dense-algebra helpers shared by the solver translation units.

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "walkgen/transition.hpp"

namespace walkgen::detail {

// Reciprocal condition estimate that stays honest on exactly singular
// inputs: Eigen's L1 estimator can report O(1) values when a pivot is zero,
// so combine it with the pivot ratio.
inline double lu_rcond(const Eigen::PartialPivLU<Matrix>& lu) {
  const auto& u = lu.matrixLU();
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double p = std::abs(u(i, i));
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  const double proxy = pmax > 0.0 ? pmin / pmax : 0.0;
  double est = lu.rcond();
  if (!std::isfinite(est)) est = 0.0;
  return std::min(est, proxy);
}

inline double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

}  // namespace walkgen::detail
