#pragma once

#include <vector>

#include "walkgen/transition.hpp"

namespace walkgen {

// One-hop coupling K(beta) = M * G * H(i beta; a). G swaps the two internal
// slot blocks; H carries the decaying penalty exponentials. The directed
// variant G * H(i beta; a, b) puts e^{-beta a_i} on the hop from the initial
// to the terminal endpoint of line i and e^{-beta b_i} on the reverse hop.
struct Coupling {
  Matrix gh;  // G*H, d x d
  Matrix k;   // M * gh
  cplx beta;
};

Coupling coupling(const MetricGraph& g, const GlobalTransition& big, cplx beta,
                  const std::vector<double>* a = nullptr,
                  const std::vector<double>* b = nullptr);

enum class GenFunMethod { closed, neumann, series };

struct GenFunResult {
  Matrix value;  // E x E
  GenFunMethod method = GenFunMethod::closed;
  double rcond = 0.0;       // reciprocal condition estimate of I-K (closed)
  double tail_bound = 0.0;  // remainder bound (neumann)
};

// Closed-form generating function T(beta) = (I 0 0)(I-K)^{-1} M (I 0 0)^T,
// by one LU solve with |E| right-hand sides. Throws SingularD when I-K is
// numerically singular (rcond < 1e-14).
GenFunResult eval_T(const MetricGraph& g, const GlobalTransition& big, cplx beta);

// Directed-penalty variant; with b == a it coincides with eval_T.
GenFunResult eval_T_directed(const MetricGraph& g, const GlobalTransition& big,
                             cplx beta, const std::vector<double>& a,
                             const std::vector<double>& b);

// Truncated Neumann series sum_{n<=terms} (I 0 0) K^n M (I 0 0)^T with the
// remainder bound m q^{terms+1}/(1-q), q = ||K||_2.
GenFunResult neumann_T(const MetricGraph& g, const GlobalTransition& big,
                       cplx beta, int terms);

// The full matrix D(beta) = (1/2)(X+Y) - (1/2) M (X-Y) at k = i beta,
// including the growing exponentials; provided for inspection and tests.
// Satisfies D(beta) = (I - K(beta)) U(i beta; a). Throws Overflow when
// Re(beta) * max(a) exceeds the double exponent range.
Matrix d_matrix(const MetricGraph& g, const GlobalTransition& big, cplx beta);

}  // namespace walkgen
