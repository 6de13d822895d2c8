#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "walkgen/genfun.hpp"

namespace walkgen {

// Random-walk mean values, computed from the closed form and its analytic
// derivatives. Every op conditions on walks from source e' to sink e and
// throws ZeroDenominator when the corresponding T entry vanishes (no
// relevant walks) and SingularD on the singular set.

cplx mean_length(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                 const std::string& e, const std::string& ep);

// Mean number of transitions from edge k0 to edge j0 at vertex v0. A zero
// transition entry gives mean 0 by convention.
cplx mean_transitions(const MetricGraph& g, const TransitionCollection& mc,
                      cplx beta, const std::string& e, const std::string& ep,
                      const std::string& v0, const std::string& j0,
                      const std::string& k0);

cplx mean_reflections(const MetricGraph& g, const TransitionCollection& mc,
                      cplx beta, const std::string& e, const std::string& ep,
                      const std::string& v0);

cplx mean_visits(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                 const std::string& e, const std::string& ep, const std::string& v0);

// Mean number of traversals of internal line i0 (either direction). At
// beta = 0 the length-scaling derivative degenerates and the value is
// computed from the endpoint transition sums instead.
cplx mean_traversals(const MetricGraph& g, const TransitionCollection& mc,
                     cplx beta, const std::string& i0, const std::string& e,
                     const std::string& ep);

enum class MeanKind { length, transitions, reflections, visits, traversals };

struct MeanTarget {
  MeanKind kind = MeanKind::length;
  std::string v0, j0, k0;  // transitions/reflections/visits
  std::string i0;          // traversals
};

enum class Bullet { source, sink, both };

// T-weighted aggregates over exits (fixed source), sources (fixed sink) or
// both. fixed names the held external line; ignored for Bullet::both.
cplx mean_aggregate(const MetricGraph& g, const TransitionCollection& mc,
                    cplx beta, const MeanTarget& target, Bullet mode,
                    const std::string& fixed = "");

// Full per-pair tables for the CLI; entries where T vanishes are NaN.
Matrix t_values(const MetricGraph& g, const TransitionCollection& mc, cplx beta);
Matrix mean_values(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                   const MeanTarget& target);

// --- Monte Carlo ---------------------------------------------------------

struct Estimate {
  double value = 0.0;
  double se = 0.0;  // standard error; 0 for degenerate estimators
};

struct SimOptions {
  std::string source;
  double beta = 0.0;
  long long samples = 0;
  long long step_cap = 1000000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::array<std::string, 3>> probes;  // (v0, j0, k0) transitions
};

struct SimResult {
  long long samples = 0;
  long long censored = 0;  // walks cut at step_cap, excluded from the means
  std::vector<long long> exit_counts;           // per external line
  std::vector<Estimate> exit_probability;       // per external line
  std::vector<Estimate> t_functional;           // E[e^{-beta|w|} ; exit=e]
  std::vector<Estimate> mean_length;            // per exit, weight-conditioned
  std::vector<std::vector<Estimate>> visits;        // [exit][vertex]
  std::vector<std::vector<Estimate>> reflections;   // [exit][vertex]
  std::vector<std::vector<Estimate>> traversals;    // [exit][internal]
  std::vector<std::vector<Estimate>> probes;        // [exit][probe]
};

// Samples walks by the edge Markov procedure; requires a stochastic
// collection. Deterministic for fixed (options, thread count).
SimResult simulate(const MetricGraph& g, const TransitionCollection& mc,
                   const SimOptions& options);

}  // namespace walkgen
