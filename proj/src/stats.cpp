#include "walkgen/stats.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "dense.hpp"

namespace walkgen {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool negligible(cplx t, double scale) { return std::abs(t) <= 1e-12 * (1.0 + scale); }

struct Derivative {
  Matrix t;   // E x E
  Matrix dt;  // E x E
};

// T and its directional derivative for the perturbation (dK, dM):
// dT = sel [ (I-K)^{-1} dK (I-K)^{-1} M + (I-K)^{-1} dM ] sel.
Derivative derivative(const MetricGraph& g, const GlobalTransition& big, cplx beta,
                      const Matrix* dk, const Matrix* dm) {
  const int d = g.k_dim();
  const int ne = g.external_count();
  const Coupling cpl = coupling(g, big, beta);
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(d, d) - cpl.k);
  if (!(detail::lu_rcond(lu) >= 1e-14))
    fail(Errc::singular_d, "I-K(beta) is numerically singular");

  Derivative out;
  const Matrix r = lu.solve(big.mat.leftCols(ne));
  out.t = r.topRows(ne);
  Matrix rhs = Matrix::Zero(d, ne);
  if (dk) rhs += *dk * r;
  if (dm) rhs += dm->leftCols(ne);
  out.dt = lu.solve(rhs).topRows(ne);
  return out;
}

// dK/dbeta: every decay factor e^{-beta a} picks up -a.
Matrix dk_beta(const MetricGraph& g, const GlobalTransition& big, cplx beta) {
  const int d = g.k_dim();
  Matrix dgh = Matrix::Zero(d, d);
  for (int i = 0; i < g.internal_count(); ++i) {
    const double a = g.internal(i).length;
    const cplx v = -a * std::exp(-beta * a);
    dgh(g.slot_plus(i), g.slot_minus(i)) = v;
    dgh(g.slot_minus(i), g.slot_plus(i)) = v;
  }
  return big.mat * dgh;
}

// dK/dmu for a_{i0} -> a_{i0} e^{mu}: only the i0 factors move.
Matrix dk_edge_scale(const MetricGraph& g, const GlobalTransition& big, cplx beta,
                     int i0) {
  const int d = g.k_dim();
  Matrix dgh = Matrix::Zero(d, d);
  const double a = g.internal(i0).length;
  const cplx v = -beta * a * std::exp(-beta * a);
  dgh(g.slot_plus(i0), g.slot_minus(i0)) = v;
  dgh(g.slot_minus(i0), g.slot_plus(i0)) = v;
  return big.mat * dgh;
}

Matrix gh_of(const MetricGraph& g, const GlobalTransition& big, cplx beta) {
  return coupling(g, big, beta).gh;
}

// -dM for scaling a set of entries of the v0 block by e^{-lambda}.
enum class BlockPart { single, full, diagonal, row_slots };

Matrix dm_block(const MetricGraph& g, const GlobalTransition& big, int v0,
                BlockPart part, int h1 = -1, int h2 = -1,
                const std::vector<int>* rows = nullptr) {
  const int d = g.k_dim();
  Matrix dm = Matrix::Zero(d, d);
  switch (part) {
    case BlockPart::single:
      dm(h1, h2) = -big.mat(h1, h2);
      break;
    case BlockPart::full:
      for (int r : vertex_slots(g, v0))
        for (int c : vertex_slots(g, v0)) dm(r, c) = -big.mat(r, c);
      break;
    case BlockPart::diagonal:
      for (int r : vertex_slots(g, v0)) dm(r, r) = -big.mat(r, r);
      break;
    case BlockPart::row_slots:
      for (int r : *rows)
        for (int c : vertex_slots(g, g.slot_vertex(r)))
          dm(r, c) = -big.mat(r, c);
      break;
  }
  return dm;
}

int star_slot(const MetricGraph& g, int v, const std::string& edge_id) {
  // slot in K of the edge as seen from vertex v; the edge must be incident
  for (const StarEntry& s : g.star(v)) {
    if (s.is_external) {
      if (g.external(s.edge).id == edge_id) return g.slot_external(s.edge);
    } else {
      if (g.internal(s.edge).id == edge_id)
        return s.at_terminal ? g.slot_plus(s.edge) : g.slot_minus(s.edge);
    }
  }
  fail(Errc::unknown_edge,
       "edge '" + edge_id + "' is not incident with vertex '" + g.vertex_id(v) + "'");
}

struct Pack {
  Derivative d;
  cplx scale = 1.0;  // mean = -scale * dT/T
};

Pack mean_pack(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
               const MeanTarget& target) {
  const GlobalTransition big = assemble_global(g, mc);
  Pack p;
  switch (target.kind) {
    case MeanKind::length: {
      const Matrix dk = dk_beta(g, big, beta);
      p.d = derivative(g, big, beta, &dk, nullptr);
      break;
    }
    case MeanKind::transitions: {
      const int v0 = g.vertex_index(target.v0);
      const int h1 = star_slot(g, v0, target.j0);
      const int h2 = star_slot(g, v0, target.k0);
      const Matrix dm = dm_block(g, big, v0, BlockPart::single, h1, h2);
      const Matrix dk = dm * gh_of(g, big, beta);
      p.d = derivative(g, big, beta, &dk, &dm);
      break;
    }
    case MeanKind::reflections: {
      const int v0 = g.vertex_index(target.v0);
      const Matrix dm = dm_block(g, big, v0, BlockPart::diagonal);
      const Matrix dk = dm * gh_of(g, big, beta);
      p.d = derivative(g, big, beta, &dk, &dm);
      break;
    }
    case MeanKind::visits: {
      const int v0 = g.vertex_index(target.v0);
      const Matrix dm = dm_block(g, big, v0, BlockPart::full);
      const Matrix dk = dm * gh_of(g, big, beta);
      p.d = derivative(g, big, beta, &dk, &dm);
      break;
    }
    case MeanKind::traversals: {
      const int i0 = g.internal_index(target.i0);
      if (beta == cplx(0.0)) {
        // The mu-derivative carries a factor beta; at beta = 0 count the
        // entries into i0 at both endpoints instead (same mean, exact).
        std::vector<int> rows = {g.slot_minus(i0), g.slot_plus(i0)};
        const Matrix dm =
            dm_block(g, big, -1, BlockPart::row_slots, -1, -1, &rows);
        const Matrix dk = dm * gh_of(g, big, beta);
        p.d = derivative(g, big, beta, &dk, &dm);
      } else {
        const Matrix dk = dk_edge_scale(g, big, beta, i0);
        p.d = derivative(g, big, beta, &dk, nullptr);
        p.scale = 1.0 / (beta * g.internal(i0).length);
      }
      break;
    }
  }
  return p;
}

cplx pair_mean(const MetricGraph& g, const Pack& p, const std::string& e,
               const std::string& ep) {
  const int row = g.external_index(e);
  const int col = g.external_index(ep);
  const cplx t = p.d.t(row, col);
  if (negligible(t, p.d.t.cwiseAbs().maxCoeff()))
    fail(Errc::zero_denominator, "T[" + e + "," + ep + "] vanishes");
  return -p.scale * p.d.dt(row, col) / t;
}

}  // namespace

cplx mean_length(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                 const std::string& e, const std::string& ep) {
  return pair_mean(g, mean_pack(g, mc, beta, {MeanKind::length, "", "", "", ""}), e, ep);
}

cplx mean_transitions(const MetricGraph& g, const TransitionCollection& mc,
                      cplx beta, const std::string& e, const std::string& ep,
                      const std::string& v0, const std::string& j0,
                      const std::string& k0) {
  MeanTarget t{MeanKind::transitions, v0, j0, k0, ""};
  const Pack p = mean_pack(g, mc, beta, t);
  const cplx value = pair_mean(g, p, e, ep);
  // mean is 0 by convention when the perturbed entry vanishes
  return value;
}

cplx mean_reflections(const MetricGraph& g, const TransitionCollection& mc,
                      cplx beta, const std::string& e, const std::string& ep,
                      const std::string& v0) {
  return pair_mean(g, mean_pack(g, mc, beta, {MeanKind::reflections, v0, "", "", ""}),
                   e, ep);
}

cplx mean_visits(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                 const std::string& e, const std::string& ep, const std::string& v0) {
  return pair_mean(g, mean_pack(g, mc, beta, {MeanKind::visits, v0, "", "", ""}), e, ep);
}

cplx mean_traversals(const MetricGraph& g, const TransitionCollection& mc,
                     cplx beta, const std::string& i0, const std::string& e,
                     const std::string& ep) {
  MeanTarget t;
  t.kind = MeanKind::traversals;
  t.i0 = i0;
  return pair_mean(g, mean_pack(g, mc, beta, t), e, ep);
}

cplx mean_aggregate(const MetricGraph& g, const TransitionCollection& mc,
                    cplx beta, const MeanTarget& target, Bullet mode,
                    const std::string& fixed) {
  const Pack p = mean_pack(g, mc, beta, target);
  const int ne = g.external_count();
  cplx tsum = 0.0, dsum = 0.0;
  switch (mode) {
    case Bullet::source: {
      const int col = g.external_index(fixed);
      for (int r = 0; r < ne; ++r) {
        tsum += p.d.t(r, col);
        dsum += p.d.dt(r, col);
      }
      break;
    }
    case Bullet::sink: {
      const int row = g.external_index(fixed);
      for (int c = 0; c < ne; ++c) {
        tsum += p.d.t(row, c);
        dsum += p.d.dt(row, c);
      }
      break;
    }
    case Bullet::both:
      tsum = p.d.t.sum();
      dsum = p.d.dt.sum();
      break;
  }
  if (negligible(tsum, p.d.t.cwiseAbs().maxCoeff()))
    fail(Errc::zero_denominator, "aggregate T weight vanishes");
  return -p.scale * dsum / tsum;
}

Matrix t_values(const MetricGraph& g, const TransitionCollection& mc, cplx beta) {
  return eval_T(g, assemble_global(g, mc), beta).value;
}

Matrix mean_values(const MetricGraph& g, const TransitionCollection& mc, cplx beta,
                   const MeanTarget& target) {
  const Pack p = mean_pack(g, mc, beta, target);
  const int ne = g.external_count();
  const double scale = p.d.t.cwiseAbs().maxCoeff();
  Matrix out(ne, ne);
  for (int r = 0; r < ne; ++r)
    for (int c = 0; c < ne; ++c)
      out(r, c) = negligible(p.d.t(r, c), scale)
                      ? cplx(kNan, 0.0)
                      : -p.scale * p.d.dt(r, c) / p.d.t(r, c);
  return out;
}

// --- Monte Carlo -----------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-statistic weighted sums for the ratio estimator R = sum(ux)/sum(u).
struct StatAcc {
  double ux = 0.0, uux = 0.0, uuxx = 0.0;
  void add(double u, double x) {
    ux += u * x;
    uux += u * u * x;
    uuxx += u * u * x * x;
  }
  void merge(const StatAcc& o) {
    ux += o.ux;
    uux += o.uux;
    uuxx += o.uuxx;
  }
};

struct ChannelAcc {
  long long n = 0;
  double u = 0.0, uu = 0.0;
  std::vector<StatAcc> stats;

  explicit ChannelAcc(size_t nstats) : stats(nstats) {}
  void merge(const ChannelAcc& o) {
    n += o.n;
    u += o.u;
    uu += o.uu;
    for (size_t i = 0; i < stats.size(); ++i) stats[i].merge(o.stats[i]);
  }
};

Estimate ratio_estimate(const ChannelAcc& ch, const StatAcc& s) {
  if (ch.n == 0 || ch.u == 0.0) return {kNan, 0.0};
  const double r = s.ux / ch.u;
  const double var = s.uuxx - 2.0 * r * s.uux + r * r * ch.uu;
  return {r, var > 0.0 ? std::sqrt(var) / ch.u : 0.0};
}

}  // namespace

SimResult simulate(const MetricGraph& g, const TransitionCollection& mc,
                   const SimOptions& options) {
  if (!classify(g, mc).stochastic)
    fail(Errc::not_stochastic, "Monte Carlo needs a stochastic collection");
  if (options.samples <= 0) fail(Errc::bad_argument, "samples must be positive");
  const int source = g.external_index(options.source);
  const int ne = g.external_count();
  const int nv = g.vertex_count();
  const int ni = g.internal_count();

  // probe slots resolved up front
  struct Probe {
    int v, pos_out, pos_in;
  };
  std::vector<Probe> probes;
  for (const auto& pr : options.probes) {
    const int v = g.vertex_index(pr[0]);
    Probe p{v, -1, -1};
    auto pos_of = [&](const std::string& id) {
      const auto& star = g.star(v);
      for (int q = 0; q < static_cast<int>(star.size()); ++q) {
        const std::string& sid =
            star[q].is_external ? g.external(star[q].edge).id : g.internal(star[q].edge).id;
        if (sid == id) return q;
      }
      fail(Errc::unknown_edge, "edge '" + id + "' not at vertex '" + pr[0] + "'");
    };
    p.pos_out = pos_of(pr[1]);
    p.pos_in = pos_of(pr[2]);
    probes.push_back(p);
  }

  // statistics order: 0 = metric length, then visits, reflections,
  // traversals, probes
  const size_t nstats = 1 + nv + nv + ni + probes.size();
  const int threads = std::max(1, options.threads);

  // column samplers: cumulative real parts per (vertex, incoming position)
  std::vector<std::vector<std::vector<double>>> cum(nv);
  for (int v = 0; v < nv; ++v) {
    const int deg = g.degree(v);
    cum[v].assign(deg, std::vector<double>(deg, 0.0));
    for (int c = 0; c < deg; ++c) {
      double acc = 0.0;
      for (int r = 0; r < deg; ++r) {
        acc += mc.at(v)(r, c).real();
        cum[v][c][r] = acc;
      }
    }
  }

  struct Shard {
    std::vector<ChannelAcc> channels;
    long long censored = 0;
    std::vector<long long> exits;
  };
  std::vector<Shard> shards(threads);

  auto run_shard = [&](int shard_idx, long long begin, long long end) {
    Shard& sh = shards[shard_idx];
    sh.channels.assign(ne, ChannelAcc(nstats));
    sh.exits.assign(ne, 0);
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(shard_idx + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<double> visits(nv), reflections(nv), traversals(ni), probe_hits(probes.size());
    for (long long s = begin; s < end; ++s) {
      std::fill(visits.begin(), visits.end(), 0.0);
      std::fill(reflections.begin(), reflections.end(), 0.0);
      std::fill(traversals.begin(), traversals.end(), 0.0);
      std::fill(probe_hits.begin(), probe_hits.end(), 0.0);
      double length = 0.0;
      int v = g.external(source).at;
      int pos_in = g.star_position_external(source);
      int exit = -1;
      for (long long step = 0; step <= options.step_cap; ++step) {
        const double x = unif(rng);
        const auto& col = cum[v][pos_in];
        int p = 0;
        while (p + 1 < static_cast<int>(col.size()) && x >= col[p]) ++p;
        visits[v] += 1.0;
        if (p == pos_in) reflections[v] += 1.0;
        for (size_t q = 0; q < probes.size(); ++q)
          if (probes[q].v == v && probes[q].pos_out == p && probes[q].pos_in == pos_in)
            probe_hits[q] += 1.0;
        const StarEntry& chosen = g.star(v)[p];
        if (chosen.is_external) {
          exit = chosen.edge;
          break;
        }
        const int i = chosen.edge;
        traversals[i] += 1.0;
        length += g.internal(i).length;
        v = g.other_endpoint(i, v);
        pos_in = g.star_position_internal(i, v == g.internal(i).to);
      }
      if (exit < 0) {
        ++sh.censored;
        continue;
      }
      ++sh.exits[exit];
      ChannelAcc& ch = sh.channels[exit];
      const double u = std::exp(-options.beta * length);
      ++ch.n;
      ch.u += u;
      ch.uu += u * u;
      size_t idx = 0;
      ch.stats[idx++].add(u, length);
      for (int q = 0; q < nv; ++q) ch.stats[idx++].add(u, visits[q]);
      for (int q = 0; q < nv; ++q) ch.stats[idx++].add(u, reflections[q]);
      for (int q = 0; q < ni; ++q) ch.stats[idx++].add(u, traversals[q]);
      for (size_t q = 0; q < probes.size(); ++q) ch.stats[idx++].add(u, probe_hits[q]);
    }
  };

  if (threads == 1) {
    run_shard(0, 0, options.samples);
  } else {
    std::vector<std::thread> pool;
    const long long per = options.samples / threads;
    for (int t = 0; t < threads; ++t) {
      const long long begin = t * per;
      const long long end = (t == threads - 1) ? options.samples : begin + per;
      pool.emplace_back(run_shard, t, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  // deterministic merge in shard order
  Shard total;
  total.channels.assign(ne, ChannelAcc(nstats));
  total.exits.assign(ne, 0);
  for (const Shard& sh : shards) {
    total.censored += sh.censored;
    for (int e = 0; e < ne; ++e) {
      total.exits[e] += sh.exits[e];
      total.channels[e].merge(sh.channels[e]);
    }
  }

  SimResult res;
  res.samples = options.samples;
  res.censored = total.censored;
  res.exit_counts = total.exits;
  const double n = static_cast<double>(options.samples);
  for (int e = 0; e < ne; ++e) {
    const ChannelAcc& ch = total.channels[e];
    const double p = ch.n / n;
    res.exit_probability.push_back({p, std::sqrt(std::max(0.0, p * (1.0 - p) / n))});
    const double tmean = ch.u / n;
    const double tvar = (ch.uu / n - tmean * tmean) / n;
    res.t_functional.push_back({tmean, tvar > 0.0 ? std::sqrt(tvar) : 0.0});
    size_t idx = 0;
    res.mean_length.push_back(ratio_estimate(ch, ch.stats[idx++]));
    std::vector<Estimate> vis, refl, trav, prb;
    for (int q = 0; q < nv; ++q) vis.push_back(ratio_estimate(ch, ch.stats[idx++]));
    for (int q = 0; q < nv; ++q) refl.push_back(ratio_estimate(ch, ch.stats[idx++]));
    for (int q = 0; q < ni; ++q) trav.push_back(ratio_estimate(ch, ch.stats[idx++]));
    for (size_t q = 0; q < probes.size(); ++q)
      prb.push_back(ratio_estimate(ch, ch.stats[idx++]));
    res.visits.push_back(std::move(vis));
    res.reflections.push_back(std::move(refl));
    res.traversals.push_back(std::move(trav));
    res.probes.push_back(std::move(prb));
  }
  return res;
}

}  // namespace walkgen
