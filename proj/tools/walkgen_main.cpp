// walkgen: generating functions of walks on metric graphs.
//
// Subcommands: eval, count, stats, scatter, convert, validate.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "walkgen/chain.hpp"
#include "walkgen/families.hpp"
#include "walkgen/genfun.hpp"
#include "walkgen/io.hpp"
#include "walkgen/scattering.hpp"
#include "walkgen/stats.hpp"
#include "walkgen/walks.hpp"

using namespace walkgen;

namespace {

int worker_cap() {
  if (const char* env = std::getenv("WALKGEN_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

double parse_double(std::string_view s) {
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(Errc::bad_argument, "cannot parse number '" + std::string(s) + "'");
  return out;
}

// Complex numbers as single tokens: "1.5", "0.9+4i", "-2.5i", and the pure
// imaginary shorthand "i1.0".
cplx parse_complex(std::string s) {
  if (s.empty()) fail(Errc::bad_argument, "empty number");
  double sign = 1.0;
  size_t start = 0;
  if (s[0] == '+' || s[0] == '-') {
    sign = s[0] == '-' ? -1.0 : 1.0;
    start = 1;
  }
  if (start < s.size() && s[start] == 'i') {
    const std::string rest = s.substr(start + 1);
    return cplx(0.0, sign * (rest.empty() ? 1.0 : parse_double(rest)));
  }
  // split at the last top-level +/- (not part of an exponent)
  size_t split = std::string::npos;
  for (size_t p = start + 1; p < s.size(); ++p) {
    if ((s[p] == '+' || s[p] == '-') && (s[p - 1] != 'e' && s[p - 1] != 'E'))
      split = p;
  }
  if (split == std::string::npos) {
    if (s.back() == 'i') {
      std::string body = s.substr(start, s.size() - start - 1);
      if (body.empty()) return cplx(0.0, sign);
      return cplx(0.0, sign * parse_double(body));
    }
    return cplx(sign * parse_double(s.substr(start)), 0.0);
  }
  if (s.back() != 'i')
    fail(Errc::bad_argument, "cannot parse complex number '" + s + "'");
  const double re = sign * parse_double(s.substr(start, split - start));
  const double isign = s[split] == '-' ? -1.0 : 1.0;
  std::string body = s.substr(split + 1, s.size() - split - 2);
  const double im = isign * (body.empty() ? 1.0 : parse_double(body));
  return cplx(re, im);
}

std::string fmt(double x, bool csv) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), csv ? "%.17g" : "%.12g", x);
  return buf;
}

struct Output {
  bool csv = false;
  void header(const std::string& table_cols, const std::string& csv_cols) {
    std::cout << (csv ? csv_cols : table_cols) << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) std::cout << (csv ? "," : "  ");
      std::cout << cells[i];
    }
    std::cout << "\n";
  }
  void note(const std::string& text) {
    if (!csv) std::cout << "# " << text << "\n";
  }
};

TransitionCollection require_matrices(const LoadedGraph& lg, const std::string& path) {
  if (!lg.matrices)
    fail(Errc::bad_file, "'" + path + "' carries no matrices section");
  return *lg.matrices;
}

std::vector<cplx> beta_grid(const std::optional<std::string>& single,
                            const std::vector<std::string>& linspace) {
  std::vector<cplx> grid;
  if (single) grid.push_back(parse_complex(*single));
  if (!linspace.empty()) {
    const double lo = parse_double(linspace[0]);
    const double hi = parse_double(linspace[1]);
    const long n = std::lround(parse_double(linspace[2]));
    if (n < 1) fail(Errc::bad_argument, "linspace count must be >= 1");
    for (long k = 0; k < n; ++k)
      grid.push_back(n == 1 ? lo : lo + (hi - lo) * double(k) / double(n - 1));
  }
  if (grid.empty()) fail(Errc::bad_argument, "supply --beta or --beta-linspace");
  return grid;
}

// Grid points evaluate concurrently up to WALKGEN_THREADS; output stays in
// grid order.
template <typename F>
std::vector<Matrix> run_grid(const std::vector<cplx>& grid, F&& eval_one) {
  std::vector<Matrix> out(grid.size());
  const int workers = std::min<int>(worker_cap(), static_cast<int>(grid.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < grid.size(); ++i) out[i] = eval_one(grid[i]);
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < grid.size(); i = next++) out[i] = eval_one(grid[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// --- eval -------------------------------------------------------------------

int cmd_eval(const std::string& path, const std::optional<std::string>& beta_s,
             const std::vector<std::string>& linspace, const std::string& method,
             int nmax, const std::optional<std::string>& directed_file, Output out) {
  LoadedGraph lg = load_graph_file(path);
  const MetricGraph& g = lg.graph;
  TransitionCollection mc = require_matrices(lg, path);
  GlobalTransition big = assemble_global(g, mc);
  const std::vector<cplx> grid = beta_grid(beta_s, linspace);
  const bool sweep = grid.size() > 1;

  std::optional<std::vector<double>> bvec;
  if (directed_file) {
    std::ifstream in(*directed_file);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("b"))
      fail(Errc::bad_file, "directed penalty file needs a 'b' object");
    std::vector<double> b(g.internal_count());
    for (int i = 0; i < g.internal_count(); ++i) {
      const std::string& id = g.internal(i).id;
      if (!j["b"].contains(id))
        fail(Errc::bad_file, "no directed penalty for line '" + id + "'");
      b[i] = j["b"][id].get<double>();
    }
    bvec = std::move(b);
  }

  auto eval_one = [&](cplx beta) -> Matrix {
    if (method == "closed") {
      if (bvec) return eval_T_directed(g, big, beta, g.lengths(), *bvec).value;
      return eval_T(g, big, beta).value;
    }
    if (method == "neumann") return neumann_T(g, big, beta, nmax).value;
    return series_T(g, mc, beta, nmax).value;
  };
  const std::vector<Matrix> results = run_grid(grid, eval_one);

  out.note("method " + method + (bvec ? " (directed)" : ""));
  if (!sweep) {
    if (method == "neumann") {
      out.note("nmax " + std::to_string(nmax) + ", tail bound " +
               fmt(neumann_T(g, big, grid[0], nmax).tail_bound, false));
    } else if (method == "series") {
      out.note("nmax " + std::to_string(nmax) + ", tail bound " +
               fmt(series_T(g, mc, grid[0], nmax).tail_bound, false));
    } else if (!bvec) {
      out.note("rcond " + fmt(eval_T(g, big, grid[0]).rcond, false));
    }
  }
  if (sweep) {
    out.header("beta  e  eprime  re  im", "beta,e,eprime,re,im");
  } else {
    out.header("e  eprime  re  im", "e,eprime,re,im");
  }
  for (size_t k = 0; k < grid.size(); ++k) {
    for (int r = 0; r < g.external_count(); ++r) {
      for (int c = 0; c < g.external_count(); ++c) {
        std::vector<std::string> cells;
        if (sweep) cells.push_back(fmt(grid[k].real(), out.csv));
        cells.push_back(g.external(r).id);
        cells.push_back(g.external(c).id);
        cells.push_back(fmt(results[k](r, c).real(), out.csv));
        cells.push_back(fmt(results[k](r, c).imag(), out.csv));
        out.row(cells);
      }
    }
  }
  return 0;
}

// --- count ------------------------------------------------------------------

int cmd_count(const std::string& family_s, int n, Output out) {
  const Family family = parse_family(family_s);
  const FamilyInstance inst = make_family(family, n);
  GenFunResult res =
      eval_T(inst.graph, assemble_global(inst.graph, inst.matrices), 0.0);
  const cplx t =
      res.value(inst.graph.external_index("e"), inst.graph.external_index("ep"));
  const double rounded = std::round(t.real());
  const double residual = std::abs(t - rounded);
  if (residual > 1e-6)
    fail(Errc::residual_too_large,
         "count is not an integer to 1e-6 (residual " + fmt(residual, false) + ")");
  out.header("family  n  count  residual", "family,n,count,residual");
  out.row({family_s, std::to_string(n), fmt(rounded, out.csv), fmt(residual, out.csv)});
  return 0;
}

// --- stats ------------------------------------------------------------------

int cmd_stats(const std::string& path, const std::string& beta_s,
              const std::string& what, const std::vector<std::string>& at,
              const std::optional<std::string>& edge,
              const std::optional<std::string>& aggregate,
              const std::optional<std::string>& fixed, long long mc_samples,
              std::uint64_t seed, long long step_cap, Output out) {
  LoadedGraph lg = load_graph_file(path);
  const MetricGraph& g = lg.graph;
  TransitionCollection mc = require_matrices(lg, path);
  const cplx beta = parse_complex(beta_s);

  MeanTarget target;
  if (what == "length") {
    target.kind = MeanKind::length;
  } else if (what == "transitions") {
    if (at.size() != 3) fail(Errc::bad_argument, "--what transitions needs --at v0 j0 k0");
    target = {MeanKind::transitions, at[0], at[1], at[2], ""};
  } else if (what == "reflections") {
    if (at.size() != 1) fail(Errc::bad_argument, "--what reflections needs --at v0");
    target = {MeanKind::reflections, at[0], "", "", ""};
  } else if (what == "visits") {
    if (at.size() != 1) fail(Errc::bad_argument, "--what visits needs --at v0");
    target = {MeanKind::visits, at[0], "", "", ""};
  } else if (what == "traversals") {
    if (!edge) fail(Errc::bad_argument, "--what traversals needs --edge i0");
    target.kind = MeanKind::traversals;
    target.i0 = *edge;
  } else {
    fail(Errc::bad_argument, "unknown --what '" + what + "'");
  }

  if (aggregate) {
    Bullet mode;
    if (*aggregate == "src") {
      mode = Bullet::source;
    } else if (*aggregate == "sink") {
      mode = Bullet::sink;
    } else if (*aggregate == "both") {
      mode = Bullet::both;
    } else {
      fail(Errc::bad_argument, "--aggregate takes src|sink|both");
    }
    if (mode != Bullet::both && !fixed)
      fail(Errc::bad_argument, "--aggregate src|sink needs --fixed EXTERNAL");
    const cplx v = mean_aggregate(g, mc, beta, target, mode, fixed.value_or(""));
    out.header("aggregate  re  im", "aggregate,re,im");
    out.row({*aggregate, fmt(v.real(), out.csv), fmt(v.imag(), out.csv)});
    return 0;
  }

  const Matrix values = mean_values(g, mc, beta, target);

  std::optional<std::vector<SimResult>> sims;  // one per source column
  if (mc_samples > 0) {
    sims.emplace();
    for (int c = 0; c < g.external_count(); ++c) {
      SimOptions opt;
      opt.source = g.external(c).id;
      opt.beta = beta.real();
      opt.samples = mc_samples;
      opt.seed = seed + static_cast<std::uint64_t>(c);
      opt.step_cap = step_cap;
      opt.threads = worker_cap();
      if (target.kind == MeanKind::transitions)
        opt.probes = {{target.v0, target.j0, target.k0}};
      sims->push_back(simulate(g, mc, opt));
    }
  }

  if (sims) {
    out.header("e  eprime  re  im  empirical  stderr", "e,eprime,re,im,empirical,stderr");
  } else {
    out.header("e  eprime  re  im", "e,eprime,re,im");
  }
  for (int r = 0; r < g.external_count(); ++r) {
    for (int c = 0; c < g.external_count(); ++c) {
      std::vector<std::string> cells{g.external(r).id, g.external(c).id,
                                     fmt(values(r, c).real(), out.csv),
                                     fmt(values(r, c).imag(), out.csv)};
      if (sims) {
        const SimResult& sim = (*sims)[c];
        Estimate est{std::numeric_limits<double>::quiet_NaN(), 0.0};
        switch (target.kind) {
          case MeanKind::length: est = sim.mean_length[r]; break;
          case MeanKind::visits: est = sim.visits[r][g.vertex_index(target.v0)]; break;
          case MeanKind::reflections:
            est = sim.reflections[r][g.vertex_index(target.v0)];
            break;
          case MeanKind::traversals:
            est = sim.traversals[r][g.internal_index(target.i0)];
            break;
          case MeanKind::transitions: est = sim.probes[r][0]; break;
        }
        cells.push_back(fmt(est.value, out.csv));
        cells.push_back(fmt(est.se, out.csv));
      }
      out.row(cells);
    }
  }
  if (sims) {
    long long censored = 0;
    for (const auto& s : *sims) censored += s.censored;
    if (censored > 0)
      out.note("censored walks: " + std::to_string(censored) + " (step cap " +
               std::to_string(step_cap) + ")");
  }
  return 0;
}

// --- scatter ----------------------------------------------------------------

int cmd_scatter(const std::string& path, const std::string& k_s,
                const std::optional<std::string>& bc_beta,
                const std::optional<std::string>& bc_file,
                const std::vector<int>& fourier, const std::vector<int>& quadrature,
                int mesh, Output out) {
  LoadedGraph lg = load_graph_file(path);
  const MetricGraph& g = lg.graph;
  const cplx k = parse_complex(k_s);

  BoundaryConditions bc;
  if (bc_file) {
    auto [a, b] = load_bc_file(*bc_file, g.k_dim());
    bc = bc_explicit(g, std::move(a), std::move(b));
  } else {
    const double beta = bc_beta ? parse_double(*bc_beta) : 1.0;
    bc = bc_from_M(g, require_matrices(lg, path), beta);
  }
  out.note(std::string("self-adjoint: ") + (bc.self_adjoint ? "yes" : "no"));

  if (!fourier.empty() || !quadrature.empty()) {
    const std::vector<int>& score = fourier.empty() ? quadrature : fourier;
    Matrix walk_sum = fourier_walk_coefficient(g, bc, k, score);
    std::optional<Matrix> quad;
    if (!quadrature.empty()) {
      if (k.imag() != 0.0) fail(Errc::bad_argument, "--quadrature needs real k");
      quad = fourier_quadrature(g, bc, k.real(), score, mesh);
      out.note("quadrature mesh " + std::to_string(mesh));
    }
    if (quad) {
      out.header("e  eprime  re  im  quad_re  quad_im", "e,eprime,re,im,quad_re,quad_im");
    } else {
      out.header("e  eprime  re  im", "e,eprime,re,im");
    }
    for (int r = 0; r < g.external_count(); ++r)
      for (int c = 0; c < g.external_count(); ++c) {
        std::vector<std::string> cells{g.external(r).id, g.external(c).id,
                                       fmt(walk_sum(r, c).real(), out.csv),
                                       fmt(walk_sum(r, c).imag(), out.csv)};
        if (quad) {
          cells.push_back(fmt((*quad)(r, c).real(), out.csv));
          cells.push_back(fmt((*quad)(r, c).imag(), out.csv));
        }
        out.row(cells);
      }
    if (quad)
      out.note("max |walk-sum - quadrature| = " +
               fmt((walk_sum - *quad).cwiseAbs().maxCoeff(), false));
    return 0;
  }

  ScatterResult res = solve_scattering(g, bc, k);
  out.note("unitarity defect " + fmt(res.unitarity_defect, false));
  out.note("residual " + fmt(res.residual, false));
  out.header("e  eprime  re  im", "e,eprime,re,im");
  for (int r = 0; r < g.external_count(); ++r)
    for (int c = 0; c < g.external_count(); ++c)
      out.row({g.external(r).id, g.external(c).id, fmt(res.s(r, c).real(), out.csv),
               fmt(res.s(r, c).imag(), out.csv)});
  return 0;
}

// --- convert ----------------------------------------------------------------

int cmd_convert(const std::string& path, const std::optional<std::string>& puncture,
                bool to_chain, const std::string& output, Output out) {
  if (puncture && to_chain)
    fail(Errc::bad_argument, "choose one of --puncture and --to-chain");
  if (puncture) {
    VertexChain chain = load_chain_file(path);
    EdgeModel em = chain_to_edge_model(chain, *puncture);
    save_graph_file(output, em.graph, &em.matrices);
    out.note("wrote graph with " + std::to_string(em.graph.internal_count()) +
             " internal and " + std::to_string(em.graph.external_count()) +
             " external lines to " + output);
    return 0;
  }
  if (!to_chain) fail(Errc::bad_argument, "choose one of --puncture and --to-chain");
  LoadedGraph lg = load_graph_file(path);
  TransitionCollection mc = require_matrices(lg, path);
  VertexChain chain = edge_model_to_chain(lg.graph, mc);
  save_chain_file(output, chain);
  out.note("wrote chain with " + std::to_string(chain.vertices.size()) +
           " vertices to " + output);
  return 0;
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& path, bool chain, Output out) {
  if (chain) {
    VertexChain c = load_chain_file(path);
    out.header("vertices  lines", "vertices,lines");
    out.row({std::to_string(c.vertices.size()), std::to_string(c.internal.size())});
    return 0;
  }
  LoadedGraph lg = load_graph_file(path);
  const MetricGraph& g = lg.graph;
  out.header("vertices  internal  external  a_min", "vertices,internal,external,a_min");
  out.row({std::to_string(g.vertex_count()), std::to_string(g.internal_count()),
           std::to_string(g.external_count()),
           g.internal_count() ? fmt(g.a_min(), out.csv) : "-"});
  if (lg.matrices) {
    const TransitionFlags f = classify(g, *lg.matrices);
    out.note(std::string("stochastic: ") + (f.stochastic ? "yes" : "no") +
             ", combinatorial: " + (f.combinatorial ? "yes" : "no") +
             ", symmetric: " + (f.symmetric ? "yes" : "no") +
             ", hermitian: " + (f.hermitian ? "yes" : "no") +
             ", columns-equal: " + (f.columns_equal ? "yes" : "no"));
    if (g.internal_count() > 0)
      out.note("beta0 bound " + fmt(beta0_bound(g, *lg.matrices), false));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generating functions of walks on metric graphs"};
  app.require_subcommand(1);
  std::string format = "table";
  app.add_option("--format", format, "output format: table or csv")
      ->check(CLI::IsMember({"table", "csv"}));

  auto* eval = app.add_subcommand("eval", "evaluate the generating function T(beta)");
  std::string eval_path, eval_method = "closed";
  std::optional<std::string> eval_beta, eval_directed;
  std::vector<std::string> eval_linspace;
  int eval_nmax = 64;
  eval->add_option("graph", eval_path, "graph file")->required();
  eval->add_option("--beta", eval_beta, "penalty parameter (complex, e.g. 0.5 or 0.9+4i)");
  eval->add_option("--beta-linspace", eval_linspace, "sweep: start stop count")
      ->expected(3);
  eval->add_option("--method", eval_method, "closed | neumann | series")
      ->check(CLI::IsMember({"closed", "neumann", "series"}));
  eval->add_option("--nmax", eval_nmax, "truncation order for neumann/series");
  eval->add_option("--directed", eval_directed, "JSON file with reverse penalties b");

  auto* count = app.add_subcommand("count", "lattice-family walk counts at beta=0");
  std::string count_family;
  int count_n = 1;
  count->add_option("--family", count_family, "catalan | schroeder | dyck | motzkin")
      ->required();
  count->add_option("--n", count_n, "family order (n >= 1)")->required();

  auto* stats = app.add_subcommand("stats", "random-walk mean values");
  std::string stats_path, stats_beta = "0", stats_what;
  std::vector<std::string> stats_at;
  std::optional<std::string> stats_edge, stats_aggregate, stats_fixed;
  long long stats_mc = 0, stats_step_cap = 1000000;
  std::uint64_t stats_seed = 0;
  stats->add_option("graph", stats_path, "graph file")->required();
  stats->add_option("--beta", stats_beta, "penalty parameter");
  stats->add_option("--what", stats_what,
                    "length | transitions | visits | traversals | reflections")
      ->required();
  stats->add_option("--at", stats_at, "v0 [j0 k0] for vertex-local means")
      ->expected(1, 3);
  stats->add_option("--edge", stats_edge, "internal line for --what traversals");
  stats->add_option("--aggregate", stats_aggregate, "src | sink | both");
  stats->add_option("--fixed", stats_fixed, "held external line for src/sink aggregates");
  stats->add_option("--mc", stats_mc, "Monte Carlo sample count");
  stats->add_option("--seed", stats_seed, "Monte Carlo seed");
  stats->add_option("--step-cap", stats_step_cap, "censoring cap per walk");

  auto* scatter = app.add_subcommand("scatter", "scattering matrices and Fourier data");
  std::string scatter_path, scatter_k;
  std::optional<std::string> scatter_bc_beta, scatter_bc_file;
  std::vector<int> scatter_fourier, scatter_quadrature;
  int scatter_mesh = 256;
  scatter->add_option("graph", scatter_path, "graph file")->required();
  scatter->add_option("--k", scatter_k, "spectral parameter (complex; i1.0 = imaginary)")
      ->required();
  scatter->add_option("--bc-from-m", scatter_bc_beta,
                      "build boundary conditions from the matrices at this beta");
  scatter->add_option("--bc", scatter_bc_file, "explicit boundary condition file");
  scatter->add_option("--fourier", scatter_fourier, "walk-sum coefficient for a score");
  scatter->add_option("--quadrature", scatter_quadrature,
                      "quadrature coefficient for a score");
  scatter->add_option("--mesh", scatter_mesh, "quadrature points per axis");

  auto* convert = app.add_subcommand("convert", "vertex chains <-> edge models");
  std::string convert_path, convert_out = "converted.json";
  std::optional<std::string> convert_puncture;
  bool convert_to_chain = false;
  convert->add_option("file", convert_path, "input file")->required();
  convert->add_option("--puncture", convert_puncture,
                      "chain file: puncture at this vertex");
  convert->add_flag("--to-chain", convert_to_chain, "graph file: rebuild the chain");
  convert->add_option("-o,--output", convert_out, "output path");

  auto* validate = app.add_subcommand("validate", "validate a graph or chain file");
  std::string validate_path;
  bool validate_chain = false;
  validate->add_option("file", validate_path, "input file")->required();
  validate->add_flag("--chain", validate_chain, "treat the input as a chain file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  Output out;
  out.csv = (format == "csv");
  try {
    if (*eval)
      return cmd_eval(eval_path, eval_beta, eval_linspace, eval_method, eval_nmax,
                      eval_directed, out);
    if (*count) return cmd_count(count_family, count_n, out);
    if (*stats)
      return cmd_stats(stats_path, stats_beta, stats_what, stats_at, stats_edge,
                       stats_aggregate, stats_fixed, stats_mc, stats_seed,
                       stats_step_cap, out);
    if (*scatter)
      return cmd_scatter(scatter_path, scatter_k, scatter_bc_beta, scatter_bc_file,
                         scatter_fourier, scatter_quadrature, scatter_mesh, out);
    if (*convert)
      return cmd_convert(convert_path, convert_puncture, convert_to_chain,
                         convert_out, out);
    if (*validate) return cmd_validate(validate_path, validate_chain, out);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == Errc::bad_argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
