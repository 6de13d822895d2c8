#include "walkgen/families.hpp"

#include <array>
#include <cstdio>
#include <map>

namespace walkgen {

namespace {

using Step = std::array<int, 2>;

std::string coord_id(int x, int y) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "v%02d_%02d", x, y);
  return buf;
}

bool in_set(const std::vector<Step>& k, Step s) {
  for (const Step& t : k)
    if (t == s) return true;
  return false;
}

}  // namespace

Family parse_family(const std::string& name) {
  if (name == "catalan") return Family::catalan;
  if (name == "schroeder") return Family::schroeder;
  if (name == "dyck") return Family::dyck;
  if (name == "motzkin") return Family::motzkin;
  fail(Errc::bad_argument, "unknown family '" + name + "'");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::catalan: return "catalan";
    case Family::schroeder: return "schroeder";
    case Family::dyck: return "dyck";
    case Family::motzkin: return "motzkin";
  }
  return "?";
}

FamilyInstance make_family(Family f, int n) {
  if (n < 1) fail(Errc::bad_argument, "family order must be >= 1");

  const bool square = (f == Family::dyck || f == Family::motzkin);

  std::vector<Step> steps;
  switch (f) {
    case Family::catalan: steps = {{1, 0}, {0, 1}}; break;
    case Family::schroeder: steps = {{1, 0}, {0, 1}, {1, 1}}; break;
    case Family::dyck: steps = {{1, 1}, {1, -1}}; break;
    case Family::motzkin: steps = {{1, 1}, {1, -1}, {1, 0}}; break;
  }

  // Lattice line offsets. The staircase graph carries right, up and
  // up-right lines; the square graph additionally has down-right lines.
  std::vector<Step> offsets = {{1, 0}, {0, 1}, {1, 1}};
  if (square) offsets.push_back({1, -1});

  GraphSpec spec;
  std::map<std::string, Step> coord_of;
  auto inside = [&](int x, int y) {
    if (x < 0 || x > n || y < 0 || y > n) return false;
    return square || y <= x;
  };
  for (int x = 0; x <= n; ++x) {
    for (int y = 0; y <= n; ++y) {
      if (!inside(x, y)) continue;
      spec.vertices.push_back(coord_id(x, y));
      coord_of[spec.vertices.back()] = {x, y};
    }
  }
  // Lines oriented from the lexicographically smaller endpoint; the chosen
  // offsets all point that way.
  for (int x = 0; x <= n; ++x) {
    for (int y = 0; y <= n; ++y) {
      if (!inside(x, y)) continue;
      for (const Step& d : offsets) {
        const int xx = x + d[0], yy = y + d[1];
        if (!inside(xx, yy)) continue;
        spec.internal.push_back(
            {"i." + coord_id(x, y) + "." + coord_id(xx, yy), coord_id(x, y),
             coord_id(xx, yy), 1.0});
      }
    }
  }
  spec.external.push_back({"e", square ? coord_id(n, 0) : coord_id(n, n)});
  spec.external.push_back({"ep", coord_id(0, 0)});

  MetricGraph g = build_graph(spec);

  // chi_v(j): the step taken when leaving v through j; externals act as a
  // rightward step at the sink and a leftward one at the source.
  const int sink = g.external_index("e");
  const int source = g.external_index("ep");
  auto chi = [&](int v, const StarEntry& s) -> Step {
    if (s.is_external)
      return s.edge == sink ? Step{1, 0} : Step{-1, 0};
    const Step a = coord_of.at(g.vertex_id(v));
    const Step b = coord_of.at(g.vertex_id(g.other_endpoint(s.edge, v)));
    return {b[0] - a[0], b[1] - a[1]};
  };

  std::vector<Matrix> mats(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& star = g.star(v);
    const int d = g.degree(v);
    Matrix m = Matrix::Zero(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const StarEntry& out = star[r];
        const StarEntry& in = star[c];
        const Step co = chi(v, out);
        const Step ci = chi(v, in);
        bool one;
        if (f == Family::dyck) {
          // External lines waive their own step condition; the step set has
          // no horizontal member, so the generic rule would disconnect them.
          const bool out_ext = out.is_external;
          const bool in_ext = in.is_external;
          if (out_ext && out.edge == sink) {
            one = in_set(steps, {-ci[0], -ci[1]});
          } else if (in_ext && in.edge == source) {
            one = in_set(steps, co);
          } else if (out_ext) {
            one = in_set(steps, {-ci[0], -ci[1]});
          } else if (in_ext) {
            one = in_set(steps, co);
          } else {
            one = in_set(steps, co) && in_set(steps, {-ci[0], -ci[1]});
          }
        } else {
          one = in_set(steps, co) && in_set(steps, {-ci[0], -ci[1]});
        }
        if (one) m(r, c) = 1.0;
      }
    }
    mats[v] = std::move(m);
  }

  TransitionCollection mc(g, std::move(mats));
  return {std::move(g), std::move(mc)};
}

}  // namespace walkgen
