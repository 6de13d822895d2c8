#include "walkgen/io.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace walkgen {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::bad_file, "not valid JSON");
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::bad_file, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::bad_file, "cannot write '" + path + "'");
  out << text;
}

cplx entry_from_json(const json& x) {
  if (x.is_number()) return cplx(x.get<double>(), 0.0);
  if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())
    return cplx(x[0].get<double>(), x[1].get<double>());
  fail(Errc::bad_file, "matrix entries are numbers or [re, im] pairs");
}

json entry_to_json(cplx x) {
  if (x.imag() == 0.0) return json(x.real());
  return json::array({x.real(), x.imag()});
}

std::string star_edge_id(const MetricGraph& g, const StarEntry& s) {
  return s.is_external ? g.external(s.edge).id : g.internal(s.edge).id;
}

}  // namespace

LoadedGraph parse_graph_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) fail(Errc::bad_file, "graph file must be an object");

  GraphSpec spec;
  for (const auto& v : j.value("vertices", json::array()))
    spec.vertices.push_back(v.get<std::string>());
  for (const auto& l : j.value("internal", json::array())) {
    spec.internal.push_back({l.at("id").get<std::string>(),
                             l.at("from").get<std::string>(),
                             l.at("to").get<std::string>(),
                             l.value("length", 1.0)});
  }
  for (const auto& l : j.value("external", json::array()))
    spec.external.push_back(
        {l.at("id").get<std::string>(), l.at("at").get<std::string>()});

  LoadedGraph out{build_graph(spec), std::nullopt};
  const MetricGraph& g = out.graph;

  if (j.contains("matrices")) {
    const json& ms = j.at("matrices");
    std::vector<Matrix> mats(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
      const std::string& vid = g.vertex_id(v);
      if (!ms.contains(vid))
        fail(Errc::shape_mismatch, "no matrix for vertex '" + vid + "'");
      const json& mv = ms.at(vid);
      const int deg = g.degree(v);

      // map declared order -> canonical star positions
      std::vector<int> perm(deg, -1);
      const json& order = mv.at("order");
      if (static_cast<int>(order.size()) != deg)
        fail(Errc::shape_mismatch, "order at vertex '" + vid + "' has wrong size");
      const auto& star = g.star(v);
      for (int q = 0; q < deg; ++q) {
        const std::string id = order[q].get<std::string>();
        int pos = -1;
        for (int p = 0; p < deg; ++p)
          if (star_edge_id(g, star[p]) == id) pos = p;
        if (pos < 0)
          fail(Errc::shape_mismatch,
               "order at vertex '" + vid + "' names non-incident edge '" + id + "'");
        if (std::count(perm.begin(), perm.end(), pos))
          fail(Errc::shape_mismatch,
               "order at vertex '" + vid + "' repeats edge '" + id + "'");
        perm[q] = pos;
      }

      const json& entries = mv.at("entries");
      if (static_cast<int>(entries.size()) != deg)
        fail(Errc::shape_mismatch, "matrix at vertex '" + vid + "' has wrong shape");
      Matrix m(deg, deg);
      for (int r = 0; r < deg; ++r) {
        const json& row = entries[r];
        if (static_cast<int>(row.size()) != deg)
          fail(Errc::shape_mismatch, "matrix at vertex '" + vid + "' has wrong shape");
        for (int c = 0; c < deg; ++c) m(perm[r], perm[c]) = entry_from_json(row[c]);
      }
      mats[v] = std::move(m);
    }
    out.matrices = TransitionCollection(g, std::move(mats));
  }
  return out;
}

LoadedGraph load_graph_file(const std::string& path) {
  return parse_graph_json(slurp(path));
}

std::string graph_to_json(const MetricGraph& g, const TransitionCollection* mc) {
  json j;
  j["vertices"] = json::array();
  for (int v = 0; v < g.vertex_count(); ++v) j["vertices"].push_back(g.vertex_id(v));
  j["internal"] = json::array();
  for (int i = 0; i < g.internal_count(); ++i) {
    const InternalLine& l = g.internal(i);
    j["internal"].push_back({{"id", l.id},
                             {"from", g.vertex_id(l.from)},
                             {"to", g.vertex_id(l.to)},
                             {"length", l.length}});
  }
  j["external"] = json::array();
  for (int e = 0; e < g.external_count(); ++e)
    j["external"].push_back(
        {{"id", g.external(e).id}, {"at", g.vertex_id(g.external(e).at)}});

  if (mc) {
    json ms = json::object();
    for (int v = 0; v < g.vertex_count(); ++v) {
      json order = json::array();
      for (const StarEntry& s : g.star(v)) order.push_back(star_edge_id(g, s));
      json entries = json::array();
      const Matrix& m = mc->at(v);
      for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(entry_to_json(m(r, c)));
        entries.push_back(std::move(row));
      }
      ms[g.vertex_id(v)] = {{"order", std::move(order)}, {"entries", std::move(entries)}};
    }
    j["matrices"] = std::move(ms);
  }
  return j.dump(2) + "\n";
}

void save_graph_file(const std::string& path, const MetricGraph& g,
                     const TransitionCollection* mc) {
  spit(path, graph_to_json(g, mc));
}

VertexChain parse_chain_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) fail(Errc::bad_file, "chain file must be an object");
  VertexChain chain;
  for (const auto& v : j.value("vertices", json::array()))
    chain.vertices.push_back(v.get<std::string>());
  for (const auto& l : j.value("internal", json::array()))
    chain.internal.push_back({l.at("id").get<std::string>(),
                              l.at("from").get<std::string>(),
                              l.at("to").get<std::string>(),
                              l.value("length", 1.0)});

  std::vector<std::string> order = chain.vertices;
  if (j.contains("order")) {
    order.clear();
    for (const auto& v : j.at("order")) order.push_back(v.get<std::string>());
  }
  const int n = static_cast<int>(chain.vertices.size());
  if (static_cast<int>(order.size()) != n)
    fail(Errc::shape_mismatch, "order must list every vertex once");
  std::vector<int> pos(n, -1);
  for (int q = 0; q < n; ++q) {
    auto it = std::find(chain.vertices.begin(), chain.vertices.end(), order[q]);
    if (it == chain.vertices.end())
      fail(Errc::dangling_reference, "order names unknown vertex '" + order[q] + "'");
    pos[q] = static_cast<int>(it - chain.vertices.begin());
  }

  const json& rows = j.at("P");
  if (static_cast<int>(rows.size()) != n) fail(Errc::shape_mismatch, "P must be |V| x |V|");
  chain.p = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n)
      fail(Errc::shape_mismatch, "P must be |V| x |V|");
    for (int c = 0; c < n; ++c)
      chain.p(pos[r], pos[c]) = rows[r][c].get<double>();
  }
  validate_chain(chain);
  return chain;
}

VertexChain load_chain_file(const std::string& path) {
  return parse_chain_json(slurp(path));
}

std::string chain_to_json(const VertexChain& chain) {
  json j;
  j["vertices"] = chain.vertices;
  j["internal"] = json::array();
  for (const auto& l : chain.internal)
    j["internal"].push_back(
        {{"id", l.id}, {"from", l.from}, {"to", l.to}, {"length", l.length}});
  j["order"] = chain.vertices;
  json rows = json::array();
  for (int r = 0; r < chain.p.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < chain.p.cols(); ++c) row.push_back(chain.p(r, c));
    rows.push_back(std::move(row));
  }
  j["P"] = std::move(rows);
  return j.dump(2) + "\n";
}

void save_chain_file(const std::string& path, const VertexChain& chain) {
  spit(path, chain_to_json(chain));
}

std::pair<Matrix, Matrix> load_bc_file(const std::string& path, int dim) {
  const json j = parse(slurp(path));
  auto read = [&](const char* key) {
    if (!j.contains(key)) fail(Errc::bad_file, std::string("missing '") + key + "'");
    const json& rows = j.at(key);
    if (static_cast<int>(rows.size()) != dim)
      fail(Errc::shape_mismatch, std::string(key) + " must be " + std::to_string(dim) +
                                     "x" + std::to_string(dim));
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      if (static_cast<int>(rows[r].size()) != dim)
        fail(Errc::shape_mismatch, std::string(key) + " row " + std::to_string(r));
      for (int c = 0; c < dim; ++c) m(r, c) = entry_from_json(rows[r][c]);
    }
    return m;
  };
  return {read("A"), read("B")};
}

}  // namespace walkgen
