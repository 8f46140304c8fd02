#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "planroute/graph.hpp"

namespace planroute {

// Text format, one record per line ('#' starts a comment):
//   p planar <n> <m> <denom>
//   v <id> <x> <y>              (optional)
//   e <id> <u> <v> <w_numerator>
//   r <v> <e1> <e2> ...         (clockwise)

class GraphFormatError : public GraphError {
 public:
  GraphFormatError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void write_graph(const EmbeddedGraph& g, std::ostream& os) {
  os << "p planar " << g.num_vertices() << ' ' << g.num_edges() << ' ' << g.denominator() << '\n';
  if (const auto& pts = g.coords()) {
    os << std::setprecision(17);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
      // + 0.0 prints negative zero as 0
      os << "v " << v << ' ' << (*pts)[static_cast<std::size_t>(v)].x + 0.0 << ' '
         << (*pts)[static_cast<std::size_t>(v)].y + 0.0 << '\n';
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    os << "e " << e << ' ' << g.edge(e).u << ' ' << g.edge(e).v << ' ' << g.edge(e).w << '\n';
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    os << "r " << v;
    for (EdgeId e : g.rotation(v)) os << ' ' << e;
    os << '\n';
  }
}

inline EmbeddedGraph read_graph(std::istream& is, const ValidationOptions& opts = {}) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long long n = 0, m = 0, denom = 1;
  std::vector<Edge> edges;
  std::vector<char> edge_seen;
  std::vector<std::size_t> edge_line;
  std::vector<std::vector<EdgeId>> rot;
  std::vector<char> rot_seen;
  std::vector<std::size_t> rot_line;
  std::vector<Point> pts;
  bool any_coords = false;

  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!have_header) {
      std::string kind;
      if (tag != "p" || !(ls >> kind >> n >> m >> denom) || kind != "planar" || n < 0 || m < 0 ||
          denom < 1)
        throw GraphFormatError(lineno, "malformed header");
      have_header = true;
      edges.resize(static_cast<std::size_t>(m));
      edge_seen.assign(static_cast<std::size_t>(m), 0);
      edge_line.assign(static_cast<std::size_t>(m), 0);
      rot.resize(static_cast<std::size_t>(n));
      rot_seen.assign(static_cast<std::size_t>(n), 0);
      rot_line.assign(static_cast<std::size_t>(n), 0);
      pts.resize(static_cast<std::size_t>(n));
      continue;
    }
    auto vertex_ok = [&](long long v) { return v >= 0 && v < n; };
    if (tag == "v") {
      long long id;
      double x, y;
      if (!(ls >> id >> x >> y)) throw GraphFormatError(lineno, "malformed vertex record");
      if (!vertex_ok(id)) throw GraphFormatError(lineno, "unknown vertex " + std::to_string(id));
      pts[static_cast<std::size_t>(id)] = {x, y};
      any_coords = true;
    } else if (tag == "e") {
      long long id, u, v, w;
      if (!(ls >> id >> u >> v >> w)) throw GraphFormatError(lineno, "malformed edge record");
      if (id < 0 || id >= m) throw GraphFormatError(lineno, "unknown edge " + std::to_string(id));
      if (!vertex_ok(u)) throw GraphFormatError(lineno, "unknown vertex " + std::to_string(u));
      if (!vertex_ok(v)) throw GraphFormatError(lineno, "unknown vertex " + std::to_string(v));
      if (edge_seen[static_cast<std::size_t>(id)])
        throw GraphFormatError(lineno, "duplicate edge " + std::to_string(id));
      if (u == v) throw GraphFormatError(lineno, "self-loop");
      if (w < denom) throw GraphFormatError(lineno, "weight below 1");
      edges[static_cast<std::size_t>(id)] = {static_cast<VertexId>(u), static_cast<VertexId>(v), w};
      edge_seen[static_cast<std::size_t>(id)] = 1;
      edge_line[static_cast<std::size_t>(id)] = lineno;
    } else if (tag == "r") {
      long long v;
      if (!(ls >> v)) throw GraphFormatError(lineno, "malformed rotation record");
      if (!vertex_ok(v)) throw GraphFormatError(lineno, "unknown vertex " + std::to_string(v));
      if (rot_seen[static_cast<std::size_t>(v)])
        throw GraphFormatError(lineno, "duplicate rotation for vertex " + std::to_string(v));
      rot_seen[static_cast<std::size_t>(v)] = 1;
      rot_line[static_cast<std::size_t>(v)] = lineno;
      long long e;
      while (ls >> e) {
        if (e < 0 || e >= m) throw GraphFormatError(lineno, "unknown edge " + std::to_string(e));
        rot[static_cast<std::size_t>(v)].push_back(static_cast<EdgeId>(e));
      }
      if (!ls.eof()) throw GraphFormatError(lineno, "malformed rotation record");
    } else {
      throw GraphFormatError(lineno, "unknown record type '" + tag + "'");
    }
  }
  if (!have_header) throw GraphFormatError(lineno, "malformed header");
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (!edge_seen[e]) throw GraphFormatError(lineno, "missing edge " + std::to_string(e));

  // Cross-check rotations against the edge list, reporting the rotation line.
  for (VertexId v = 0; v < static_cast<VertexId>(n); ++v) {
    const auto vi = static_cast<std::size_t>(v);
    std::vector<EdgeId> expected;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].u == v || edges[e].v == v) expected.push_back(static_cast<EdgeId>(e));
    std::vector<EdgeId> got = rot[vi];
    std::sort(got.begin(), got.end());
    const std::size_t at = rot_seen[vi] ? rot_line[vi] : lineno;
    for (EdgeId e : got)
      if (!std::binary_search(expected.begin(), expected.end(), e))
        throw GraphFormatError(at, "rotation at v" + std::to_string(v) + " lists non-incident edge " +
                                       std::to_string(e));
    if (std::adjacent_find(got.begin(), got.end()) != got.end())
      throw GraphFormatError(at, "rotation at v" + std::to_string(v) + " repeats an edge");
    if (got.size() != expected.size())
      throw GraphFormatError(at, "rotation incomplete at v" + std::to_string(v));
  }
  try {
    return EmbeddedGraph(static_cast<VertexId>(n), std::move(edges), std::move(rot), denom,
                         any_coords ? std::optional<std::vector<Point>>(std::move(pts)) : std::nullopt,
                         opts);
  } catch (const GraphFormatError&) {
    throw;
  } catch (const GraphError& err) {
    throw GraphFormatError(lineno, err.what());
  }
}

inline void write_graph(const EmbeddedGraph& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw GraphError("cannot open " + path + " for writing");
  write_graph(g, os);
}

inline EmbeddedGraph read_graph(const std::string& path, const ValidationOptions& opts = {}) {
  std::ifstream is(path);
  if (!is) throw GraphError("cannot open " + path);
  return read_graph(is, opts);
}

}  // namespace planroute
