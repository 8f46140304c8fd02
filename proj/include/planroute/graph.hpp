#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planroute/rng.hpp"

namespace planroute {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;
/// Exact length as an integer numerator over a per-graph (or per-computation)
/// denominator. All distance comparisons in the library are integer comparisons.
using Length = std::int64_t;

inline constexpr VertexId kNoVertex = -1;
inline constexpr Length kInfiniteLength = std::numeric_limits<Length>::max() / 4;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId u{0};
  VertexId v{0};
  Length w{1};  // numerator; the graph's denominator gives the real weight

  VertexId other(VertexId x) const noexcept { return x == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Point {
  double x{0.0};
  double y{0.0};
  friend bool operator==(const Point&, const Point&) = default;
};

struct ValidationOptions {
  /// Weights must satisfy 1 <= w <= n^max_weight_exponent (at least 1).
  double max_weight_exponent{4.0};
  bool require_connected{true};
};

/// Weighted undirected planar graph with a combinatorial embedding. The
/// rotation of each vertex lists its incident edge ids in clockwise order.
/// Immutable after construction.
class EmbeddedGraph {
 public:
  EmbeddedGraph() = default;

  EmbeddedGraph(VertexId n, std::vector<Edge> edges, std::vector<std::vector<EdgeId>> rotation,
                Length denom = 1, std::optional<std::vector<Point>> coords = std::nullopt,
                const ValidationOptions& opts = {})
      : n_(n),
        edges_(std::move(edges)),
        rotation_(std::move(rotation)),
        denom_(denom),
        coords_(std::move(coords)) {
    validate(opts);
    build_index();
  }

  VertexId num_vertices() const noexcept { return n_; }
  EdgeId num_edges() const noexcept { return static_cast<EdgeId>(edges_.size()); }
  Length denominator() const noexcept { return denom_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const EdgeId> rotation(VertexId v) const {
    return rotation_[static_cast<std::size_t>(v)];
  }
  const std::vector<std::vector<EdgeId>>& rotations() const noexcept { return rotation_; }
  std::size_t degree(VertexId v) const { return rotation_[static_cast<std::size_t>(v)].size(); }
  const std::optional<std::vector<Point>>& coords() const noexcept { return coords_; }

  /// Position of edge e inside the rotation of its endpoint v.
  std::size_t rotation_index(VertexId v, EdgeId e) const {
    const Edge& ed = edge(e);
    return ed.u == v ? slot_u_[static_cast<std::size_t>(e)] : slot_v_[static_cast<std::size_t>(e)];
  }

  Length max_weight() const noexcept {
    Length m = 0;
    for (const auto& e : edges_) m = std::max(m, e.w);
    return m;
  }

  double weight_as_double(EdgeId e) const {
    return static_cast<double>(edge(e).w) / static_cast<double>(denom_);
  }

  /// Edge id between u and v, or -1. Linear in deg(u).
  EdgeId find_edge(VertexId u, VertexId v) const {
    for (EdgeId e : rotation(u))
      if (edge(e).other(u) == v) return e;
    return -1;
  }

  friend bool operator==(const EmbeddedGraph& a, const EmbeddedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.rotation_ == b.rotation_ &&
           a.denom_ == b.denom_ && a.coords_ == b.coords_;
  }

 private:
  void validate(const ValidationOptions& opts) const {
    if (n_ < 0) throw GraphError("negative vertex count");
    if (denom_ < 1) throw GraphError("denominator must be positive");
    if (rotation_.size() != static_cast<std::size_t>(n_))
      throw GraphError("rotation system must list every vertex");
    if (coords_ && coords_->size() != static_cast<std::size_t>(n_))
      throw GraphError("coordinate count differs from vertex count");
    const double wmax = std::max(1.0, std::pow(static_cast<double>(std::max<VertexId>(n_, 1)),
                                               opts.max_weight_exponent));
    std::vector<int> seen(edges_.size(), 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
        throw GraphError("edge " + std::to_string(i) + ": unknown vertex");
      if (e.u == e.v) throw GraphError("edge " + std::to_string(i) + ": self-loop");
      if (e.w < denom_) throw GraphError("edge " + std::to_string(i) + ": weight below 1");
      if (static_cast<double>(e.w) / static_cast<double>(denom_) > wmax)
        throw GraphError("edge " + std::to_string(i) + ": weight above W");
    }
    for (VertexId v = 0; v < n_; ++v) {
      for (EdgeId e : rotation_[static_cast<std::size_t>(v)]) {
        if (e < 0 || static_cast<std::size_t>(e) >= edges_.size())
          throw GraphError("rotation at " + std::to_string(v) + ": unknown edge");
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.u != v && ed.v != v)
          throw GraphError("rotation at " + std::to_string(v) + ": edge not incident");
        ++seen[static_cast<std::size_t>(e)];
      }
    }
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (seen[i] != 2)
        throw GraphError("rotation incomplete at v" +
                         std::to_string(seen[i] < 2 ? edges_[i].u : edges_[i].v) + " (edge " +
                         std::to_string(i) + ")");
    if (n_ >= 3 && edges_.size() > static_cast<std::size_t>(3 * n_ - 6))
      throw GraphError("too many edges for a simple planar graph");
    if (opts.require_connected && n_ > 0) {
      std::vector<char> mark(static_cast<std::size_t>(n_), 0);
      std::vector<VertexId> stack{0};
      mark[0] = 1;
      VertexId count = 1;
      while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId e : rotation_[static_cast<std::size_t>(v)]) {
          VertexId w = edges_[static_cast<std::size_t>(e)].other(v);
          if (!mark[static_cast<std::size_t>(w)]) {
            mark[static_cast<std::size_t>(w)] = 1;
            ++count;
            stack.push_back(w);
          }
        }
      }
      if (count != n_) throw GraphError("graph is not connected");
    }
  }

  void build_index() {
    slot_u_.assign(edges_.size(), 0);
    slot_v_.assign(edges_.size(), 0);
    for (VertexId v = 0; v < n_; ++v) {
      const auto& rot = rotation_[static_cast<std::size_t>(v)];
      for (std::size_t i = 0; i < rot.size(); ++i) {
        const Edge& ed = edges_[static_cast<std::size_t>(rot[i])];
        (ed.u == v ? slot_u_ : slot_v_)[static_cast<std::size_t>(rot[i])] = i;
      }
    }
  }

  VertexId n_{0};
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> rotation_;
  Length denom_{1};
  std::optional<std::vector<Point>> coords_;
  std::vector<std::size_t> slot_u_;
  std::vector<std::size_t> slot_v_;
};

/// Vertex subset of an EmbeddedGraph. The induced subgraph inherits the
/// rotation order of the parent by deleting non-member entries.
struct SubgraphMask {
  std::vector<char> member;

  static SubgraphMask all(VertexId n) { return {std::vector<char>(static_cast<std::size_t>(n), 1)}; }
  static SubgraphMask none(VertexId n) { return {std::vector<char>(static_cast<std::size_t>(n), 0)}; }
  static SubgraphMask of(VertexId n, std::span<const VertexId> vs) {
    SubgraphMask m = none(n);
    for (VertexId v : vs) m.member[static_cast<std::size_t>(v)] = 1;
    return m;
  }

  bool contains(VertexId v) const { return member[static_cast<std::size_t>(v)] != 0; }
  VertexId size() const {
    return static_cast<VertexId>(std::count(member.begin(), member.end(), 1));
  }
  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    for (std::size_t v = 0; v < member.size(); ++v)
      if (member[v]) out.push_back(static_cast<VertexId>(v));
    return out;
  }
};

/// Connected components of the subgraph induced by `mask`, each sorted by id,
/// listed in order of their smallest vertex.
inline std::vector<std::vector<VertexId>> connected_components(const EmbeddedGraph& g,
                                                               const SubgraphMask& mask) {
  std::vector<std::vector<VertexId>> comps;
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < g.num_vertices(); ++s) {
    if (!mask.contains(s) || seen[static_cast<std::size_t>(s)]) continue;
    std::vector<VertexId> comp;
    stack.assign(1, s);
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (EdgeId e : g.rotation(v)) {
        VertexId w = g.edge(e).other(v);
        if (mask.contains(w) && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// ---------------------------------------------------------------------------
// Faces

/// A dart is a directed edge slot: dart 2e runs edges[e].u -> edges[e].v and
/// dart 2e+1 runs the other way.
using Dart = std::int32_t;

inline VertexId dart_tail(const EmbeddedGraph& g, Dart d) {
  const Edge& e = g.edge(d / 2);
  return (d % 2 == 0) ? e.u : e.v;
}
inline VertexId dart_head(const EmbeddedGraph& g, Dart d) {
  const Edge& e = g.edge(d / 2);
  return (d % 2 == 0) ? e.v : e.u;
}

/// Face boundaries of the embedding. After arriving at v through edge e, a
/// face walk continues with the clockwise successor of e in v's rotation.
/// Every dart lies on exactly one face. A graph without edges has one empty face.
inline std::vector<std::vector<Dart>> faces(const EmbeddedGraph& g) {
  std::vector<std::vector<Dart>> out;
  const auto m = static_cast<std::size_t>(g.num_edges());
  if (m == 0) {
    if (g.num_vertices() > 0) out.emplace_back();
    return out;
  }
  std::vector<char> used(2 * m, 0);
  for (Dart start = 0; start < static_cast<Dart>(2 * m); ++start) {
    if (used[static_cast<std::size_t>(start)]) continue;
    std::vector<Dart> face;
    Dart d = start;
    while (!used[static_cast<std::size_t>(d)]) {
      used[static_cast<std::size_t>(d)] = 1;
      face.push_back(d);
      VertexId v = dart_head(g, d);
      EdgeId e = d / 2;
      auto rot = g.rotation(v);
      EdgeId next = rot[(g.rotation_index(v, e) + 1) % rot.size()];
      d = 2 * next + (g.edge(next).u == v ? 0 : 1);
    }
    if (d != start) throw GraphError("face walk did not close; embedding invalid");
    out.push_back(std::move(face));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

struct WeightDist {
  enum class Kind { Unit, Uniform };
  Kind kind{Kind::Unit};
  /// For Uniform: numerators drawn uniformly from [lo*denom, hi*denom].
  std::int64_t lo{1};
  std::int64_t hi{1};
  Length denom{1};

  static WeightDist unit() { return {}; }
  static WeightDist uniform(std::int64_t lo, std::int64_t hi, Length denom = 1) {
    return {Kind::Uniform, lo, hi, denom};
  }
};

namespace detail {

/// Sorts every vertex's incident edges clockwise by angle (y axis up),
/// starting from straight north.
inline std::vector<std::vector<EdgeId>> rotation_from_coords(VertexId n, const std::vector<Edge>& edges,
                                                             const std::vector<Point>& pts) {
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    rot[static_cast<std::size_t>(edges[i].u)].push_back(static_cast<EdgeId>(i));
    rot[static_cast<std::size_t>(edges[i].v)].push_back(static_cast<EdgeId>(i));
  }
  for (VertexId v = 0; v < n; ++v) {
    auto& r = rot[static_cast<std::size_t>(v)];
    const Point p = pts[static_cast<std::size_t>(v)];
    auto bearing = [&](EdgeId e) {
      const Point q = pts[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].other(v))];
      double a = std::atan2(q.x - p.x, q.y - p.y);  // 0 = north, increasing clockwise
      if (a < 0) a += 2 * std::acos(-1.0);
      return a;
    };
    std::sort(r.begin(), r.end(), [&](EdgeId a, EdgeId b) { return bearing(a) < bearing(b); });
  }
  return rot;
}

inline void draw_weights(std::vector<Edge>& edges, const WeightDist& dist, std::uint64_t seed) {
  SplitMix64 rng(hash_keys(seed, {0x77656967ULL}));
  for (auto& e : edges) {
    e.w = dist.kind == WeightDist::Kind::Unit
              ? dist.denom
              : rng.uniform_int(dist.lo * dist.denom, dist.hi * dist.denom);
  }
}

inline EmbeddedGraph lattice(int rows, int cols, bool diagonals, const WeightDist& dist,
                             std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw GraphError("grid dimensions must be positive");
  const VertexId n = rows * cols;
  auto id = [cols](int r, int c) { return static_cast<VertexId>(r * cols + c); };
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) pts[static_cast<std::size_t>(id(r, c))] = {double(c), -double(r)};
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1});
      if (diagonals && r + 1 < rows && c + 1 < cols) edges.push_back({id(r, c), id(r + 1, c + 1), 1});
    }
  draw_weights(edges, dist, seed);
  auto rot = rotation_from_coords(n, edges, pts);
  return EmbeddedGraph(n, std::move(edges), std::move(rot), dist.denom, std::move(pts));
}

}  // namespace detail

/// rows x cols grid; rotation order N, E, S, W.
inline EmbeddedGraph generate_grid(int rows, int cols, const WeightDist& dist = WeightDist::unit(),
                                   std::uint64_t seed = 0) {
  return detail::lattice(rows, cols, false, dist, seed);
}

/// Grid with the down-right diagonal of every unit square; all inner faces are triangles.
inline EmbeddedGraph generate_triangulated_grid(int rows, int cols,
                                                const WeightDist& dist = WeightDist::unit(),
                                                std::uint64_t seed = 0) {
  if (rows < 2 || cols < 2) throw GraphError("triangulated grid needs at least 2x2");
  return detail::lattice(rows, cols, true, dist, seed);
}

/// Path v0 - v1 - ... with the given numerators.
inline EmbeddedGraph make_path(std::span<const Length> weights, Length denom = 1) {
  const auto n = static_cast<VertexId>(weights.size() + 1);
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + 1), weights[i]});
    rot[i].push_back(static_cast<EdgeId>(i));
    rot[i + 1].push_back(static_cast<EdgeId>(i));
  }
  return EmbeddedGraph(n, std::move(edges), std::move(rot), denom);
}

inline EmbeddedGraph make_unit_path(VertexId n) {
  std::vector<Length> w(static_cast<std::size_t>(std::max<VertexId>(n - 1, 0)), 1);
  return make_path(w);
}

/// Star with center 0 and `leaves` leaves.
inline EmbeddedGraph make_star(VertexId leaves, Length w = 1) {
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(leaves + 1));
  for (VertexId i = 1; i <= leaves; ++i) {
    edges.push_back({0, i, w});
    rot[0].push_back(i - 1);
    rot[static_cast<std::size_t>(i)].push_back(i - 1);
  }
  return EmbeddedGraph(leaves + 1, std::move(edges), std::move(rot));
}

/// Embeds a tree given by parent links (parent[root] = kNoVertex); children are
/// placed in increasing id order around each vertex. Any rotation of a tree is planar.
inline EmbeddedGraph make_tree(std::span<const VertexId> parent, std::span<const Length> weight = {}) {
  const auto n = static_cast<VertexId>(parent.size());
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    VertexId p = parent[static_cast<std::size_t>(v)];
    if (p == kNoVertex) continue;
    const auto e = static_cast<EdgeId>(edges.size());
    edges.push_back({p, v, weight.empty() ? 1 : weight[static_cast<std::size_t>(v)]});
    rot[static_cast<std::size_t>(p)].push_back(e);
    rot[static_cast<std::size_t>(v)].push_back(e);
  }
  return EmbeddedGraph(n, std::move(edges), std::move(rot));
}

/// Uniformly random recursive tree: parent of v is uniform in [0, v).
inline std::vector<VertexId> random_parents(VertexId n, std::uint64_t seed) {
  SplitMix64 rng(hash_keys(seed, {0x74726565ULL}));
  std::vector<VertexId> parent(static_cast<std::size_t>(n), kNoVertex);
  for (VertexId v = 1; v < n; ++v) parent[static_cast<std::size_t>(v)] = static_cast<VertexId>(rng.uniform_int(0, v - 1));
  return parent;
}

}  // namespace planroute
