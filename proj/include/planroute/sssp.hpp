#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "planroute/graph.hpp"
#include "planroute/rng.hpp"

namespace planroute {

class SsspError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sources for a shortest-path computation. Every source hangs off a virtual
/// super-source by an edge of length `offset` (0 for plain sources), which is
/// how the clustering's "(s, x, Delta - delta_x)" edges are expressed.
struct SourceSpec {
  struct Source {
    VertexId vertex{kNoVertex};
    Length offset{0};
  };
  std::vector<Source> sources;

  static SourceSpec single(VertexId v) { return {{{v, 0}}}; }
  static SourceSpec set(std::span<const VertexId> vs) {
    SourceSpec s;
    for (VertexId v : vs) s.sources.push_back({v, 0});
    return s;
  }
};

enum class SsspMode { Exact, StretchNoise };

struct SsspOptions {
  /// Edge numerators are multiplied by `scale`; distances come back in those units.
  Length scale{1};
  /// Vertices whose exact distance exceeds the cutoff are left unreached.
  Length cutoff{kInfiniteLength};
  double eps{0.0};
  SsspMode mode{SsspMode::Exact};
  std::uint64_t seed{0};
};

/// Shortest-path forest over the induced subgraph of a mask. Unreached
/// vertices have dist == kInfiniteLength and root == kNoVertex.
struct SsspForest {
  std::vector<Length> dist;
  std::vector<VertexId> parent;
  std::vector<VertexId> root;
  Length scale{1};

  bool reached(VertexId v) const { return dist[static_cast<std::size_t>(v)] < kInfiniteLength; }
  Length dist_of(VertexId v) const { return dist[static_cast<std::size_t>(v)]; }
  VertexId parent_of(VertexId v) const { return parent[static_cast<std::size_t>(v)]; }
  VertexId root_of(VertexId v) const { return root[static_cast<std::size_t>(v)]; }

  /// Vertex sequence from v up to its root.
  std::vector<VertexId> path_to_root(VertexId v) const {
    std::vector<VertexId> p;
    for (; v != kNoVertex; v = parent_of(v)) p.push_back(v);
    return p;
  }
};

namespace detail {

inline void check_sources(const EmbeddedGraph& g, const SubgraphMask& mask, const SourceSpec& src) {
  if (src.sources.empty()) throw SsspError("no source given");
  for (const auto& s : src.sources) {
    if (s.vertex < 0 || s.vertex >= g.num_vertices()) throw SsspError("source id out of range");
    if (!mask.contains(s.vertex)) throw SsspError("source outside mask");
    if (s.offset < 0) throw SsspError("negative virtual edge weight");
  }
}

/// Dijkstra over the mask. Among equal lengths the smaller last-hop id wins;
/// the virtual super-source counts as id -1. `order` receives vertices in
/// settle order.
inline SsspForest dijkstra(const EmbeddedGraph& g, const SubgraphMask& mask, const SourceSpec& src,
                           Length scale, Length cutoff, std::vector<VertexId>* order) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  SsspForest f{std::vector<Length>(n, kInfiniteLength), std::vector<VertexId>(n, kNoVertex),
               std::vector<VertexId>(n, kNoVertex), scale};
  std::vector<char> done(n, 0);
  using Item = std::pair<Length, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& s : src.sources) {
    // Virtual edge lengths are already in scaled units.
    const auto v = static_cast<std::size_t>(s.vertex);
    if (s.offset > cutoff || s.offset >= f.dist[v]) continue;
    f.dist[v] = s.offset;
    f.root[v] = s.vertex;
    pq.push({s.offset, s.vertex});
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    const auto vi = static_cast<std::size_t>(v);
    if (done[vi] || d != f.dist[vi]) continue;
    done[vi] = 1;
    if (order) order->push_back(v);
    for (EdgeId e : g.rotation(v)) {
      const VertexId w = g.edge(e).other(v);
      const auto wi = static_cast<std::size_t>(w);
      if (!mask.contains(w) || done[wi]) continue;
      const Length nd = d + g.edge(e).w * scale;
      if (nd > cutoff) continue;
      if (nd < f.dist[wi] || (nd == f.dist[wi] && f.parent[wi] != kNoVertex && v < f.parent[wi])) {
        f.dist[wi] = nd;
        f.parent[wi] = v;
        f.root[wi] = f.root[vi];
        pq.push({nd, w});
      }
    }
  }
  return f;
}

}  // namespace detail

/// Exact shortest-path forest restricted to the subgraph induced by `mask`.
inline SsspForest exact_sssp(const EmbeddedGraph& g, const SubgraphMask& mask, const SourceSpec& src,
                             Length scale = 1, Length cutoff = kInfiniteLength) {
  detail::check_sources(g, mask, src);
  return detail::dijkstra(g, mask, src, scale, cutoff, nullptr);
}

/// (1+eps)-approximate forest: d_G <= dist <= (1+eps) d_G, tree-consistent.
///
/// In StretchNoise mode each vertex v, visited in exact settle order, draws a
/// slack s_v uniform in [1, 1+eps] and takes the longest candidate parent path
/// whose length is at most max(s_v * d_G(v), best candidate). Candidates are
/// already-visited neighbours plus the virtual source edge, so the result is
/// a forest whose distances telescope exactly.
inline SsspForest approx_sssp(const EmbeddedGraph& g, const SubgraphMask& mask, const SourceSpec& src,
                              const SsspOptions& opt = {}) {
  if (opt.eps < 0) throw SsspError("eps must be nonnegative");
  detail::check_sources(g, mask, src);
  if (opt.mode == SsspMode::Exact || opt.eps == 0.0)
    return detail::dijkstra(g, mask, src, opt.scale, opt.cutoff, nullptr);

  std::vector<VertexId> order;
  const SsspForest exact = detail::dijkstra(g, mask, src, opt.scale, opt.cutoff, &order);
  const auto n = static_cast<std::size_t>(g.num_vertices());
  SsspForest f{std::vector<Length>(n, kInfiniteLength), std::vector<VertexId>(n, kNoVertex),
               std::vector<VertexId>(n, kNoVertex), opt.scale};
  std::vector<Length> offset(n, kInfiniteLength);
  for (const auto& s : src.sources) {
    auto& o = offset[static_cast<std::size_t>(s.vertex)];
    o = std::min(o, s.offset);
  }
  std::vector<char> visited(n, 0);
  for (VertexId v : order) {
    const auto vi = static_cast<std::size_t>(v);
    const Length dv = exact.dist[vi];
    const double slack = 1.0 + opt.eps * to_unit(hash_keys(opt.seed, {static_cast<std::uint64_t>(v)}));
    // (length, parent) candidates; kNoVertex marks the virtual source edge.
    Length best = kInfiniteLength;
    std::vector<std::pair<Length, VertexId>> cands;
    if (offset[vi] < kInfiniteLength) {
      cands.push_back({offset[vi], kNoVertex});
      best = offset[vi];
    }
    for (EdgeId e : g.rotation(v)) {
      const VertexId u = g.edge(e).other(v);
      const auto ui = static_cast<std::size_t>(u);
      if (!mask.contains(u) || !visited[ui]) continue;
      const Length len = f.dist[ui] + g.edge(e).w * opt.scale;
      cands.push_back({len, u});
      best = std::min(best, len);
    }
    const Length budget =
        std::max(best, static_cast<Length>(std::floor(slack * static_cast<double>(dv))));
    Length pick_len = -1;
    VertexId pick = kNoVertex;
    for (auto [len, u] : cands) {
      if (len > budget) continue;
      if (len > pick_len || (len == pick_len && u < pick)) {
        pick_len = len;
        pick = u;
      }
    }
    f.dist[vi] = pick_len;
    f.parent[vi] = pick;
    f.root[vi] = pick == kNoVertex ? v : f.root[static_cast<std::size_t>(pick)];
    visited[vi] = 1;
  }
  return f;
}

/// One forest per (mask, group). Paths never leave their mask.
inline std::vector<std::vector<SsspForest>> multi_source_groups(
    const EmbeddedGraph& g, std::span<const SubgraphMask> masks,
    std::span<const std::vector<SourceSpec>> groups, const SsspOptions& opt = {}) {
  if (masks.size() != groups.size()) throw SsspError("one group list per mask required");
  std::vector<char> owner(static_cast<std::size_t>(g.num_vertices()), 0);
  for (const auto& m : masks)
    for (std::size_t v = 0; v < m.member.size(); ++v)
      if (m.member[v]) {
        if (owner[v]) throw SsspError("masks overlap at vertex " + std::to_string(v));
        owner[v] = 1;
      }
  std::vector<std::vector<SsspForest>> out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = 0; j < groups[i].size(); ++j) {
      SsspOptions o = opt;
      o.seed = hash_keys(opt.seed, {i, j});
      out[i].push_back(approx_sssp(g, masks[i], groups[i][j], o));
    }
  return out;
}

}  // namespace planroute
