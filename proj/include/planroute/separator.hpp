#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "planroute/graph.hpp"
#include "planroute/sssp.hpp"

namespace planroute {

class SeparatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euler tour of a spanning tree, as the cyclic sequence of corners it
/// visits. Corner k sits at the head of the k-th traversed tree edge, in the
/// sector between that edge and the next tree edge clockwise. A vertex of
/// tree degree d owns d corners, each weighted vertex_weight / d.
struct EulerTour {
  std::vector<VertexId> vertex;  // corner owner
  std::vector<EdgeId> edge;      // tree edge traversed into the corner
  std::vector<double> weight;

  std::size_t size() const noexcept { return vertex.size(); }
};

/// A balanced separator given as one tree path x -> lca -> y.
struct SeparatorPath {
  VertexId x{kNoVertex};
  VertexId y{kNoVertex};
  VertexId lca{kNoVertex};
  std::vector<VertexId> path;   // x ... lca ... y
  std::vector<VertexId> arm_x;  // lca ... x
  std::vector<VertexId> arm_y;  // lca ... y
  std::vector<std::vector<VertexId>> components;
  double region_weight{0.0};
  double max_component_weight{0.0};
  bool degenerate{false};
  /// Set when the step-4 pair failed validation and the exhaustive face search was used.
  bool used_fallback{false};
};

namespace detail {

struct TreeIndex {
  std::vector<VertexId> verts;
  VertexId root{kNoVertex};
  std::vector<char> is_tree_edge;
  std::vector<int> tree_degree;
};

inline TreeIndex index_tree(const EmbeddedGraph& g, const SubgraphMask& mask, const SsspForest& tree) {
  TreeIndex t;
  t.verts = mask.vertices();
  t.is_tree_edge.assign(static_cast<std::size_t>(g.num_edges()), 0);
  t.tree_degree.assign(static_cast<std::size_t>(g.num_vertices()), 0);
  for (VertexId v : t.verts) {
    if (!tree.reached(v)) throw SeparatorError("tree not spanning: vertex " + std::to_string(v) + " unreached");
    const VertexId p = tree.parent_of(v);
    if (p == kNoVertex) {
      if (t.root != kNoVertex) throw SeparatorError("tree not spanning: several roots in region");
      t.root = v;
      continue;
    }
    if (!mask.contains(p)) throw SeparatorError("tree leaves the region at " + std::to_string(v));
    const EdgeId e = g.find_edge(v, p);
    if (e < 0) throw SeparatorError("tree parent is not adjacent");
    t.is_tree_edge[static_cast<std::size_t>(e)] = 1;
    ++t.tree_degree[static_cast<std::size_t>(v)];
    ++t.tree_degree[static_cast<std::size_t>(p)];
  }
  if (t.root == kNoVertex && !t.verts.empty()) throw SeparatorError("tree not spanning: no root");
  return t;
}

/// Next tree edge clockwise after rotation slot `slot` at v (exclusive).
inline EdgeId next_tree_edge(const EmbeddedGraph& g, const TreeIndex& t, VertexId v, std::size_t slot) {
  auto rot = g.rotation(v);
  for (std::size_t k = 1; k <= rot.size(); ++k) {
    EdgeId e = rot[(slot + k) % rot.size()];
    if (t.is_tree_edge[static_cast<std::size_t>(e)]) return e;
  }
  return -1;
}

/// Previous tree edge counterclockwise from slot (exclusive).
inline EdgeId prev_tree_edge(const EmbeddedGraph& g, const TreeIndex& t, VertexId v, std::size_t slot) {
  auto rot = g.rotation(v);
  for (std::size_t k = 1; k <= rot.size(); ++k) {
    EdgeId e = rot[(slot + rot.size() - k) % rot.size()];
    if (t.is_tree_edge[static_cast<std::size_t>(e)]) return e;
  }
  return -1;
}

inline EulerTour build_tour(const EmbeddedGraph& g, const TreeIndex& t, std::span<const double> vweight) {
  EulerTour tour;
  if (t.verts.size() < 2) return tour;
  const VertexId r = t.root;
  EdgeId first = -1;
  for (EdgeId e : g.rotation(r))
    if (t.is_tree_edge[static_cast<std::size_t>(e)]) {
      first = e;
      break;
    }
  VertexId at = r;
  EdgeId e = first;
  const std::size_t expected = 2 * (t.verts.size() - 1);
  do {
    const VertexId head = g.edge(e).other(at);
    tour.vertex.push_back(head);
    tour.edge.push_back(e);
    const double w = vweight.empty() ? 1.0 : vweight[static_cast<std::size_t>(head)];
    tour.weight.push_back(w / t.tree_degree[static_cast<std::size_t>(head)]);
    const EdgeId next = next_tree_edge(g, t, head, g.rotation_index(head, e));
    at = head;
    e = next;
    if (tour.vertex.size() > expected) throw SeparatorError("Euler tour does not close");
  } while (!(at == r && e == first));
  if (tour.size() != expected) throw SeparatorError("tree not spanning: tour misses vertices");
  return tour;
}

struct Chord {
  std::int64_t p;
  std::int64_t q;  // p < q, corner positions
};

/// Corner lookup: position of the corner entered through tree edge e at its endpoint v.
struct CornerIndex {
  std::vector<std::int64_t> at_u;
  std::vector<std::int64_t> at_v;
  std::int64_t get(const EmbeddedGraph& g, EdgeId e, VertexId v) const {
    return g.edge(e).u == v ? at_u[static_cast<std::size_t>(e)] : at_v[static_cast<std::size_t>(e)];
  }
};

}  // namespace detail

inline EulerTour euler_tour(const EmbeddedGraph& g, const SubgraphMask& mask, const SsspForest& tree,
                            std::span<const double> vertex_weight = {}) {
  const auto t = detail::index_tree(g, mask, tree);
  return detail::build_tour(g, t, vertex_weight);
}

/// Balanced path separator of a connected region, given a spanning tree of
/// it rooted at one vertex. The tree is cut open along its Euler tour; every
/// non-tree edge becomes a chord between the corners whose sectors contain
/// it. The chords are non-crossing and split the disk into faces; starting
/// from the outer side we move across any chord that hides more than half of
/// the weight. On the resulting face, with z0 its first corner in tour order,
/// y' is the last corner whose weight strictly after z0 is at most 2W/3;
/// x' is the next face corner z1 when more than W/3 lies between y' and z1,
/// else z0. The answer is the tree path between the owners of x' and y'.
inline SeparatorPath find_separator(const EmbeddedGraph& g, const SubgraphMask& mask, const SsspForest& tree,
                                    std::span<const double> vertex_weight = {}) {
  SeparatorPath out;
  const auto t = detail::index_tree(g, mask, tree);
  auto vw = [&](VertexId v) { return vertex_weight.empty() ? 1.0 : vertex_weight[static_cast<std::size_t>(v)]; };
  for (VertexId v : t.verts) out.region_weight += vw(v);

  if (t.verts.size() <= 2) {
    out.degenerate = true;
    if (t.verts.empty()) return out;
    out.lca = t.root;
    out.x = t.root;
    out.y = t.verts.size() == 2 ? (t.verts[0] == t.root ? t.verts[1] : t.verts[0]) : t.root;
    out.arm_x = {t.root};
    out.arm_y = out.x == out.y ? std::vector<VertexId>{t.root} : std::vector<VertexId>{t.root, out.y};
    out.path = out.x == out.y ? std::vector<VertexId>{t.root} : std::vector<VertexId>{t.root, out.y};
    return out;
  }

  const EulerTour tour = detail::build_tour(g, t, vertex_weight);
  const auto L = static_cast<std::int64_t>(tour.size());
  detail::CornerIndex ci{std::vector<std::int64_t>(static_cast<std::size_t>(g.num_edges()), -1),
                         std::vector<std::int64_t>(static_cast<std::size_t>(g.num_edges()), -1)};
  for (std::int64_t k = 0; k < L; ++k) {
    const EdgeId e = tour.edge[static_cast<std::size_t>(k)];
    (g.edge(e).u == tour.vertex[static_cast<std::size_t>(k)] ? ci.at_u : ci.at_v)[static_cast<std::size_t>(e)] = k;
  }

  std::vector<detail::Chord> chords;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (t.is_tree_edge[static_cast<std::size_t>(e)] || !mask.contains(ed.u) || !mask.contains(ed.v)) continue;
    const EdgeId eu = detail::prev_tree_edge(g, t, ed.u, g.rotation_index(ed.u, e));
    const EdgeId ev = detail::prev_tree_edge(g, t, ed.v, g.rotation_index(ed.v, e));
    std::int64_t a = ci.get(g, eu, ed.u), b = ci.get(g, ev, ed.v);
    if (a > b) std::swap(a, b);
    if (a == b) throw SeparatorError("chord with coincident corners; embedding invalid");
    chords.push_back({a, b});
  }
  std::sort(chords.begin(), chords.end(),
            [](const detail::Chord& l, const detail::Chord& r) { return l.p != r.p ? l.p < r.p : l.q > r.q; });

  // Laminar family of chord intervals; node 0 is the outer side.
  const std::size_t nodes = chords.size() + 1;
  std::vector<std::vector<std::size_t>> children(nodes);
  {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < chords.size(); ++i) {
      const auto& c = chords[i];
      while (!stack.empty() && chords[stack.back() - 1].q <= c.p) stack.pop_back();
      if (!stack.empty() && c.q > chords[stack.back() - 1].q)
        throw SeparatorError("crossing chords; rotation system is not a planar embedding");
      children[stack.empty() ? 0 : stack.back()].push_back(i + 1);
      stack.push_back(i + 1);
    }
  }

  std::vector<double> prefix(static_cast<std::size_t>(L) + 1, 0.0);
  for (std::int64_t k = 0; k < L; ++k)
    prefix[static_cast<std::size_t>(k + 1)] = prefix[static_cast<std::size_t>(k)] + tour.weight[static_cast<std::size_t>(k)];
  const double W = prefix.back();
  const double tol = 1e-9 * std::max(1.0, W);
  auto strictly_between = [&](std::int64_t a, std::int64_t b) {  // forward, cyclic, exclusive
    if (a == b) return W - tour.weight[static_cast<std::size_t>(a)];
    if (a < b) return prefix[static_cast<std::size_t>(b)] - prefix[static_cast<std::size_t>(a + 1)];
    return (W - prefix[static_cast<std::size_t>(a + 1)]) + prefix[static_cast<std::size_t>(b)];
  };
  auto inside = [&](std::size_t node) {
    const auto& c = chords[node - 1];
    return strictly_between(c.p, c.q);
  };
  auto face_corners = [&](std::size_t node) {
    std::int64_t lo = 0, hi = L - 1;
    if (node != 0) {
      lo = chords[node - 1].p;
      hi = chords[node - 1].q;
    }
    std::vector<std::int64_t> out_corners;
    std::int64_t k = lo;
    for (std::size_t child : children[node]) {
      const auto& c = chords[child - 1];
      for (; k <= c.p; ++k) out_corners.push_back(k);
      k = c.q;
    }
    for (; k <= hi; ++k) out_corners.push_back(k);
    return out_corners;
  };

  std::size_t face = 0;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t child : children[face])
      if (inside(child) > W / 2 + tol) {
        face = child;
        moved = true;
        break;
      }
  }

  auto finish = [&](std::int64_t xc, std::int64_t yc) {
    SeparatorPath s;
    s.region_weight = out.region_weight;
    s.x = tour.vertex[static_cast<std::size_t>(xc)];
    s.y = tour.vertex[static_cast<std::size_t>(yc)];
    auto px = tree.path_to_root(s.x), py = tree.path_to_root(s.y);
    std::reverse(px.begin(), px.end());
    std::reverse(py.begin(), py.end());
    std::size_t common = 0;
    while (common < px.size() && common < py.size() && px[common] == py[common]) ++common;
    s.lca = px[common - 1];
    s.arm_x.assign(px.begin() + static_cast<std::ptrdiff_t>(common - 1), px.end());
    s.arm_y.assign(py.begin() + static_cast<std::ptrdiff_t>(common - 1), py.end());
    s.path.assign(s.arm_x.rbegin(), s.arm_x.rend());
    s.path.insert(s.path.end(), s.arm_y.begin() + 1, s.arm_y.end());
    SubgraphMask rest = mask;
    for (VertexId v : s.path) rest.member[static_cast<std::size_t>(v)] = 0;
    s.components = connected_components(g, rest);
    for (const auto& comp : s.components) {
      double w = 0;
      for (VertexId v : comp) w += vw(v);
      s.max_component_weight = std::max(s.max_component_weight, w);
    }
    return s;
  };
  auto balanced = [&](const SeparatorPath& s) { return s.max_component_weight <= 2.0 * W / 3.0 + tol; };

  const auto F = face_corners(face);
  SeparatorPath best;
  bool have = false;
  if (F.size() >= 2) {
    const std::int64_t z0 = F.front();
    std::size_t yi = 0;
    for (std::size_t j = 1; j < F.size(); ++j)
      if (strictly_between(z0, F[j]) <= 2.0 * W / 3.0 + tol) yi = j;
    if (yi == 0) yi = 1;
    const std::int64_t yc = F[yi];
    std::int64_t xc = z0;
    if (yi + 1 < F.size() && strictly_between(yc, F[yi + 1]) > W / 3.0 + tol) xc = F[yi + 1];
    best = finish(xc, yc);
    have = balanced(best);
  }
  if (!have) {
    // Exhaustive search over corner pairs sharing a face.
    double best_w = std::numeric_limits<double>::infinity();
    for (std::size_t node = 0; node < nodes; ++node) {
      const auto C = face_corners(node);
      for (std::size_t i = 0; i < C.size(); ++i)
        for (std::size_t j = i + 1; j < C.size(); ++j) {
          const double m = std::max(strictly_between(C[i], C[j]), strictly_between(C[j], C[i]));
          if (m < best_w) {
            best_w = m;
            best = finish(C[i], C[j]);
            best.used_fallback = true;
          }
        }
    }
  }
  return best;
}

/// One separator per disjoint region, each from an approximate SSSP tree
/// rooted at the region's smallest vertex.
inline std::vector<SeparatorPath> separate_all(const EmbeddedGraph& g, std::span<const std::vector<VertexId>> regions,
                                               const SsspOptions& opt = {}) {
  std::vector<char> owner(static_cast<std::size_t>(g.num_vertices()), 0);
  for (const auto& r : regions)
    for (VertexId v : r) {
      if (owner[static_cast<std::size_t>(v)]) throw SeparatorError("regions overlap");
      owner[static_cast<std::size_t>(v)] = 1;
    }
  std::vector<SeparatorPath> out;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    if (r.empty()) throw SeparatorError("empty region");
    const SubgraphMask m = SubgraphMask::of(g.num_vertices(), r);
    SsspOptions o = opt;
    o.seed = hash_keys(opt.seed, {i});
    const auto tree = approx_sssp(g, m, SourceSpec::single(*std::min_element(r.begin(), r.end())), o);
    out.push_back(find_separator(g, m, tree));
  }
  return out;
}

}  // namespace planroute
