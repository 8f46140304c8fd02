#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "planroute/decomposition.hpp"
#include "planroute/graph.hpp"
#include "planroute/separator.hpp"
#include "planroute/sssp.hpp"
#include "planroute/tree_routing.hpp"

namespace planroute {

class TreeCoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int ceil_log2(std::int64_t n) {
  int k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

struct CoverParams {
  double delta{1.0};
  double eps{0.5};
  double c_pd{0.0};     // partition diameter multiplier
  double eps_pd{0.0};   // decomposition error
  double eps_s{0.0};    // separator tree error
  double eps_p{0.0};    // portal spacing, in units of delta
  double eps_t{0.0};    // portal tree error
  int max_recursions{0};
  int repetitions{1};
  SsspMode mode{SsspMode::Exact};
  /// Verify strong diameters of every partition (all-pairs; test instances only).
  bool audit_partitions{false};

  /// Defaults for an n-vertex graph. The partition multiplier is
  /// min(6400 lg^2, 8 lg) with lg = ceil(log2 n); the separator error shrinks
  /// with it.
  static CoverParams defaults(double delta, double eps, VertexId n) {
    const double lg = std::max(1, ceil_log2(n));
    CoverParams p;
    p.delta = delta;
    p.eps = eps;
    p.c_pd = std::min(6400.0 * lg * lg, 8.0 * lg);
    p.eps_pd = 1.0 / p.c_pd;
    p.eps_s = eps / p.c_pd;
    p.eps_p = eps / 6.0;
    p.eps_t = eps / 6.0;
    p.max_recursions = 6 * static_cast<int>(lg);
    p.repetitions = std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(std::max<VertexId>(n, 2)))));
    return p;
  }

  /// As defaults, but with the unreduced multiplier 6400 lg^2. Partitions
  /// then essentially never cut small instances.
  static CoverParams full_multiplier(double delta, double eps, VertexId n) {
    CoverParams p = defaults(delta, eps, n);
    const double lg = std::max(1, ceil_log2(n));
    p.c_pd = 6400.0 * lg * lg;
    p.eps_pd = 1.0 / p.c_pd;
    p.eps_s = eps / p.c_pd;
    return p;
  }

  void validate() const {
    if (delta <= 0) throw TreeCoverError("delta must be positive");
    if (!(eps > 0 && eps_pd > 0 && eps_s > 0 && eps_p > 0 && eps_t > 0))
      throw TreeCoverError("all error parameters must be positive");
    if (c_pd <= 0) throw TreeCoverError("partition multiplier must be positive");
    if (max_recursions < 1 || repetitions < 1) throw TreeCoverError("recursion cap and repetitions must be >= 1");
  }
};

struct Portal {
  int path_id{0};
  VertexId vertex{kNoVertex};
  std::int64_t distance_class{1};
};

/// Portals on a path whose along-path distance from its first node is
/// `along` (same units as `spacing`). A node's class is the smallest i >= 1
/// with along <= i * spacing; the first node and every node whose
/// predecessor sits in a lower class become portals.
inline std::vector<Portal> make_portals(std::span<const VertexId> path, std::span<const Length> along,
                                        double spacing, int path_id = 0) {
  if (path.size() != along.size()) throw TreeCoverError("path and distances differ in length");
  if (!(spacing > 0)) throw TreeCoverError("portal spacing must be positive");
  std::vector<Portal> out;
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto cls = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(static_cast<double>(along[i]) / spacing - 1e-12)));
    if (i == 0 || cls > prev) out.push_back({path_id, path[i], cls});
    prev = cls;
  }
  return out;
}

/// make_portals with along-path distances read from graph weights and
/// spacing eps_p * delta (graph units).
inline std::vector<Portal> make_portals(const EmbeddedGraph& g, std::span<const VertexId> path, double eps_p,
                                        double delta, int path_id = 0) {
  std::vector<Length> along(path.size(), 0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const EdgeId e = g.find_edge(path[i - 1], path[i]);
    if (e < 0) throw TreeCoverError("portal path is not a path in the graph");
    along[i] = along[i - 1] + g.edge(e).w;
  }
  return make_portals(path, along, eps_p * delta * static_cast<double>(g.denominator()), path_id);
}

/// One tree grown from a portal, cut at root distance 2 delta.
/// Distances are graph numerators (denominator of the graph).
struct CoverTree {
  std::uint64_t id{0};
  int repetition{0};
  int level{0};  // recursion level
  VertexId partition_center{kNoVertex};
  VertexId portal{kNoVertex};
  RootedTree tree;
};

inline std::uint64_t cover_tree_id(std::uint64_t cover_key, int repetition, int level, VertexId center,
                                   VertexId portal) {
  return hash_keys(cover_key, {static_cast<std::uint64_t>(repetition), static_cast<std::uint64_t>(level),
                               static_cast<std::uint64_t>(center), static_cast<std::uint64_t>(portal)});
}

struct CoverLevelStats {
  int components{0};
  int partitions{0};
  int separator_vertices{0};
  int portals{0};
  int trees{0};
  int max_component{0};
};

struct SeparatorAudit {
  int separators{0};
  int degenerate{0};
  int fallbacks{0};
  int balance_violations{0};  // max component > ceil(2/3 region)
  int arm_violations{0};      // more than two arms (never expected)
  double worst_ratio{0.0};    // max component / region size over nondegenerate separators
  int diameter_checks{0};
  int diameter_violations{0};
};

struct TreeCover {
  std::vector<CoverTree> trees;
  std::vector<std::vector<std::int32_t>> trees_of;  // per vertex, indices into trees
  int depth{0};
  std::vector<CoverLevelStats> levels;
  SeparatorAudit audit;
  CoverParams params;
};

inline void rebuild_index(TreeCover& c, VertexId n) {
  c.trees_of.assign(static_cast<std::size_t>(n), {});
  for (std::size_t i = 0; i < c.trees.size(); ++i)
    for (VertexId v : c.trees[i].tree.members) c.trees_of[static_cast<std::size_t>(v)].push_back(static_cast<std::int32_t>(i));
}

/// One (eps, delta)-additive tree cover. Each recursion level decomposes every
/// uncharted component, separates every partition, places portals on the
/// separator arms, grows truncated trees from the portals inside their
/// partition, and recurses on the partition minus its separator.
inline TreeCover build_cover(const EmbeddedGraph& g, const CoverParams& params, std::uint64_t seed,
                             int repetition = 0, std::uint64_t cover_key = 0) {
  params.validate();
  const VertexId n = g.num_vertices();
  TreeCover cover;
  cover.params = params;
  const Length denom = g.denominator();
  const auto reach = static_cast<Length>(std::floor(2.0 * params.delta * static_cast<double>(denom)));
  const double spacing = params.eps_p * params.delta * static_cast<double>(denom);
  const double part_delta = params.c_pd * params.delta;

  std::vector<std::vector<VertexId>> components = connected_components(g, SubgraphMask::all(n));
  int level = 0;
  while (!components.empty()) {
    if (level >= params.max_recursions)
      throw TreeCoverError("recursion cap of " + std::to_string(params.max_recursions) +
                           " levels exceeded; separators are not balanced");
    CoverLevelStats st;
    st.components = static_cast<int>(components.size());
    std::vector<std::vector<VertexId>> next;
    for (const auto& comp : components) {
      st.max_component = std::max(st.max_component, static_cast<int>(comp.size()));
      if (comp.size() == 1) {
        ++st.separator_vertices;
        continue;
      }
      const SubgraphMask cmask = SubgraphMask::of(n, comp);
      const CenterSet centers{comp, static_cast<double>(comp.size())};
      const auto pseed = hash_keys(seed, {0x7061ULL, static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(comp.front())});
      DecomposeOptions dopt;
      dopt.mode = params.mode;
      const Partition part = decompose(g, cmask, centers, part_delta, params.eps_pd, pseed, dopt);
      if (params.audit_partitions) {
        const auto diams = cluster_diameters(g, part);
        for (double d : diams) {
          ++cover.audit.diameter_checks;
          if (d > 4.0 * (1.0 + params.eps_pd) * part_delta + 1e-9) ++cover.audit.diameter_violations;
        }
      }
      for (const auto& cl : part.clusters) {
        ++st.partitions;
        const auto& P = cl.members;
        if (P.size() == 1) {
          ++st.separator_vertices;
          continue;
        }
        const SubgraphMask pmask = SubgraphMask::of(n, P);
        SsspOptions so;
        so.eps = params.eps_s;
        so.mode = params.mode;
        so.seed = hash_keys(pseed, {0x736570ULL, static_cast<std::uint64_t>(cl.center)});
        const VertexId troot = *std::min_element(P.begin(), P.end());
        const SsspForest stree = approx_sssp(g, pmask, SourceSpec::single(troot), so);
        SeparatorPath sep = find_separator(g, pmask, stree);

        auto& au = cover.audit;
        ++au.separators;
        if (sep.degenerate) ++au.degenerate;
        if (sep.used_fallback) ++au.fallbacks;
        if (!sep.degenerate) {
          const double limit = std::ceil(2.0 * static_cast<double>(P.size()) / 3.0);
          if (sep.max_component_weight > limit) ++au.balance_violations;
          au.worst_ratio = std::max(au.worst_ratio, sep.max_component_weight / static_cast<double>(P.size()));
        }
        st.separator_vertices += static_cast<int>(sep.path.size());

        std::vector<Portal> portals;
        int arm_id = 0;
        for (const auto* arm : {&sep.arm_x, &sep.arm_y}) {
          std::vector<Length> along;
          for (VertexId v : *arm) along.push_back(stree.dist_of(v) - stree.dist_of(sep.lca));
          for (auto& p : make_portals(*arm, along, spacing * static_cast<double>(stree.scale), arm_id)) portals.push_back(p);
          ++arm_id;
        }
        std::vector<VertexId> roots;
        for (const auto& p : portals)
          if (std::find(roots.begin(), roots.end(), p.vertex) == roots.end()) roots.push_back(p.vertex);
        st.portals += static_cast<int>(roots.size());

        for (VertexId r : roots) {
          SsspOptions to;
          to.eps = params.eps_t;
          to.mode = params.mode;
          to.cutoff = reach;
          to.seed = hash_keys(pseed, {0x74726565ULL, static_cast<std::uint64_t>(r)});
          const SsspForest f = approx_sssp(g, pmask, SourceSpec::single(r), to);
          CoverTree ct;
          ct.repetition = repetition;
          ct.level = level;
          ct.partition_center = cl.center;
          ct.portal = r;
          ct.id = cover_tree_id(cover_key, repetition, level, cl.center, r);
          ct.tree.root = r;
          for (VertexId v : P)
            if (f.reached(v) && f.dist_of(v) <= reach) {
              ct.tree.members.push_back(v);
              ct.tree.parent.push_back(f.parent_of(v));
              ct.tree.dist.push_back(f.dist_of(v));
            }
          cover.trees.push_back(std::move(ct));
          ++st.trees;
        }

        SubgraphMask rest = pmask;
        for (VertexId v : sep.path) rest.member[static_cast<std::size_t>(v)] = 0;
        for (auto& piece : connected_components(g, rest)) {
          if (6 * piece.size() > 5 * comp.size())
            throw TreeCoverError("component did not shrink to 5/6 of its size");
          next.push_back(std::move(piece));
        }
      }
    }
    cover.levels.push_back(st);
    components = std::move(next);
    ++level;
  }
  cover.depth = level;
  rebuild_index(cover, n);
  return cover;
}

/// Keeps, for every tree, only members within 2 delta of the root and
/// rebuilds the per-vertex index.
inline TreeCover prune_far_roots(TreeCover cover, double delta, const EmbeddedGraph& g) {
  const auto reach = static_cast<Length>(std::floor(2.0 * delta * static_cast<double>(g.denominator())));
  for (auto& ct : cover.trees) {
    RootedTree kept;
    kept.root = ct.tree.root;
    for (std::size_t i = 0; i < ct.tree.members.size(); ++i)
      if (ct.tree.dist[i] <= reach) {
        kept.members.push_back(ct.tree.members[i]);
        kept.parent.push_back(ct.tree.parent[i]);
        kept.dist.push_back(ct.tree.dist[i]);
      }
    ct.tree = std::move(kept);
  }
  rebuild_index(cover, g.num_vertices());
  return cover;
}

/// Largest number of trees of one recursion level that contain one vertex.
inline int max_trees_per_vertex_per_level(const TreeCover& cover) {
  int best = 0;
  for (const auto& ts : cover.trees_of) {
    std::vector<int> per_level;
    for (auto i : ts) {
      const int lv = cover.trees[static_cast<std::size_t>(i)].level;
      if (static_cast<int>(per_level.size()) <= lv) per_level.resize(static_cast<std::size_t>(lv) + 1, 0);
      best = std::max(best, ++per_level[static_cast<std::size_t>(lv)]);
    }
  }
  return best;
}

inline std::vector<TreeCover> repeat_covers(const EmbeddedGraph& g, const CoverParams& params, int L,
                                            std::uint64_t seed, std::uint64_t cover_key = 0) {
  if (L < 1) throw TreeCoverError("need at least one repetition");
  std::vector<TreeCover> out;
  for (int r = 0; r < L; ++r)
    out.push_back(build_cover(g, params, hash_keys(seed, {0x726570ULL, static_cast<std::uint64_t>(r)}), r, cover_key));
  return out;
}

/// Tree distance between every pair of members, from one source member.
inline std::vector<Length> tree_distances_from(const RootedTree& t, std::size_t src_local,
                                               const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<Length> d(t.members.size(), -1);
  std::vector<std::size_t> stack{src_local};
  d[src_local] = 0;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v])
      if (d[w] < 0) {
        d[w] = d[v] + (t.dist[w] > t.dist[v] ? t.dist[w] - t.dist[v] : t.dist[v] - t.dist[w]);
        stack.push_back(w);
      }
  }
  return d;
}

struct CoverageResult {
  std::int64_t pairs{0};     // ordered pairs v != w with d(v,w) < 2 delta
  std::int64_t failures{0};  // no tree within (1+eps)d + eps*delta
  double failure_fraction() const { return pairs == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(pairs); }
};

/// Exhaustive coverage check over the union of covers.
inline CoverageResult check_cover_pairs(const EmbeddedGraph& g, std::span<const TreeCover> covers, double delta,
                                        double eps) {
  const VertexId n = g.num_vertices();
  const double denom = static_cast<double>(g.denominator());
  const auto all = SubgraphMask::all(n);
  struct Local {
    const RootedTree* t;
    std::vector<std::vector<std::size_t>> adj;
  };
  std::vector<Local> trees;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> member_of(static_cast<std::size_t>(n));
  for (const auto& c : covers)
    for (const auto& ct : c.trees) {
      Local l{&ct.tree, std::vector<std::vector<std::size_t>>(ct.tree.members.size())};
      std::vector<std::pair<VertexId, std::size_t>> idx;
      for (std::size_t i = 0; i < ct.tree.members.size(); ++i) idx.push_back({ct.tree.members[i], i});
      std::sort(idx.begin(), idx.end());
      for (std::size_t i = 0; i < ct.tree.members.size(); ++i) {
        if (ct.tree.parent[i] == kNoVertex) continue;
        auto it = std::lower_bound(idx.begin(), idx.end(), std::pair<VertexId, std::size_t>{ct.tree.parent[i], 0});
        l.adj[i].push_back(it->second);
        l.adj[it->second].push_back(i);
      }
      for (std::size_t i = 0; i < ct.tree.members.size(); ++i)
        member_of[static_cast<std::size_t>(ct.tree.members[i])].push_back({trees.size(), i});
      trees.push_back(std::move(l));
    }
  CoverageResult res;
  const auto reach = static_cast<Length>(std::ceil(2.0 * delta * denom)) - 1;  // d < 2 delta
  for (VertexId v = 0; v < n; ++v) {
    const auto exact = exact_sssp(g, all, SourceSpec::single(v), 1, reach);
    std::vector<Length> best(static_cast<std::size_t>(n), kInfiniteLength);
    for (auto [ti, li] : member_of[static_cast<std::size_t>(v)]) {
      const auto& l = trees[ti];
      const auto d = tree_distances_from(*l.t, li, l.adj);
      for (std::size_t k = 0; k < d.size(); ++k) {
        auto& b = best[static_cast<std::size_t>(l.t->members[k])];
        b = std::min(b, d[k]);
      }
    }
    for (VertexId w = 0; w < n; ++w) {
      if (w == v || !exact.reached(w)) continue;
      ++res.pairs;
      const double dg = static_cast<double>(exact.dist_of(w));
      const double allowed = (1.0 + eps) * dg + eps * delta * denom + 1e-9;
      if (static_cast<double>(best[static_cast<std::size_t>(w)]) > allowed) ++res.failures;
    }
  }
  return res;
}

}  // namespace planroute
