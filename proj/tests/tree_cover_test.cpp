#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "planroute/tree_cover.hpp"

using namespace planroute;

namespace {

CoverParams params_for(const EmbeddedGraph& g, double delta, double eps) {
  auto p = CoverParams::defaults(delta, eps, g.num_vertices());
  p.audit_partitions = true;
  return p;
}

// Floyd-Warshall all-pairs distances (small graphs only).
std::vector<std::vector<Length>> all_pairs(const EmbeddedGraph& g) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<Length>> d(n, std::vector<Length>(n, kInfiniteLength));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) {
    auto& a = d[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)];
    a = std::min(a, e.w);
    d[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)] = a;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Tree distance between two members by walking parents to the LCA.
Length tree_distance(const RootedTree& t, VertexId a, VertexId b) {
  auto idx = [&](VertexId v) {
    return static_cast<std::size_t>(std::find(t.members.begin(), t.members.end(), v) - t.members.begin());
  };
  std::set<VertexId> anc;
  for (VertexId v = a; v != kNoVertex; v = t.parent[idx(v)]) anc.insert(v);
  VertexId lca = b;
  while (!anc.count(lca)) lca = t.parent[idx(lca)];
  return t.dist[idx(a)] + t.dist[idx(b)] - 2 * t.dist[idx(lca)];
}

}  // namespace

TEST(CoverParams, Defaults) {
  auto p = CoverParams::defaults(8, 0.5, 256);
  EXPECT_DOUBLE_EQ(p.c_pd, 64.0);
  EXPECT_DOUBLE_EQ(p.eps_pd, 1.0 / 64);
  EXPECT_DOUBLE_EQ(p.eps_s, 0.5 / 64);
  EXPECT_DOUBLE_EQ(p.eps_p, 0.5 / 6);
  EXPECT_DOUBLE_EQ(p.eps_t, 0.5 / 6);
  EXPECT_EQ(p.max_recursions, 48);
  EXPECT_EQ(p.repetitions, 16);
  p.eps = 0;
  EXPECT_THROW(p.validate(), TreeCoverError);
}

TEST(Portals, ShortPathHasOne) {
  auto g = make_unit_path(3);
  std::vector<VertexId> path{0, 1, 2};
  auto ps = make_portals(g, path, 0.5, 8.0);  // spacing 4 > length 2
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].vertex, 0);
}

TEST(Portals, UnitPathOfLengthTen) {
  auto g = make_unit_path(11);
  std::vector<VertexId> path;
  for (VertexId v = 0; v <= 10; ++v) path.push_back(v);
  auto ps = make_portals(g, path, 0.25, 8.0);  // spacing 2
  // Classes by hand: node 0 -> 1 (first), 1,2 -> 1, 3,4 -> 2, 5,6 -> 3, 7,8 -> 4, 9,10 -> 5.
  std::vector<VertexId> want{0, 3, 5, 7, 9};
  ASSERT_EQ(ps.size(), want.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(ps[i].vertex, want[i]);
    EXPECT_EQ(ps[i].distance_class, static_cast<std::int64_t>(i + 1));
    if (i > 0) {
      EXPECT_LE(ps[i].vertex - ps[i - 1].vertex, 4);
    }
  }
}

TEST(Portals, CountBoundOnRandomPaths) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng(seed);
    const auto len = static_cast<std::size_t>(rng.uniform_int(1, 60));
    std::vector<Length> w(len);
    for (auto& x : w) x = rng.uniform_int(1, 7);
    auto g = make_path(w);
    std::vector<VertexId> path;
    for (VertexId v = 0; v <= static_cast<VertexId>(len); ++v) path.push_back(v);
    const double eps_p = 0.1 + 0.05 * static_cast<double>(seed % 5), delta = 10;
    const double spacing = eps_p * delta;
    auto ps = make_portals(g, path, eps_p, delta);
    Length total = 0;
    for (auto x : w) total += x;
    EXPECT_LE(static_cast<double>(ps.size()), static_cast<double>(total) / spacing + 1);
    std::vector<Length> along{0};
    for (auto x : w) along.push_back(along.back() + x);
    // Classes strictly increase along the portal sequence.
    for (std::size_t i = 1; i < ps.size(); ++i) {
      EXPECT_GT(ps[i].distance_class, ps[i - 1].distance_class);
    }
    // Every nonempty class has exactly one portal.
    std::set<std::int64_t> classes;
    for (Length a : along) classes.insert(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(static_cast<double>(a) / spacing - 1e-12))));
    EXPECT_EQ(classes.size(), ps.size());
    // Every path node is within 2 * spacing (along the path) of a portal before it.
    std::size_t j = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      while (j + 1 < ps.size() && ps[j + 1].vertex <= path[i]) ++j;
      EXPECT_LE(static_cast<double>(along[i] - along[static_cast<std::size_t>(ps[j].vertex)]), 2 * spacing + 1e-9);
    }
  }
}

TEST(BuildCover, SingleVertex) {
  auto g = generate_grid(1, 1);
  auto c = build_cover(g, params_for(g, 4, 0.5), 1);
  EXPECT_TRUE(c.trees.empty());
  EXPECT_EQ(c.depth, 1);
}

// With the multiplier 6400 lg^2 the partition never cuts a 20-vertex path, so a
// single cover must handle every pair through a good split.
TEST(BuildCover, PathAllPairsCoveredWithLargeMultiplier) {
  auto g = make_unit_path(20);
  auto p = CoverParams::full_multiplier(8, 0.5, 20);
  auto c = build_cover(g, p, 3);
  EXPECT_EQ(c.levels[0].partitions, 1);
  const auto d = all_pairs(g);
  for (VertexId v = 0; v < 20; ++v)
    for (VertexId w = 0; w < 20; ++w) {
      const Length dg = d[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
      if (v == w || dg >= 16) continue;
      Length best = kInfiniteLength;
      for (auto i : c.trees_of[static_cast<std::size_t>(v)]) {
        const auto& t = c.trees[static_cast<std::size_t>(i)].tree;
        if (std::find(t.members.begin(), t.members.end(), w) != t.members.end())
          best = std::min(best, tree_distance(t, v, w));
      }
      EXPECT_LE(static_cast<double>(best), 1.5 * static_cast<double>(dg) + 0.5 * 8) << v << "," << w;
    }
  std::vector<TreeCover> one{c};
  EXPECT_EQ(check_cover_pairs(g, one, 8, 0.5).failures, 0);
}

// The reduced default multiplier makes bad splits likely in any one cover;
// the union over the default repetitions still covers every pair.
TEST(BuildCover, PathAllPairsCoveredAcrossRepetitions) {
  auto g = make_unit_path(20);
  auto p = params_for(g, 8, 0.5);
  auto covers = repeat_covers(g, p, p.repetitions, 3);
  EXPECT_EQ(check_cover_pairs(g, covers, 8, 0.5).failures, 0);
}

TEST(BuildCover, GridDepthAndAudit) {
  auto g = generate_grid(16, 16);
  auto c = build_cover(g, params_for(g, 8, 0.5), 11);
  EXPECT_LE(c.depth, 48);
  EXPECT_LE(c.depth, static_cast<int>(std::ceil(std::log(256.0) / std::log(6.0 / 5.0))));
  EXPECT_EQ(c.audit.balance_violations, 0);
  EXPECT_EQ(c.audit.diameter_violations, 0);
  EXPECT_GT(c.audit.diameter_checks, 0);
  // Components shrink level over level.
  for (std::size_t i = 1; i < c.levels.size(); ++i) EXPECT_LT(c.levels[i].max_component, c.levels[i - 1].max_component);
}

TEST(BuildCover, TreesRespectReachAndSandwich) {
  auto g = generate_triangulated_grid(10, 10, WeightDist::uniform(1, 4), 6);
  auto p = params_for(g, 6, 0.5);
  p.mode = SsspMode::StretchNoise;
  auto c = build_cover(g, p, 5);
  const auto d = all_pairs(g);
  for (const auto& ct : c.trees) {
    std::set<VertexId> mem(ct.tree.members.begin(), ct.tree.members.end());
    EXPECT_EQ(mem.size(), ct.tree.members.size());
    for (std::size_t i = 0; i < ct.tree.members.size(); ++i) {
      const Length td = ct.tree.dist[i];
      EXPECT_LE(td, 12);
      EXPECT_GE(td, d[static_cast<std::size_t>(ct.portal)][static_cast<std::size_t>(ct.tree.members[i])]);
      const VertexId par = ct.tree.parent[i];
      if (par != kNoVertex) {
        EXPECT_TRUE(mem.count(par));
        EXPECT_GE(g.find_edge(par, ct.tree.members[i]), 0);
      }
    }
    build_tree_tables(ct.tree);  // throws on malformed trees
  }
}

TEST(BuildCover, UniqueTreeIds) {
  auto g = generate_grid(12, 12);
  auto covers = repeat_covers(g, params_for(g, 4, 0.5), 3, 7, 99);
  std::set<std::uint64_t> ids;
  std::size_t total = 0;
  for (const auto& c : covers)
    for (const auto& t : c.trees) {
      ids.insert(t.id);
      ++total;
    }
  EXPECT_EQ(ids.size(), total);
}

TEST(PruneFarRoots, CutRule) {
  auto g = make_unit_path(10);
  TreeCover c;
  CoverTree ct;
  ct.tree.root = 0;
  for (VertexId v = 0; v < 10; ++v) {
    ct.tree.members.push_back(v);
    ct.tree.parent.push_back(v == 0 ? kNoVertex : v - 1);
    ct.tree.dist.push_back(v);
  }
  c.trees.push_back(ct);
  auto near = prune_far_roots(c, 5.0, g);  // reach 10 keeps everyone
  EXPECT_EQ(near.trees[0].tree.members.size(), 10u);
  auto cut = prune_far_roots(c, 3.0, g);  // reach 6 drops 7, 8, 9
  EXPECT_EQ(cut.trees[0].tree.members.size(), 7u);
  EXPECT_TRUE(cut.trees_of[9].empty());
  EXPECT_EQ(cut.trees_of[6].size(), 1u);
}

TEST(PruneFarRoots, GridPerLevelCountsAreBounded) {
  auto g = generate_grid(16, 16);
  auto p = params_for(g, 8, 0.5);
  auto c = prune_far_roots(build_cover(g, p, 2), 8, g);
  // Two arms per separator, at most 8 * ceil(1/eps) trees per arm set.
  EXPECT_LE(max_trees_per_vertex_per_level(c), 2 * 8 * 2);
}

TEST(RepeatCovers, DeterministicAndMonotone) {
  auto g = generate_grid(12, 12);
  auto p = params_for(g, 8, 0.5);
  auto a = repeat_covers(g, p, 2, 5);
  auto b = repeat_covers(g, p, 2, 5);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(a[i].trees.size(), b[i].trees.size());
    for (std::size_t j = 0; j < a[i].trees.size(); ++j) {
      EXPECT_EQ(a[i].trees[j].id, b[i].trees[j].id);
      EXPECT_EQ(a[i].trees[j].tree.members, b[i].trees[j].tree.members);
      EXPECT_EQ(a[i].trees[j].tree.dist, b[i].trees[j].tree.dist);
    }
  }
  auto all = repeat_covers(g, p, 8, 21);
  double prev = 1.0;
  for (std::size_t L = 1; L <= 8; ++L) {
    auto r = check_cover_pairs(g, std::span<const TreeCover>(all.data(), L), 8, 0.5);
    EXPECT_LE(r.failure_fraction(), prev);
    prev = r.failure_fraction();
  }
}

TEST(CheckCoverPairs, StarIsAlwaysCovered) {
  auto g = make_star(12);
  auto c = build_cover(g, CoverParams::full_multiplier(2, 0.5, 13), 1);
  std::vector<TreeCover> one{c};
  auto r = check_cover_pairs(g, one, 2, 0.5);
  EXPECT_GT(r.pairs, 0);
  EXPECT_EQ(r.failures, 0);
}

TEST(CheckCoverPairs, FourteenGridWithRepetitions) {
  auto g = generate_grid(14, 14);
  auto p = params_for(g, 8, 0.5);
  p.audit_partitions = false;
  auto covers = repeat_covers(g, p, p.repetitions, 17);
  auto r = check_cover_pairs(g, covers, 8, 0.5);
  EXPECT_LE(r.failure_fraction(), 0.01);
}
