#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "planroute/graph.hpp"
#include "planroute/sssp.hpp"

using namespace planroute;

namespace {

// Bellman-Ford over the induced subgraph, independent of the Dijkstra path.
std::vector<Length> bellman_ford(const EmbeddedGraph& g, const SubgraphMask& mask, const SourceSpec& src) {
  std::vector<Length> d(static_cast<std::size_t>(g.num_vertices()), kInfiniteLength);
  for (const auto& s : src.sources) d[static_cast<std::size_t>(s.vertex)] = std::min(d[static_cast<std::size_t>(s.vertex)], s.offset);
  for (VertexId it = 0; it < g.num_vertices(); ++it) {
    bool changed = false;
    for (const auto& e : g.edges()) {
      if (!mask.contains(e.u) || !mask.contains(e.v)) continue;
      auto relax = [&](VertexId a, VertexId b) {
        auto& da = d[static_cast<std::size_t>(a)];
        const auto db = d[static_cast<std::size_t>(b)];
        if (db < kInfiniteLength && db + e.w < da) {
          da = db + e.w;
          changed = true;
        }
      };
      relax(e.u, e.v);
      relax(e.v, e.u);
    }
    if (!changed) break;
  }
  return d;
}

void expect_tree_consistent(const EmbeddedGraph& g, const SsspForest& f, const SubgraphMask& mask) {
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!mask.contains(v) || !f.reached(v)) continue;
    const VertexId p = f.parent_of(v);
    if (p == kNoVertex) {
      EXPECT_EQ(f.root_of(v), v);
      continue;
    }
    ASSERT_TRUE(mask.contains(p));
    const EdgeId e = g.find_edge(v, p);
    ASSERT_GE(e, 0);
    EXPECT_EQ(f.dist_of(v), f.dist_of(p) + g.edge(e).w * f.scale);
    EXPECT_EQ(f.root_of(v), f.root_of(p));
  }
}

}  // namespace

TEST(ExactSssp, PathWithWeights) {
  std::vector<Length> w{2, 3};
  auto g = make_path(w);
  auto f = exact_sssp(g, SubgraphMask::all(3), SourceSpec::single(0));
  EXPECT_EQ(f.dist_of(2), 5);
  EXPECT_EQ(f.parent_of(2), 1);
}

TEST(ExactSssp, SourceSetPicksNearest) {
  std::vector<Length> w{2, 3};
  auto g = make_path(w);
  std::vector<VertexId> s{0, 2};
  auto f = exact_sssp(g, SubgraphMask::all(3), SourceSpec::set(s));
  EXPECT_EQ(f.dist_of(1), 2);
  EXPECT_EQ(f.root_of(1), 0);
}

TEST(ExactSssp, MatchesBellmanFord) {
  auto g = generate_triangulated_grid(5, 10, WeightDist::uniform(1, 20), 5);
  const auto all = SubgraphMask::all(g.num_vertices());
  for (VertexId s : {0, 17, 49}) {
    auto f = exact_sssp(g, all, SourceSpec::single(s));
    auto bf = bellman_ford(g, all, SourceSpec::single(s));
    for (VertexId v = 0; v < g.num_vertices(); ++v) EXPECT_EQ(f.dist_of(v), bf[static_cast<std::size_t>(v)]);
    expect_tree_consistent(g, f, all);
  }
}

TEST(ExactSssp, VirtualOffsetsAndMask) {
  auto g = generate_grid(4, 4, WeightDist::uniform(1, 5), 3);
  SubgraphMask m = SubgraphMask::all(16);
  m.member[5] = m.member[6] = 0;
  SourceSpec src{{{0, 7}, {15, 2}, {10, 0}}};
  auto f = exact_sssp(g, m, src);
  auto bf = bellman_ford(g, m, src);
  for (VertexId v = 0; v < 16; ++v) {
    if (!m.contains(v)) {
      EXPECT_FALSE(f.reached(v));
      continue;
    }
    EXPECT_EQ(f.dist_of(v), bf[static_cast<std::size_t>(v)]);
  }
  expect_tree_consistent(g, f, m);
}

TEST(ExactSssp, SourceOutsideMaskRejected) {
  auto g = make_unit_path(3);
  SubgraphMask m = SubgraphMask::all(3);
  m.member[0] = 0;
  EXPECT_THROW(exact_sssp(g, m, SourceSpec::single(0)), SsspError);
}

TEST(ExactSssp, PermutationInvariant) {
  auto g = generate_triangulated_grid(6, 6, WeightDist::uniform(1, 9), 21);
  const VertexId n = g.num_vertices();
  std::vector<VertexId> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(99);
  for (VertexId i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)], e.w});
  std::vector<std::vector<EdgeId>> rot(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) rot[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = g.rotations()[static_cast<std::size_t>(v)];
  EmbeddedGraph h(n, edges, rot);
  auto fg = exact_sssp(g, SubgraphMask::all(n), SourceSpec::single(3));
  auto fh = exact_sssp(h, SubgraphMask::all(n), SourceSpec::single(perm[3]));
  for (VertexId v = 0; v < n; ++v) EXPECT_EQ(fg.dist_of(v), fh.dist_of(perm[static_cast<std::size_t>(v)]));
}

TEST(ApproxSssp, ZeroEpsEqualsExact) {
  auto g = generate_triangulated_grid(6, 7, WeightDist::uniform(1, 4), 2);
  const auto all = SubgraphMask::all(g.num_vertices());
  auto exact = exact_sssp(g, all, SourceSpec::single(4));
  for (auto mode : {SsspMode::Exact, SsspMode::StretchNoise}) {
    auto f = approx_sssp(g, all, SourceSpec::single(4), {1, kInfiniteLength, 0.0, mode, 5});
    EXPECT_EQ(f.dist, exact.dist);
    EXPECT_EQ(f.parent, exact.parent);
  }
}

TEST(ApproxSssp, NoiseStaysWithinSandwich) {
  // Unit square grids are bipartite, so every visited neighbour is one step
  // closer and noise cannot bite; the diagonals give it room.
  auto g = generate_triangulated_grid(10, 10);
  const auto all = SubgraphMask::all(100);
  auto exact = exact_sssp(g, all, SourceSpec::single(0));
  int suboptimal = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto f = approx_sssp(g, all, SourceSpec::single(0), {1, kInfiniteLength, 0.25, SsspMode::StretchNoise, seed});
    expect_tree_consistent(g, f, all);
    for (VertexId v = 0; v < 100; ++v) {
      EXPECT_GE(f.dist_of(v), exact.dist_of(v));
      EXPECT_LE(static_cast<double>(f.dist_of(v)), 1.25 * static_cast<double>(exact.dist_of(v)) + 1e-9);
      if (f.dist_of(v) > exact.dist_of(v)) ++suboptimal;
    }
  }
  EXPECT_GT(suboptimal, 0) << "noise mode should produce genuinely non-shortest trees";
}

TEST(ApproxSssp, NoiseSandwichOnWeightedInstancesWithOffsets) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = generate_triangulated_grid(12, 15, WeightDist::uniform(1, 30, 3), seed);
    const auto all = SubgraphMask::all(g.num_vertices());
    SourceSpec src{{{0, 50}, {100, 0}, {179, 17}}};
    const double eps = 0.1 + 0.05 * static_cast<double>(seed);
    auto exact = exact_sssp(g, all, src, 7);
    auto f = approx_sssp(g, all, src, {7, kInfiniteLength, eps, SsspMode::StretchNoise, seed});
    expect_tree_consistent(g, f, all);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      EXPECT_GE(f.dist_of(v), exact.dist_of(v));
      EXPECT_LE(static_cast<double>(f.dist_of(v)), (1 + eps) * static_cast<double>(exact.dist_of(v)) + 1e-6);
    }
  }
}

TEST(ApproxSssp, PathIsAlwaysExact) {
  auto g = make_unit_path(30);
  const auto all = SubgraphMask::all(30);
  auto f = approx_sssp(g, all, SourceSpec::single(0), {1, kInfiniteLength, 0.25, SsspMode::StretchNoise, 3});
  for (VertexId v = 0; v < 30; ++v) EXPECT_EQ(f.dist_of(v), v);
}

TEST(ApproxSssp, NegativeEpsRejected) {
  auto g = make_unit_path(3);
  EXPECT_THROW(approx_sssp(g, SubgraphMask::all(3), SourceSpec::single(0), {1, kInfiniteLength, -0.1}), SsspError);
}

TEST(MultiSourceGroups, OneMaskOneGroupEqualsApprox) {
  auto g = generate_grid(5, 5);
  std::vector<SubgraphMask> masks{SubgraphMask::all(25)};
  std::vector<std::vector<SourceSpec>> groups{{SourceSpec::single(12)}};
  auto out = multi_source_groups(g, masks, groups);
  auto direct = approx_sssp(g, masks[0], SourceSpec::single(12));
  EXPECT_EQ(out[0][0].dist, direct.dist);
}

TEST(MultiSourceGroups, DisjointMasksStayInside) {
  auto g = generate_grid(12, 12);
  // Three vertical stripes of 4 columns each.
  std::vector<SubgraphMask> masks;
  std::vector<std::vector<SourceSpec>> groups;
  for (int s = 0; s < 3; ++s) {
    std::vector<VertexId> vs;
    for (int r = 0; r < 12; ++r)
      for (int c = 4 * s; c < 4 * s + 4; ++c) vs.push_back(r * 12 + c);
    masks.push_back(SubgraphMask::of(144, vs));
    groups.push_back({SourceSpec::single(vs.front()), SourceSpec::single(vs.back())});
  }
  auto out = multi_source_groups(g, masks, groups);
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& f = out[i][j];
      auto oracle = exact_sssp(g, masks[i], groups[i][j]);
      for (VertexId v = 0; v < 144; ++v) {
        EXPECT_EQ(f.reached(v), masks[i].contains(v));
        if (f.reached(v)) {
          EXPECT_EQ(f.dist_of(v), oracle.dist_of(v));
          if (f.parent_of(v) != kNoVertex) {
            EXPECT_TRUE(masks[i].contains(f.parent_of(v)));
          }
        }
      }
    }
}

TEST(MultiSourceGroups, OverlapRejected) {
  auto g = generate_grid(3, 3);
  std::vector<SubgraphMask> masks{SubgraphMask::all(9), SubgraphMask::of(9, std::vector<VertexId>{4})};
  std::vector<std::vector<SourceSpec>> groups{{SourceSpec::single(0)}, {SourceSpec::single(4)}};
  EXPECT_THROW(multi_source_groups(g, masks, groups), SsspError);
}
