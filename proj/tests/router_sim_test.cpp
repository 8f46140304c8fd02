#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <map>
#include <set>

#include "planroute/graph.hpp"
#include "planroute/router_sim.hpp"
#include "planroute/scheme.hpp"

using namespace planroute;

namespace {

std::vector<Length> oracle_dist(const EmbeddedGraph& g, VertexId s) {
  std::vector<std::vector<std::pair<VertexId, Length>>> adj(static_cast<std::size_t>(g.num_vertices()));
  for (const auto& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)].push_back({e.v, e.w});
    adj[static_cast<std::size_t>(e.v)].push_back({e.u, e.w});
  }
  std::vector<Length> d(adj.size(), -1);
  std::priority_queue<std::pair<Length, VertexId>, std::vector<std::pair<Length, VertexId>>, std::greater<>> pq;
  pq.push({0, s});
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (d[static_cast<std::size_t>(v)] >= 0) continue;
    d[static_cast<std::size_t>(v)] = dv;
    for (auto [w, len] : adj[static_cast<std::size_t>(v)])
      if (d[static_cast<std::size_t>(w)] < 0) pq.push({dv + len, w});
  }
  return d;
}

std::map<std::pair<VertexId, VertexId>, Length> edge_map(const EmbeddedGraph& g) {
  std::map<std::pair<VertexId, VertexId>, Length> m;
  for (const auto& e : g.edges()) {
    m[{e.u, e.v}] = e.w;
    m[{e.v, e.u}] = e.w;
  }
  return m;
}

Scheme build(const EmbeddedGraph& g, double eps, std::uint64_t seed, int reps = 0) {
  SchemeConfig c;
  c.eps = eps;
  c.seed = seed;
  c.reps = reps;
  return build_scheme(g, c);
}

}  // namespace

TEST(Route, SelfIsDelivered) {
  auto g = generate_grid(4, 4);
  auto s = build(g, 0.5, 1, 2);
  auto t = route(g, s, 5, 5);
  EXPECT_EQ(t.status, RouteStatus::Delivered);
  EXPECT_EQ(t.path, (std::vector<VertexId>{5}));
  EXPECT_DOUBLE_EQ(t.stretch, 1.0);
  EXPECT_EQ(t.hops, 0);
}

TEST(Route, AdjacentPairTakesOneHopOrMore) {
  const Length w[] = {2, 3};
  auto g = make_path(w);
  auto s = build(g, 0.5, 2);
  auto t = route(g, s, 0, 1);
  ASSERT_TRUE(t.delivered());
  EXPECT_EQ(t.path, (std::vector<VertexId>{0, 1}));
  EXPECT_EQ(t.routed, 2);
  EXPECT_DOUBLE_EQ(t.stretch, 1.0);
}

TEST(Route, TracesAreWalksAtLeastAsLongAsShortestPaths) {
  auto g = generate_triangulated_grid(10, 10, WeightDist::uniform(1, 9), 12);
  const double eps = 0.5;
  auto s = build(g, eps, 6);
  const auto edges = edge_map(g);
  SplitMix64 rng(5);
  int within = 0, total = 0;
  for (int k = 0; k < 300; ++k) {
    const auto a = static_cast<VertexId>(rng.uniform_int(0, 99));
    const auto b = static_cast<VertexId>(rng.uniform_int(0, 99));
    const Length d = oracle_dist(g, a)[static_cast<std::size_t>(b)];
    auto t = route(g, s, a, b);
    ASSERT_TRUE(t.delivered()) << a << "->" << b << " " << to_string(t.status);
    EXPECT_EQ(t.exact, d);
    EXPECT_EQ(t.path.front(), a);
    EXPECT_EQ(t.path.back(), b);
    Length len = 0;
    for (std::size_t i = 1; i < t.path.size(); ++i) {
      auto it = edges.find({t.path[i - 1], t.path[i]});
      ASSERT_NE(it, edges.end()) << "hop " << t.path[i - 1] << "->" << t.path[i] << " is not an edge";
      len += it->second;
    }
    EXPECT_EQ(len, t.routed);
    EXPECT_GE(t.routed, d);
    EXPECT_LE(t.routed, t.bound);  // the tree path is no longer than the path through the root
    std::set<VertexId> seen(t.path.begin(), t.path.end());
    EXPECT_EQ(seen.size(), t.path.size()) << "vertex repeated";
    ++total;
    if (static_cast<double>(t.routed) <= (1 + eps) * static_cast<double>(d)) ++within;
  }
  EXPECT_GE(within, total * 99 / 100);
}

TEST(Route, ReplayingASuffixReproducesTheRest) {
  auto g = generate_grid(9, 9, WeightDist::uniform(1, 4), 3);
  auto s = build(g, 0.5, 8, 3);
  for (auto [a, b] : std::vector<std::pair<VertexId, VertexId>>{{0, 80}, {40, 3}, {17, 62}}) {
    auto t = route(g, s, a, b);
    ASSERT_TRUE(t.delivered());
    for (std::size_t k = 0; k < t.path.size(); ++k) {
      std::vector<VertexId> rest;
      Length len = 0;
      EXPECT_EQ(forward_with_header(g, s, t.path[k], b, t.tree, rest, len), RouteStatus::Delivered);
      EXPECT_TRUE(std::equal(rest.begin(), rest.end(), t.path.begin() + static_cast<std::ptrdiff_t>(k)));
      EXPECT_EQ(rest.size(), t.path.size() - k);
    }
  }
}

TEST(Route, FailuresAreReportedNotMasked) {
  auto g = generate_grid(5, 5);
  auto s = build(g, 0.5, 4, 2);
  auto t = route(g, s, 0, 24);
  ASSERT_TRUE(t.delivered());
  ASSERT_GE(t.path.size(), 3u);
  // Drop T* from an intermediate node's table.
  Scheme broken = s;
  auto& mid = broken.tables[static_cast<std::size_t>(t.path[1])];
  mid.entries.erase(std::remove_if(mid.entries.begin(), mid.entries.end(),
                                   [&](const SchemeEntry& e) { return e.tree == t.tree; }),
                    mid.entries.end());
  auto bad = route(g, broken, 0, 24);
  // The source table and target label are untouched, so T* is chosen again.
  ASSERT_EQ(bad.tree, t.tree);
  EXPECT_EQ(bad.status, RouteStatus::MissingTable);
  EXPECT_EQ(bad.path, (std::vector<VertexId>{0, t.path[1]}));
  EXPECT_TRUE(std::isinf(bad.stretch));
  // No common tree at all.
  Scheme empty = s;
  empty.tables[0].entries.clear();
  auto none = route(g, empty, 0, 24);
  EXPECT_EQ(none.status, RouteStatus::NoTree);
  EXPECT_TRUE(std::isinf(none.stretch));
  EXPECT_THROW(route(g, s, 0, 25), SchemeError);
}

TEST(Route, StrictModeComparesBothHeaderConventions) {
  auto g = generate_grid(6, 6);
  auto s = build(g, 0.5, 2, 2);
  RouteOptions ro;
  ro.strict = true;
  auto self = route(g, s, 7, 7, -1, ro);
  EXPECT_TRUE(self.strict_identical);
  EXPECT_EQ(self.reselect_disagreements, 0);
  auto t = route(g, s, 0, 35, -1, ro);
  EXPECT_TRUE(t.strict_checked);
  // At the source the re-selection is the header choice by definition.
  EXPECT_LT(t.reselect_disagreements, t.hops);
}

TEST(Evaluate, QuantilesUseNearestRank) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(quantile(v, 0.5), 5);
  EXPECT_EQ(quantile(v, 0.9), 9);
  EXPECT_EQ(quantile(v, 0.99), 10);
  EXPECT_EQ(quantile(v, 0.0), 1);
  EXPECT_EQ(quantile({}, 0.5), 0);
}

TEST(Evaluate, SinglePairToItself) {
  auto g = generate_grid(3, 3);
  auto s = build(g, 0.5, 1, 1);
  auto r = evaluate_pairs(g, s, {{4, 4}});
  EXPECT_EQ(r.pairs, 1);
  EXPECT_EQ(r.failures, 0);
  EXPECT_DOUBLE_EQ(r.max, 1.0);
  EXPECT_THROW(evaluate(g, s, PairSampler::Uniform, 0, 1), SchemeError);
}

TEST(Evaluate, UniformPairsAreDistinctAndDeterministic) {
  auto g = generate_grid(5, 5);
  auto a = sample_pairs(g, PairSampler::Uniform, 500, 3);
  EXPECT_EQ(a, sample_pairs(g, PairSampler::Uniform, 500, 3));
  EXPECT_NE(a, sample_pairs(g, PairSampler::Uniform, 500, 4));
  std::set<VertexId> sources;
  for (auto [s, t] : a) {
    EXPECT_NE(s, t);
    EXPECT_GE(std::min(s, t), 0);
    EXPECT_LT(std::max(s, t), 25);
    sources.insert(s);
  }
  EXPECT_EQ(sources.size(), 25u);
}

TEST(Evaluate, StratifiedSamplingCoversEveryDecade) {
  auto g = generate_grid(12, 12, WeightDist::uniform(1, 20), 7);
  const double eps = 0.5;
  auto s = build(g, eps, 3);
  auto pairs = sample_pairs(g, PairSampler::StratifiedDecade, 600, 9);
  std::set<int> decades;
  for (auto [a, b] : pairs) {
    const Length d = oracle_dist(g, a)[static_cast<std::size_t>(b)];
    decades.insert(static_cast<int>(std::floor(std::log10(static_cast<double>(d)))));
  }
  EXPECT_EQ(decades, (std::set<int>{0, 1, 2}));
  EvalOptions eo;
  eo.keep_traces = true;
  auto r = evaluate_pairs(g, s, pairs, eo);
  ASSERT_EQ(r.decades.size(), 3u);
  for (const auto& d : r.decades) {
    EXPECT_LE(d.failures, d.pairs / 100);
    EXPECT_LE(d.p99, 1 + eps);
  }
  EXPECT_EQ(r.below_one, 0);
  EXPECT_EQ(r.traces.size(), pairs.size());
  std::int64_t levels = 0;
  for (const auto& [k, c] : r.per_level) levels += c;
  EXPECT_EQ(levels, r.delivered);
}

TEST(Evaluate, ParallelMatchesSequential) {
  auto g = generate_grid(6, 6, WeightDist::uniform(1, 5), 2);
  auto s = build(g, 0.5, 5, 2);
  EvalOptions one, many;
  many.jobs = 4;
  one.keep_traces = many.keep_traces = true;
  auto a = evaluate(g, s, PairSampler::Uniform, 200, 8, one);
  auto b = evaluate(g, s, PairSampler::Uniform, 200, 8, many);
  EXPECT_EQ(a.p99, b.p99);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) EXPECT_EQ(a.traces[i].path, b.traces[i].path);
}
