#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "planroute/graph.hpp"
#include "planroute/parallel.hpp"
#include "planroute/rng.hpp"
#include "planroute/scheme.hpp"
#include "planroute/sssp.hpp"
#include "planroute/tree_routing.hpp"

namespace planroute {

enum class RouteStatus { Delivered, NoTree, MissingTable, NotAdjacent, Loop, NotInTree };

inline const char* to_string(RouteStatus s) {
  switch (s) {
    case RouteStatus::Delivered: return "DELIVERED";
    case RouteStatus::NoTree: return "NO_TREE";
    case RouteStatus::MissingTable: return "MID-ROUTE_MISSING_TABLE";
    case RouteStatus::NotAdjacent: return "NOT_ADJACENT";
    case RouteStatus::Loop: return "LOOP";
    case RouteStatus::NotInTree: return "NOT_IN_TREE";
  }
  return "?";
}

struct PacketTrace {
  VertexId source{kNoVertex};
  VertexId target{kNoVertex};
  RouteStatus status{RouteStatus::NoTree};
  std::uint64_t tree{0};
  int level{0};
  Length bound{0};
  std::vector<VertexId> path;
  Length routed{0};  // graph numerators
  Length exact{-1};  // -1 when not computed
  double stretch{std::numeric_limits<double>::infinity()};
  int hops{0};
  // Strict mode: the packet is also routed with the tree re-selected at
  // every hop from the target label alone.
  bool strict_checked{false};
  bool strict_identical{false};
  int reselect_disagreements{0};

  bool delivered() const { return status == RouteStatus::Delivered; }
};

struct RouteOptions {
  bool strict{false};
};

namespace detail {

// Walks from `at` while choose(at) names the tree to use at that node.
template <class Choose>
RouteStatus walk(const EmbeddedGraph& g, const Scheme& s, VertexId at, VertexId t, Choose&& choose,
                 std::vector<VertexId>& path, Length& routed) {
  const auto& tlab = s.labels[static_cast<std::size_t>(t)];
  path.assign(1, at);
  routed = 0;
  std::uint64_t cached_tree = 0;
  TreeLabel target;
  for (VertexId hop = 0; hop <= 4 * s.n; ++hop) {
    if (at == t) return RouteStatus::Delivered;
    const auto& tab = s.tables[static_cast<std::size_t>(at)];
    std::uint64_t tree = 0;
    if (!choose(tab, tree)) return RouteStatus::NoTree;
    const SchemeEntry* e = tab.find(tree);
    if (e == nullptr) return RouteStatus::MissingTable;
    if (tree != cached_tree || path.size() == 1) {
      const LabelEntry* le = tlab.find(tree);
      if (le == nullptr) return RouteStatus::NotInTree;
      target = tlab.tree_label(*le);
      cached_tree = tree;
    }
    const NextHop h = tree_next_hop(e->table, tab.children_of(*e), target);
    if (h.kind == NextHop::Kind::Delivered) return at == t ? RouteStatus::Delivered : RouteStatus::NotInTree;
    if (h.kind == NextHop::Kind::NotInTree) return RouteStatus::NotInTree;
    const EdgeId edge = g.find_edge(at, h.vertex);
    if (edge < 0) return RouteStatus::NotAdjacent;
    routed += g.edge(edge).w;
    at = h.vertex;
    path.push_back(at);
  }
  return RouteStatus::Loop;
}

}  // namespace detail

/// Forwards a packet whose header already names `tree`, starting at `at`.
/// This is the per-hop rule alone, so replaying from any trace vertex
/// reproduces the rest of the trace.
inline RouteStatus forward_with_header(const EmbeddedGraph& g, const Scheme& s, VertexId at, VertexId t,
                                       std::uint64_t tree, std::vector<VertexId>& path, Length& routed) {
  return detail::walk(
      g, s, at, t,
      [tree](const SchemeTable&, std::uint64_t& out) {
        out = tree;
        return true;
      },
      path, routed);
}

/// Routes one packet. select_tree at s fixes T*; the header carries t's
/// label and T*, and every hop consults only the current node's table for
/// T*. `exact` (graph numerators) is computed when negative.
inline PacketTrace route(const EmbeddedGraph& g, const Scheme& s, VertexId src, VertexId dst, Length exact = -1,
                         const RouteOptions& opt = {}) {
  if (src < 0 || src >= s.n || dst < 0 || dst >= s.n) throw SchemeError("route endpoint out of range");
  if (g.num_vertices() != s.n) throw SchemeError("graph and scheme differ in vertex count");
  PacketTrace tr;
  tr.source = src;
  tr.target = dst;
  if (exact < 0) {
    exact = exact_sssp(g, SubgraphMask::all(g.num_vertices()), SourceSpec::single(src)).dist_of(dst);
  }
  tr.exact = exact;
  const auto& tlab = s.labels[static_cast<std::size_t>(dst)];
  const Selection sel = select_tree(s.tables[static_cast<std::size_t>(src)], tlab);
  if (sel.kind == Selection::Kind::NoTree) {
    tr.status = RouteStatus::NoTree;
    tr.path = {src};
    return tr;
  }
  tr.tree = sel.tree;
  tr.level = sel.level;
  tr.bound = sel.bound;
  tr.status = forward_with_header(g, s, src, dst, sel.tree, tr.path, tr.routed);
  tr.hops = static_cast<int>(tr.path.size()) - 1;
  if (tr.delivered())
    tr.stretch = exact == 0 ? 1.0 : static_cast<double>(tr.routed) / static_cast<double>(exact);

  if (opt.strict) {
    tr.strict_checked = true;
    for (VertexId v : tr.path) {
      if (v == dst) break;
      const Selection here = select_tree(s.tables[static_cast<std::size_t>(v)], tlab);
      if (here.kind != Selection::Kind::Selected || here.tree != sel.tree) ++tr.reselect_disagreements;
    }
    std::vector<VertexId> strict_path;
    Length strict_len = 0;
    const RouteStatus st = detail::walk(
        g, s, src, dst,
        [&](const SchemeTable& tab, std::uint64_t& tree) {
          const Selection here = select_tree(tab, tlab);
          tree = here.tree;
          return here.kind == Selection::Kind::Selected;
        },
        strict_path, strict_len);
    tr.strict_identical = st == tr.status && strict_path == tr.path;
  }
  return tr;
}

enum class PairSampler { Uniform, StratifiedDecade };

/// Decade of a distance in graph units: floor(log10 d) for d >= 1.
inline int distance_decade(Length d, Length denom) {
  const double x = static_cast<double>(d) / static_cast<double>(denom);
  return x < 1.0 ? 0 : static_cast<int>(std::floor(std::log10(x) + 1e-12));
}

/// Deterministic pair sample. Uniform draws s and t != s independently;
/// stratified draws s, then a distance decade uniformly among those present
/// from s, then t uniformly inside it.
inline std::vector<std::pair<VertexId, VertexId>> sample_pairs(const EmbeddedGraph& g, PairSampler sampler,
                                                               std::int64_t count, std::uint64_t seed) {
  const VertexId n = g.num_vertices();
  std::vector<std::pair<VertexId, VertexId>> out;
  if (n == 0) return out;
  const auto all = SubgraphMask::all(n);
  for (std::int64_t i = 0; i < count; ++i) {
    SplitMix64 rng(hash_keys(seed, {0x70616972ULL, static_cast<std::uint64_t>(i)}));
    const auto s = static_cast<VertexId>(rng.uniform_int(0, n - 1));
    if (n == 1) {
      out.push_back({s, s});
      continue;
    }
    if (sampler == PairSampler::Uniform) {
      auto t = static_cast<VertexId>(rng.uniform_int(0, n - 2));
      if (t >= s) ++t;
      out.push_back({s, t});
      continue;
    }
    const auto f = exact_sssp(g, all, SourceSpec::single(s));
    std::map<int, std::vector<VertexId>> by_decade;
    for (VertexId v = 0; v < n; ++v)
      if (v != s && f.reached(v)) by_decade[distance_decade(f.dist_of(v), g.denominator())].push_back(v);
    auto it = by_decade.begin();
    std::advance(it, rng.uniform_int(0, static_cast<std::int64_t>(by_decade.size()) - 1));
    const auto& bucket = it->second;
    out.push_back({s, bucket[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(bucket.size()) - 1))]});
  }
  return out;
}

struct DecadeStats {
  int decade{0};
  std::int64_t pairs{0};
  std::int64_t failures{0};
  double p99{0.0};
  double max{0.0};
};

struct StretchReport {
  std::int64_t pairs{0};
  std::int64_t delivered{0};
  std::int64_t failures{0};
  std::map<std::string, std::int64_t> failure_kinds;
  double min{0.0};
  double p50{0.0};
  double p90{0.0};
  double p99{0.0};
  double max{0.0};
  double eps{0.0};
  std::int64_t within_bound{0};  // delivered with stretch <= 1 + eps
  std::int64_t below_one{0};     // stretch < 1, never expected
  std::map<int, std::int64_t> per_level;
  std::vector<DecadeStats> decades;
  std::int64_t strict_checked{0};
  std::int64_t strict_identical{0};
  std::int64_t reselect_disagreements{0};
  std::vector<PacketTrace> traces;  // kept when requested

  double within_fraction() const { return pairs == 0 ? 1.0 : static_cast<double>(within_bound) / static_cast<double>(pairs); }
};

struct EvalOptions {
  bool strict{false};
  bool keep_traces{false};
  int jobs{1};
};

/// Nearest-rank quantile of a sorted sample.
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::min(sorted.size(), std::max<std::size_t>(rank, 1)) - 1];
}

inline StretchReport evaluate_pairs(const EmbeddedGraph& g, const Scheme& s,
                                    const std::vector<std::pair<VertexId, VertexId>>& pairs,
                                    const EvalOptions& opt = {}) {
  std::vector<PacketTrace> traces(pairs.size());
  const auto all = SubgraphMask::all(g.num_vertices());
  RouteOptions ro;
  ro.strict = opt.strict;
  parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    const Length d = a == b ? 0 : exact_sssp(g, all, SourceSpec::single(a)).dist_of(b);
    traces[i] = route(g, s, a, b, d, ro);
  });
  StretchReport r;
  r.eps = s.config.eps;
  r.pairs = static_cast<std::int64_t>(pairs.size());
  std::vector<double> ok;
  std::map<int, std::vector<double>> dec_ok;
  std::map<int, DecadeStats> dec;
  for (const auto& t : traces) {
    const int decade = distance_decade(t.exact, g.denominator());
    auto& ds = dec[decade];
    ds.decade = decade;
    ++ds.pairs;
    if (t.strict_checked) {
      ++r.strict_checked;
      if (t.strict_identical) ++r.strict_identical;
      r.reselect_disagreements += t.reselect_disagreements;
    }
    if (!t.delivered()) {
      ++r.failures;
      ++r.failure_kinds[to_string(t.status)];
      ++ds.failures;
      continue;
    }
    ++r.delivered;
    ok.push_back(t.stretch);
    dec_ok[decade].push_back(t.stretch);
    if (t.stretch <= 1.0 + s.config.eps + 1e-12) ++r.within_bound;
    if (t.stretch < 1.0) ++r.below_one;
    if (t.source != t.target) ++r.per_level[t.level];
  }
  std::sort(ok.begin(), ok.end());
  if (!ok.empty()) {
    r.min = ok.front();
    r.p50 = quantile(ok, 0.5);
    r.p90 = quantile(ok, 0.9);
    r.p99 = quantile(ok, 0.99);
    r.max = ok.back();
  }
  for (auto& [k, ds] : dec) {
    auto& v = dec_ok[k];
    std::sort(v.begin(), v.end());
    ds.p99 = quantile(v, 0.99);
    ds.max = v.empty() ? 0.0 : v.back();
    r.decades.push_back(ds);
  }
  if (opt.keep_traces) r.traces = std::move(traces);
  return r;
}

inline StretchReport evaluate(const EmbeddedGraph& g, const Scheme& s, PairSampler sampler, std::int64_t count,
                              std::uint64_t seed, const EvalOptions& opt = {}) {
  if (count < 1) throw SchemeError("pair count must be at least 1");
  return evaluate_pairs(g, s, sample_pairs(g, sampler, count, seed), opt);
}

}  // namespace planroute
