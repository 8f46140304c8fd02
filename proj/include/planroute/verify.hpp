#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "planroute/decomposition.hpp"
#include "planroute/graph.hpp"
#include "planroute/parallel.hpp"
#include "planroute/rng.hpp"
#include "planroute/router_sim.hpp"
#include "planroute/scheme.hpp"
#include "planroute/separator.hpp"
#include "planroute/sssp.hpp"
#include "planroute/tree_cover.hpp"
#include "planroute/tree_routing.hpp"

namespace planroute {

/// Pass thresholds of the harness. These are test-budget choices.
struct Thresholds {
  double ks{0.02};
  double mean_se{3.0};
  double padding_slack{0.5};
  double coverage_failures{0.01};
  double stretch_fraction{0.99};
  double growth_slack{1.5};
  double tree_count_slack{1.5};
};

struct PropertyResult {
  std::string property;
  std::string instance;
  bool passed{false};
  bool asserted{true};  // false: measurement only, never fails the suite
  double measured{0.0};
  double bound{0.0};
  std::optional<Interval> ci;
  std::uint64_t seed{0};
  std::string note;
};

// ---- sampler -----------------------------------------------------------------

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Each lambda gets its own stream; with a shared stream the inverse-CDF
// transform would make every K-S distance identical.
inline std::vector<double> texp_samples(double lambda, int count, std::uint64_t seed) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  const auto stream = hash_keys(seed, {std::bit_cast<std::uint64_t>(lambda)});
  for (int i = 0; i < count; ++i)
    xs[static_cast<std::size_t>(i)] = sample_texp({lambda, 1.0}, stream, static_cast<std::uint64_t>(i));
  return xs;
}

/// K-S distance of sample_texp against the analytic CDF. For lambda below
/// 1e-4 the sample is compared with the uniform law, its limit.
inline PropertyResult check_sampler(double lambda, int count, std::uint64_t seed, const Thresholds& th = {}) {
  const auto xs = texp_samples(lambda, count, seed);
  const bool limit = lambda < 1e-4;
  PropertyResult r;
  r.property = "sampler_ks";
  r.instance = "lambda=" + std::to_string(lambda) + " samples=" + std::to_string(count);
  r.measured = limit ? ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); })
                     : ks_statistic(xs, [lambda](double x) { return texp_cdf(lambda, x); });
  r.bound = th.ks;
  r.passed = r.measured < r.bound;
  r.seed = seed;
  if (limit) r.note = "compared with the uniform limit";
  return r;
}

/// Sample mean within `mean_se` standard errors of the analytic mean.
inline PropertyResult check_sampler_mean(double lambda, int count, std::uint64_t seed, const Thresholds& th = {}) {
  const auto xs = texp_samples(lambda, count, seed);
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / count;
  const double se = std::sqrt(texp_variance(lambda) / count);
  PropertyResult r;
  r.property = "sampler_mean";
  r.instance = "lambda=" + std::to_string(lambda) + " samples=" + std::to_string(count);
  r.measured = std::abs(mean - texp_mean(lambda)) / se;
  r.bound = th.mean_se;
  r.passed = r.measured <= r.bound;
  r.seed = seed;
  r.note = "sample mean " + std::to_string(mean) + ", analytic " + std::to_string(texp_mean(lambda));
  return r;
}

// ---- strong diameter ---------------------------------------------------------

struct NamedGraph {
  std::string name;
  EmbeddedGraph graph;
};

inline std::vector<VertexId> all_vertex_ids(VertexId n) {
  std::vector<VertexId> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

/// Every cluster of every run has internal diameter <= 4 (1+eps) delta. All
/// vertices are centers; tau is the brute-force packing count at 3 delta.
inline PropertyResult check_diameter(const NamedGraph& ng, double delta, double eps, int seeds, std::uint64_t seed,
                                     int jobs = 1) {
  const auto& g = ng.graph;
  const auto all = SubgraphMask::all(g.num_vertices());
  const auto centers = all_vertex_ids(g.num_vertices());
  const CenterSet cs{centers, packing_count(g, all, centers, (3 + eps) * delta)};
  std::vector<double> worst(static_cast<std::size_t>(seeds), 0.0);
  std::vector<int> violations(static_cast<std::size_t>(seeds), 0);
  const double bound = 4.0 * (1.0 + eps) * delta;
  parallel_for(static_cast<std::size_t>(seeds), jobs, [&](std::size_t k) {
    DecomposeOptions opt;
    if (eps > 0) opt.mode = SsspMode::StretchNoise;
    const auto p = decompose(g, all, cs, delta, eps, hash_keys(seed, {k}), opt);
    for (double d : cluster_diameters(g, p)) {
      worst[k] = std::max(worst[k], d);
      if (d > bound + 1e-9) ++violations[k];
    }
  });
  PropertyResult r;
  r.property = "strong_diameter";
  r.instance = ng.name + " delta=" + std::to_string(delta) + " eps=" + std::to_string(eps) + " runs=" + std::to_string(seeds);
  r.measured = *std::max_element(worst.begin(), worst.end());
  r.bound = bound;
  int total = 0;
  for (int v : violations) total += v;
  r.passed = total == 0;
  r.seed = seed;
  r.note = std::to_string(total) + " violating clusters";
  return r;
}

// ---- padding -----------------------------------------------------------------

/// Aggregate preserved-ball frequency on a grid with net centers against
/// slack * e^{-64 gamma ln tau}. The refined form e^{-32(gamma+eps)(ln tau+1)}
/// - 4 lambda eps is recorded in the note.
inline PropertyResult check_padding(int side, int step, double delta, double gamma, double eps, int trials,
                                    std::uint64_t seed, bool assert_bound = true, const Thresholds& th = {}) {
  const auto g = generate_grid(side, side);
  const auto all = SubgraphMask::all(g.num_vertices());
  const auto net = grid_net(side, side, step);
  const double tau = packing_count(g, all, net, (3 + eps) * delta);
  DecomposeOptions opt;
  if (eps > 0) opt.mode = SsspMode::StretchNoise;
  const auto est = estimate_padding(g, {net, tau}, delta, eps, gamma, trials, seed, opt);
  const double lambda = 2.0 + 2.0 * std::log(tau);
  const double asymptotic = std::exp(-64.0 * gamma * std::log(tau));
  const double refined = std::exp(-32.0 * (gamma + eps) * (std::log(tau) + 1.0)) - 4.0 * lambda * eps;
  PropertyResult r;
  r.property = "padding";
  r.instance = "grid " + std::to_string(side) + "x" + std::to_string(side) + " net step " + std::to_string(step) +
               " tau=" + std::to_string(tau) + " delta=" + std::to_string(delta) + " gamma=" + std::to_string(gamma) +
               " eps=" + std::to_string(eps) + " trials=" + std::to_string(trials);
  r.measured = est.aggregate;
  r.ci = est.aggregate_ci;
  r.bound = th.padding_slack * asymptotic;
  r.asserted = assert_bound;
  r.passed = !assert_bound || (tau <= 16.0 && r.measured >= r.bound);
  r.seed = seed;
  r.note = "e^{-64 gamma ln tau} = " + std::to_string(asymptotic) + ", refined form " + std::to_string(refined) +
           ", ball radius " + std::to_string(gamma * delta) + " units";
  return r;
}

// ---- coverage ----------------------------------------------------------------

inline PropertyResult check_coverage(const NamedGraph& ng, double delta, double eps, int L, bool full_multiplier,
                                     std::uint64_t seed, const Thresholds& th = {}, double max_failures = -1) {
  const auto& g = ng.graph;
  const auto params = full_multiplier ? CoverParams::full_multiplier(delta, eps, g.num_vertices())
                                      : CoverParams::defaults(delta, eps, g.num_vertices());
  const auto covers = repeat_covers(g, params, L, seed);
  const auto res = check_cover_pairs(g, covers, delta, eps);
  PropertyResult r;
  r.property = "coverage";
  r.instance = ng.name + " delta=" + std::to_string(delta) + " eps=" + std::to_string(eps) + " L=" + std::to_string(L) +
               (full_multiplier ? " full-multiplier" : "");
  r.measured = res.failure_fraction();
  r.bound = max_failures >= 0 ? max_failures : th.coverage_failures;
  r.passed = r.measured <= r.bound;
  r.seed = seed;
  r.note = std::to_string(res.failures) + " of " + std::to_string(res.pairs) + " pairs uncovered";
  return r;
}

// ---- separators --------------------------------------------------------------

/// Random triangulated grids with n in [n_min, n_max] and random weights;
/// each separator must be one tree path whose removal leaves components of
/// at most ceil(2n/3) vertices.
inline PropertyResult check_separators(int instances, int n_min, int n_max, std::uint64_t seed, int jobs = 1) {
  std::vector<double> ratio(static_cast<std::size_t>(instances), 0.0);
  std::vector<int> bad(static_cast<std::size_t>(instances), 0);
  parallel_for(static_cast<std::size_t>(instances), jobs, [&](std::size_t k) {
    SplitMix64 rng(hash_keys(seed, {0x736570ULL, k}));
    const auto target = rng.uniform_int(n_min, n_max);
    const int rows = static_cast<int>(rng.uniform_int(3, std::max<std::int64_t>(3, static_cast<std::int64_t>(std::sqrt(target)))));
    const int cols = std::max(3, static_cast<int>(target / rows));
    const auto g = generate_triangulated_grid(rows, cols, WeightDist::uniform(1, 10), rng.next());
    const VertexId n = g.num_vertices();
    const auto all = SubgraphMask::all(n);
    SsspOptions so;
    so.mode = SsspMode::StretchNoise;
    so.eps = 0.1;
    so.seed = rng.next();
    const auto tree = approx_sssp(g, all, SourceSpec::single(static_cast<VertexId>(rng.uniform_int(0, n - 1))), so);
    const auto sep = find_separator(g, all, tree);
    // One tree path: consecutive vertices are tree parent/child.
    for (std::size_t i = 1; i < sep.path.size(); ++i) {
      const VertexId a = sep.path[i - 1], b = sep.path[i];
      if (tree.parent_of(a) != b && tree.parent_of(b) != a) ++bad[k];
    }
    SubgraphMask rest = all;
    for (VertexId v : sep.path) rest.member[static_cast<std::size_t>(v)] = 0;
    std::size_t biggest = 0;
    for (const auto& c : connected_components(g, rest)) biggest = std::max(biggest, c.size());
    if (static_cast<double>(biggest) > std::ceil(2.0 * n / 3.0)) ++bad[k];
    ratio[k] = static_cast<double>(biggest) / n;
  });
  PropertyResult r;
  r.property = "separator_balance";
  r.instance = std::to_string(instances) + " triangulated grids, n in [" + std::to_string(n_min) + "," +
               std::to_string(n_max) + "]";
  r.measured = *std::max_element(ratio.begin(), ratio.end());
  r.bound = 2.0 / 3.0;
  int total = 0;
  for (int b : bad) total += b;
  r.passed = total == 0;
  r.seed = seed;
  r.note = std::to_string(total) + " violations; measured is the largest component / n";
  return r;
}

// ---- tree routing ------------------------------------------------------------

inline RootedTree random_rooted_tree(VertexId n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RootedTree t;
  t.root = 0;
  t.members = all_vertex_ids(n);
  t.parent.assign(static_cast<std::size_t>(n), kNoVertex);
  t.dist.assign(static_cast<std::size_t>(n), 0);
  for (VertexId v = 1; v < n; ++v) {
    const auto p = rng.uniform_int(0, v - 1);
    t.parent[static_cast<std::size_t>(v)] = static_cast<VertexId>(p);
    t.dist[static_cast<std::size_t>(v)] = t.dist[static_cast<std::size_t>(p)] + rng.uniform_int(1, 9);
  }
  return t;
}

/// Iterated tree_next_hop must walk the unique tree path for all ordered
/// pairs, with length d(s) + d(t) - 2 d(lca).
inline PropertyResult check_tree_routing(int trees, VertexId n_max, std::uint64_t seed) {
  std::int64_t pairs = 0, failures = 0;
  for (int k = 0; k < trees; ++k) {
    const auto n = static_cast<VertexId>(1 + hash_keys(seed, {0x6e ^ static_cast<std::uint64_t>(k)}) % static_cast<std::uint64_t>(n_max));
    const auto t = random_rooted_tree(n, hash_keys(seed, {static_cast<std::uint64_t>(k)}));
    const auto r = build_tree_tables(t);
    auto depth = [&](VertexId v) {
      int d = 0;
      for (; v != kNoVertex; v = t.parent[static_cast<std::size_t>(v)]) ++d;
      return d;
    };
    for (VertexId s = 0; s < n; ++s)
      for (VertexId d = 0; d < n; ++d) {
        ++pairs;
        VertexId a = s, b = d;
        while (depth(a) > depth(b)) a = t.parent[static_cast<std::size_t>(a)];
        while (depth(b) > depth(a)) b = t.parent[static_cast<std::size_t>(b)];
        while (a != b) {
          a = t.parent[static_cast<std::size_t>(a)];
          b = t.parent[static_cast<std::size_t>(b)];
        }
        const auto want_hops = depth(s) + depth(d) - 2 * depth(a);
        try {
          const auto path = tree_route(r, s, r.labels[static_cast<std::size_t>(r.local(d))]);
          Length len = 0;
          for (std::size_t i = 1; i < path.size(); ++i)
            len += std::abs(t.dist[static_cast<std::size_t>(path[i])] - t.dist[static_cast<std::size_t>(path[i - 1])]);
          const Length want = t.dist[static_cast<std::size_t>(s)] + t.dist[static_cast<std::size_t>(d)] -
                              2 * t.dist[static_cast<std::size_t>(a)];
          if (len != want || static_cast<int>(path.size()) - 1 != want_hops) ++failures;
        } catch (const TreeRoutingError&) {
          ++failures;
        }
      }
  }
  PropertyResult r;
  r.property = "tree_routing";
  r.instance = std::to_string(trees) + " random trees, n <= " + std::to_string(n_max);
  r.measured = static_cast<double>(failures);
  r.bound = 0;
  r.passed = failures == 0;
  r.seed = seed;
  r.note = std::to_string(pairs) + " ordered pairs";
  return r;
}

// ---- stretch and sizes -------------------------------------------------------

inline PropertyResult check_stretch(const NamedGraph& ng, double eps, int pairs, std::uint64_t seed, int jobs = 1,
                                    const Thresholds& th = {}) {
  SchemeConfig cfg;
  cfg.eps = eps;
  cfg.seed = seed;
  cfg.jobs = jobs;
  const auto s = build_scheme(ng.graph, cfg);
  EvalOptions eo;
  eo.jobs = jobs;
  const auto rep = evaluate(ng.graph, s, PairSampler::Uniform, pairs, hash_keys(seed, {0x6576ULL}), eo);
  PropertyResult r;
  r.property = "stretch";
  r.instance = ng.name + " eps=" + std::to_string(eps) + " L=" + std::to_string(s.hierarchy.reps) + " pairs=" +
               std::to_string(pairs);
  r.measured = rep.within_fraction();
  r.bound = th.stretch_fraction;
  r.passed = rep.within_fraction() >= th.stretch_fraction && rep.below_one == 0;
  r.seed = seed;
  r.note = "p50 " + std::to_string(rep.p50) + " p99 " + std::to_string(rep.p99) + " max " + std::to_string(rep.max) +
           ", failures " + std::to_string(rep.failures) + ", below one " + std::to_string(rep.below_one);
  return r;
}

/// Max label bits on square grids of sizes ns (each 4x the previous), at
/// fixed eps. Across one x4 step the ratio may be at most
/// (log2(4n)/log2 n)^5 * slack^2, the product of two doubling steps.
inline std::vector<PropertyResult> check_size_growth(const std::vector<int>& sides, double eps, std::uint64_t seed,
                                                     int jobs = 1, const Thresholds& th = {}) {
  std::vector<double> bits;
  std::vector<double> ns;
  for (int side : sides) {
    SchemeConfig cfg;
    cfg.eps = eps;
    cfg.seed = seed;
    cfg.jobs = jobs;
    const auto g = generate_grid(side, side);
    bits.push_back(static_cast<double>(measure_sizes(build_scheme(g, cfg)).max_label_bits));
    ns.push_back(static_cast<double>(g.num_vertices()));
  }
  std::vector<PropertyResult> out;
  for (std::size_t i = 1; i < sides.size(); ++i) {
    const double steps = std::log2(ns[i] / ns[i - 1]);
    PropertyResult r;
    r.property = "label_growth";
    r.instance = "grid n " + std::to_string(static_cast<long long>(ns[i - 1])) + " -> " +
                 std::to_string(static_cast<long long>(ns[i])) + " eps=" + std::to_string(eps);
    r.measured = bits[i] / bits[i - 1];
    r.bound = std::pow(std::log2(ns[i]) / std::log2(ns[i - 1]), 5.0) * std::pow(th.growth_slack, steps);
    r.passed = r.measured <= r.bound;
    r.seed = seed;
    r.note = "max label bits " + std::to_string(static_cast<long long>(bits[i - 1])) + " -> " +
             std::to_string(static_cast<long long>(bits[i]));
    out.push_back(r);
  }
  return out;
}

/// Mean and max trees per node at eps and eps/2; the max may grow at most
/// 2 * slack.
inline PropertyResult check_tree_count(const NamedGraph& ng, double eps, std::uint64_t seed, int jobs = 1,
                                       const Thresholds& th = {}) {
  double counts[2];
  for (int k = 0; k < 2; ++k) {
    SchemeConfig cfg;
    cfg.eps = k == 0 ? eps : eps / 2;
    cfg.seed = seed;
    cfg.jobs = jobs;
    counts[k] = static_cast<double>(measure_sizes(build_scheme(ng.graph, cfg)).max_trees);
  }
  PropertyResult r;
  r.property = "trees_per_node_eps_halved";
  r.instance = ng.name + " eps " + std::to_string(eps) + " -> " + std::to_string(eps / 2);
  r.measured = counts[1] / counts[0];
  r.bound = 2.0 * th.tree_count_slack;
  r.passed = r.measured <= r.bound;
  r.seed = seed;
  r.note = "max trees per node " + std::to_string(static_cast<long long>(counts[0])) + " -> " +
           std::to_string(static_cast<long long>(counts[1]));
  return r;
}

// ---- suites ------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"sampler", "diameter", "padding", "coverage", "separator",
                                              "tree_routing", "stretch", "sizes"};
  return names;
}

/// Runs one named suite (or "all") at instance size about n. Results are
/// passed to `sink` as they complete.
inline void run_suite(const std::string& suite, int n, std::uint64_t seed, int jobs,
                      const std::function<void(const PropertyResult&)>& sink, const Thresholds& th = {}) {
  const bool all = suite == "all";
  if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw std::invalid_argument("unknown suite: " + suite);
  const int side = std::max(4, static_cast<int>(std::lround(std::sqrt(std::max(n, 16)))));
  auto want = [&](const char* name) { return all || suite == name; };
  if (want("sampler")) {
    for (double lambda : {1.0, 2.0 + 2.0 * std::log(8.0), 10.0, 1e-6}) sink(check_sampler(lambda, 100000, seed, th));
    for (double lambda : {1.0, 2.0 + 2.0 * std::log(8.0), 10.0}) sink(check_sampler_mean(lambda, 100000, seed, th));
  }
  if (want("diameter")) {
    const int d = std::min(side, 16);
    sink(check_diameter({"grid " + std::to_string(d) + "x" + std::to_string(d), generate_grid(d, d)}, 4.0, 0.0, 50,
                        seed, jobs));
    sink(check_diameter({"triangulated " + std::to_string(d) + "x" + std::to_string(d) + " w~U[1,6]",
                         generate_triangulated_grid(d, d, WeightDist::uniform(1, 6), seed)},
                        6.0, 0.0, 50, seed, jobs));
    sink(check_diameter({"grid " + std::to_string(d) + "x" + std::to_string(d) + " w~U[1,4]",
                         generate_grid(d, d, WeightDist::uniform(1, 4), seed)},
                        5.0, 0.0, 50, seed, jobs));
  }
  if (want("padding")) {
    sink(check_padding(24, 8, 8.0, 1.0 / 32, 0.0, 400, seed, true, th));
    sink(check_padding(24, 8, 8.0, 1.0 / 4, 0.0, 400, seed, false, th));
    sink(check_padding(24, 8, 8.0, 1.0 / 32, 0.1, 400, seed, false, th));
  }
  if (want("coverage")) {
    const int c = std::min(side, 14);
    const VertexId cn = c * c;
    sink(check_coverage({"grid " + std::to_string(c) + "x" + std::to_string(c), generate_grid(c, c)}, 8.0, 0.5,
                        std::max(1, static_cast<int>(std::ceil(2 * std::log2(cn)))), false, seed, th));
    sink(check_coverage({"path 20", make_unit_path(20)}, 4.0, 0.5, 1, true, seed, th, 0.0));
    sink(check_coverage({"star 12", make_star(12)}, 2.0, 0.5, 1, true, seed, th, 0.0));
  }
  if (want("separator")) sink(check_separators(100, 9, std::min(2000, std::max(64, 8 * n)), seed, jobs));
  if (want("tree_routing")) sink(check_tree_routing(500, 64, seed));
  if (want("stretch")) {
    sink(check_stretch({"grid " + std::to_string(side) + "x" + std::to_string(side), generate_grid(side, side)}, 0.5, 2000,
                       seed, jobs, th));
  }
  if (want("sizes")) {
    const int big = std::max(8, side);
    for (const auto& r : check_size_growth({std::max(2, big / 4), std::max(4, big / 2), big}, 0.5, seed, jobs, th))
      sink(r);
    // Weighted, so that portal spacing is above one unit at the upper levels.
    const int t = std::min(big, 16);
    sink(check_tree_count({"grid " + std::to_string(t) + "x" + std::to_string(t) + " w~U[1,32]",
                           generate_grid(t, t, WeightDist::uniform(1, 32), seed)},
                          0.5, seed, jobs, th));
  }
}

}  // namespace planroute
