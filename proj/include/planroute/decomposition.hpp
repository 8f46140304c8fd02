#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "planroute/graph.hpp"
#include "planroute/rng.hpp"
#include "planroute/sssp.hpp"

namespace planroute {

class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncated exponential on [0,1]: f(x) = lambda e^{-lambda x} / (1 - e^{-lambda}),
/// scaled by delta.
struct TruncExpParams {
  double lambda{1.0};
  double delta{1.0};
};

inline double texp_cdf(double lambda, double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  return std::expm1(-lambda * x) / std::expm1(-lambda);
}

/// Inverse CDF: X = -ln(1 - u (1 - e^{-lambda})) / lambda.
inline double texp_inverse_cdf(double lambda, double u) {
  const double mass = -std::expm1(-lambda);  // 1 - e^{-lambda}
  return -std::log1p(-u * mass) / lambda;
}

inline double texp_mean(double lambda) {
  return 1.0 / lambda - std::exp(-lambda) / (-std::expm1(-lambda));
}

inline double texp_variance(double lambda) {
  // E[X^2] = (2/lambda^2 - e^{-lambda}(1 + 2/lambda + 2/lambda^2)) / (1 - e^{-lambda})
  const double l2 = lambda * lambda;
  const double m2 = (2.0 / l2 - std::exp(-lambda) * (1.0 + 2.0 / lambda + 2.0 / l2)) / (-std::expm1(-lambda));
  const double m = texp_mean(lambda);
  return m2 - m * m;
}

/// Offset delta * X for the counter key (seed, key); U is drawn from the key.
inline double sample_texp(const TruncExpParams& p, std::uint64_t seed, std::uint64_t key = 0) {
  const double u = to_unit(hash_keys(seed, {key}));
  return p.delta * texp_inverse_cdf(p.lambda, u);
}

struct CenterSet {
  std::vector<VertexId> centers;
  /// Max number of centers within (3+eps)Delta of any vertex (packing bound).
  double tau{1.0};
};

/// Brute-force packing count: max over mask vertices of #centers within `radius` (graph units).
inline double packing_count(const EmbeddedGraph& g, const SubgraphMask& mask,
                            std::span<const VertexId> centers, double radius) {
  std::vector<int> count(static_cast<std::size_t>(g.num_vertices()), 0);
  const auto cutoff = static_cast<Length>(std::floor(radius * static_cast<double>(g.denominator())));
  for (VertexId c : centers) {
    auto f = exact_sssp(g, mask, SourceSpec::single(c), 1, cutoff);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
      if (f.reached(v)) ++count[static_cast<std::size_t>(v)];
  }
  return static_cast<double>(*std::max_element(count.begin(), count.end()));
}

/// Max over mask vertices of the distance (graph units) to the nearest center.
inline double covering_radius(const EmbeddedGraph& g, const SubgraphMask& mask,
                              std::span<const VertexId> centers) {
  auto f = exact_sssp(g, mask, SourceSpec::set(centers));
  Length worst = 0;
  for (VertexId v : mask.vertices()) worst = std::max(worst, f.dist_of(v));
  return static_cast<double>(worst) / static_cast<double>(g.denominator());
}

/// Centers spaced `step` apart on a rows x cols grid (row-major ids).
inline std::vector<VertexId> grid_net(int rows, int cols, int step) {
  std::vector<VertexId> out;
  for (int r = 0; r < rows; r += step)
    for (int c = 0; c < cols; c += step) out.push_back(static_cast<VertexId>(r * cols + c));
  return out;
}

struct Cluster {
  VertexId center{kNoVertex};
  double offset{0.0};  // delta_x in graph units
  std::vector<VertexId> members;
};

/// Disjoint connected clusters covering a mask. `dist_to_center` and the
/// spanning subtree come from the forest, in units of 1/ticks_per_unit.
struct Partition {
  std::vector<std::int32_t> cluster_of;  // index into clusters, -1 outside the mask
  std::vector<Cluster> clusters;
  std::vector<VertexId> parent;
  std::vector<Length> dist_to_center;
  Length ticks_per_unit{1};
  double delta{0.0};
  double eps{0.0};
  double tau{1.0};
  double lambda{2.0};
  /// Vertices whose distance to the super-source exceeds 2 Delta (1+eps).
  std::vector<VertexId> covering_violations;

  std::int32_t cluster_index(VertexId v) const { return cluster_of[static_cast<std::size_t>(v)]; }
};

struct DecomposeOptions {
  SsspMode mode{SsspMode::Exact};
  /// Sub-unit resolution for offsets: ticks per graph unit = denom * resolution.
  Length resolution{Length{1} << 20};
};

/// Clustering around `centers`: each center x draws delta_x ~ Delta*Texp(2 + 2 ln tau),
/// hangs off a virtual super-source by an edge of length Delta - delta_x, and
/// each vertex joins the center that begins its path in the (1+eps) forest.
inline Partition decompose(const EmbeddedGraph& g, const SubgraphMask& mask, const CenterSet& centers,
                           double delta, double eps, std::uint64_t seed,
                           const DecomposeOptions& opt = {}) {
  if (centers.centers.empty()) throw DecompositionError("empty center set");
  if (delta <= 0) throw DecompositionError("delta must be positive");
  if (eps < 0) throw DecompositionError("eps must be nonnegative");
  const auto n = static_cast<std::size_t>(g.num_vertices());
  Partition p;
  p.ticks_per_unit = g.denominator() * opt.resolution;
  p.delta = delta;
  p.eps = eps;
  p.tau = std::max(1.0, centers.tau);
  p.lambda = 2.0 + 2.0 * std::log(p.tau);
  const auto delta_ticks = static_cast<Length>(std::llround(delta * static_cast<double>(p.ticks_per_unit)));

  const TruncExpParams tp{p.lambda, 1.0};
  SourceSpec src;
  std::vector<double> offset_of(n, 0.0);
  std::vector<Length> virtual_len(n, 0);
  for (VertexId x : centers.centers) {
    if (!mask.contains(x)) throw DecompositionError("center outside mask");
    const double frac = sample_texp(tp, seed, static_cast<std::uint64_t>(x));
    const auto off_ticks = std::min(delta_ticks, static_cast<Length>(std::floor(frac * static_cast<double>(delta_ticks))));
    offset_of[static_cast<std::size_t>(x)] = delta * frac;
    virtual_len[static_cast<std::size_t>(x)] = delta_ticks - off_ticks;
    src.sources.push_back({x, delta_ticks - off_ticks});
  }
  SsspOptions so;
  so.scale = opt.resolution;
  so.eps = eps;
  so.mode = opt.mode;
  so.seed = hash_keys(seed, {0x73737370ULL});
  const SsspForest f = approx_sssp(g, mask, src, so);

  p.cluster_of.assign(n, -1);
  p.parent.assign(n, kNoVertex);
  p.dist_to_center.assign(n, kInfiniteLength);
  std::vector<std::int32_t> index_of_center(n, -1);
  const double cover_limit = 2.0 * static_cast<double>(delta_ticks) * (1.0 + eps);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!mask.contains(v)) continue;
    if (!f.reached(v)) throw DecompositionError("vertex " + std::to_string(v) + " unreachable from every center");
    const VertexId x = f.root_of(v);
    auto& idx = index_of_center[static_cast<std::size_t>(x)];
    if (idx < 0) {
      idx = static_cast<std::int32_t>(p.clusters.size());
      p.clusters.push_back({x, offset_of[static_cast<std::size_t>(x)], {}});
    }
    p.clusters[static_cast<std::size_t>(idx)].members.push_back(v);
    p.cluster_of[static_cast<std::size_t>(v)] = idx;
    p.parent[static_cast<std::size_t>(v)] = f.parent_of(v);
    p.dist_to_center[static_cast<std::size_t>(v)] = f.dist_of(v) - virtual_len[static_cast<std::size_t>(x)];
    if (static_cast<double>(f.dist_of(v)) > cover_limit) p.covering_violations.push_back(v);
  }
  return p;
}

/// Strong diameter of every cluster (graph units): all-pairs exact distances
/// using only cluster members.
inline std::vector<double> cluster_diameters(const EmbeddedGraph& g, const Partition& p) {
  std::vector<double> out;
  for (const auto& c : p.clusters) {
    const SubgraphMask m = SubgraphMask::of(g.num_vertices(), c.members);
    Length diam = 0;
    for (VertexId s : c.members) {
      auto f = exact_sssp(g, m, SourceSpec::single(s));
      for (VertexId v : c.members) {
        if (!f.reached(v)) throw DecompositionError("cluster not connected");
        diam = std::max(diam, f.dist_of(v));
      }
    }
    out.push_back(static_cast<double>(diam) / static_cast<double>(g.denominator()));
  }
  return out;
}

struct Interval {
  double low{0.0};
  double high{1.0};
};

/// Wilson score interval for k successes out of n at ~95% confidence.
inline Interval wilson_interval(double k, double n, double z = 1.959963984540054) {
  if (n <= 0) return {0.0, 1.0};
  const double ph = k / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct PaddingEstimate {
  std::vector<double> frequency;  // per vertex
  std::vector<Interval> ci;
  double aggregate{0.0};
  Interval aggregate_ci;
  int trials{0};
};

/// Monte-Carlo probability that B(v, gamma*Delta) lies inside v's cluster.
inline PaddingEstimate estimate_padding(const EmbeddedGraph& g, const CenterSet& centers, double delta,
                                        double eps, double gamma, int trials, std::uint64_t seed,
                                        const DecomposeOptions& opt = {}) {
  if (trials < 1) throw DecompositionError("trials must be positive");
  if (gamma < 0) throw DecompositionError("gamma must be nonnegative");
  const VertexId n = g.num_vertices();
  const SubgraphMask all = SubgraphMask::all(n);
  const auto radius = static_cast<Length>(std::floor(gamma * delta * static_cast<double>(g.denominator())));
  std::vector<std::vector<VertexId>> balls(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    auto f = exact_sssp(g, all, SourceSpec::single(v), 1, radius);
    for (VertexId w = 0; w < n; ++w)
      if (f.reached(w)) balls[static_cast<std::size_t>(v)].push_back(w);
  }
  std::vector<int> kept(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < trials; ++t) {
    const Partition p = decompose(g, all, centers, delta, eps, hash_keys(seed, {static_cast<std::uint64_t>(t)}), opt);
    for (VertexId v = 0; v < n; ++v) {
      const auto c = p.cluster_index(v);
      const auto& ball = balls[static_cast<std::size_t>(v)];
      if (std::all_of(ball.begin(), ball.end(), [&](VertexId w) { return p.cluster_index(w) == c; }))
        ++kept[static_cast<std::size_t>(v)];
    }
  }
  PaddingEstimate est;
  est.trials = trials;
  double total = 0;
  for (VertexId v = 0; v < n; ++v) {
    const double k = kept[static_cast<std::size_t>(v)];
    est.frequency.push_back(k / trials);
    est.ci.push_back(wilson_interval(k, trials));
    total += k;
  }
  const double count = static_cast<double>(trials) * n;
  est.aggregate = total / count;
  est.aggregate_ci = wilson_interval(total, count);
  return est;
}

}  // namespace planroute
