#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "planroute/graph.hpp"
#include "planroute/parallel.hpp"
#include "planroute/rng.hpp"
#include "planroute/sssp.hpp"
#include "planroute/tree_cover.hpp"
#include "planroute/tree_routing.hpp"

#ifndef PLANROUTE_VERSION
#define PLANROUTE_VERSION "0.0.0"
#endif

namespace planroute {

inline constexpr const char* kVersion = PLANROUTE_VERSION;

class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SchemeConfig {
  double eps{0.5};
  int reps{0};  // 0: ceil(2 log2 n)
  std::uint64_t seed{1};
  SsspMode mode{SsspMode::Exact};
  double noise_eps{0.0};  // separator and portal-tree error in noise mode
  bool full_multiplier{false};
  int jobs{1};
};

/// d_star = ceil(log2(n W)) distance classes with delta_i = 2^i, each
/// covered by `reps` independent (eps/3, delta_i)-additive tree covers.
struct HierarchyParams {
  int d_star{0};
  double cover_eps{0.0};
  int reps{1};

  static HierarchyParams for_graph(const EmbeddedGraph& g, double eps, int reps) {
    if (!(eps > 0)) throw SchemeError("eps must be positive");
    const VertexId n = g.num_vertices();
    const auto w = (g.max_weight() + g.denominator() - 1) / g.denominator();
    HierarchyParams h;
    h.d_star = ceil_log2(static_cast<std::int64_t>(n) * std::max<Length>(w, 1));
    h.cover_eps = eps / 3.0;
    h.reps = reps > 0 ? reps : std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(std::max<VertexId>(n, 2)))));
    return h;
  }
  static double delta(int i) { return std::ldexp(1.0, i); }
};

/// Routing state of one node in one tree.
struct SchemeEntry {
  std::uint64_t tree{0};
  std::int16_t level{0};  // distance class i
  std::int16_t rep{0};
  TreeTable table;
  std::uint32_t child_begin{0};
  std::uint32_t child_count{0};
};

/// Per-node table: one entry per containing tree, sorted by tree id. Child
/// lists live in one pool.
struct SchemeTable {
  VertexId node{kNoVertex};
  std::vector<SchemeEntry> entries;
  std::vector<VertexId> children;

  std::span<const VertexId> children_of(const SchemeEntry& e) const {
    return {children.data() + e.child_begin, e.child_count};
  }
  const SchemeEntry* find(std::uint64_t tree) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), tree,
                               [](const SchemeEntry& e, std::uint64_t id) { return e.tree < id; });
    return it != entries.end() && it->tree == tree ? &*it : nullptr;
  }
};

struct LabelEntry {
  std::uint64_t tree{0};
  VertexId root{kNoVertex};
  std::int32_t a{0};
  Length d{0};
  std::uint32_t light_begin{0};
  std::uint32_t light_count{0};
};

/// Per-node label: one TreeLabel per containing tree, sorted by tree id.
struct SchemeLabel {
  VertexId node{kNoVertex};
  std::vector<LabelEntry> entries;
  std::vector<VertexId> light;

  TreeLabel tree_label(const LabelEntry& e) const {
    return {e.root, e.a, std::vector<VertexId>(light.begin() + e.light_begin,
                                               light.begin() + e.light_begin + e.light_count), e.d};
  }
  const LabelEntry* find(std::uint64_t tree) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), tree,
                               [](const LabelEntry& e, std::uint64_t id) { return e.tree < id; });
    return it != entries.end() && it->tree == tree ? &*it : nullptr;
  }
};

struct LevelDiagnostics {
  int level{0};
  double delta{0.0};
  int trees{0};
  int max_depth{0};
  int max_trees_per_vertex_per_recursion{0};
  int max_trees_per_node_per_cover{0};
  bool spanning{false};
};

struct SchemeDiagnostics {
  std::vector<LevelDiagnostics> levels;
  int levels_built{0};
  double diameter_bound{0.0};
  bool diameter_exact{false};
  SeparatorAudit audit;
  std::int64_t trees{0};
  double build_seconds{0.0};
};

struct Scheme {
  SchemeConfig config;
  HierarchyParams hierarchy;
  VertexId n{0};
  Length denominator{1};
  Length max_weight{0};
  std::vector<SchemeTable> tables;
  std::vector<SchemeLabel> labels;
  SchemeDiagnostics diagnostics;
  std::string tool_version{kVersion};
};

namespace detail {

inline void merge_audit(SeparatorAudit& into, const SeparatorAudit& a) {
  into.separators += a.separators;
  into.degenerate += a.degenerate;
  into.fallbacks += a.fallbacks;
  into.balance_violations += a.balance_violations;
  into.arm_violations += a.arm_violations;
  into.worst_ratio = std::max(into.worst_ratio, a.worst_ratio);
  into.diameter_checks += a.diameter_checks;
  into.diameter_violations += a.diameter_violations;
}

// Weighted diameter in graph units: exact for small graphs, else 2 ecc(0).
inline std::pair<double, bool> diameter_bound(const EmbeddedGraph& g) {
  const VertexId n = g.num_vertices();
  const auto all = SubgraphMask::all(n);
  const double denom = static_cast<double>(g.denominator());
  auto ecc = [&](VertexId v) {
    const auto f = exact_sssp(g, all, SourceSpec::single(v));
    Length m = 0;
    for (VertexId w = 0; w < n; ++w) m = std::max(m, f.dist_of(w));
    return static_cast<double>(m) / denom;
  };
  if (n <= 2048) {
    double d = 0;
    for (VertexId v = 0; v < n; ++v) d = std::max(d, ecc(v));
    return {d, true};
  }
  return {2.0 * ecc(0), false};
}

inline CoverParams level_params(const SchemeConfig& cfg, const HierarchyParams& h, int level, VertexId n) {
  const double delta = HierarchyParams::delta(level);
  CoverParams p = cfg.full_multiplier ? CoverParams::full_multiplier(delta, h.cover_eps, n)
                                      : CoverParams::defaults(delta, h.cover_eps, n);
  p.repetitions = h.reps;
  if (cfg.mode == SsspMode::StretchNoise) {
    p.mode = SsspMode::StretchNoise;
    p.eps_s = cfg.noise_eps;
    p.eps_t = cfg.noise_eps;
  }
  return p;
}

}  // namespace detail

/// Builds the hierarchy Z_1..Z_{d*}. After level i is built the remaining
/// levels are skipped when 2 delta_i exceeds the diameter (every pair is
/// already in range) and some level-i tree spans the whole graph.
inline Scheme build_scheme(const EmbeddedGraph& g, const SchemeConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.mode == SsspMode::StretchNoise && !(cfg.noise_eps > 0))
    throw SchemeError("noise mode needs a positive error");
  Scheme s;
  s.config = cfg;
  s.n = g.num_vertices();
  s.denominator = g.denominator();
  s.max_weight = g.max_weight();
  s.hierarchy = HierarchyParams::for_graph(g, cfg.eps, cfg.reps);
  s.config.reps = s.hierarchy.reps;
  const VertexId n = s.n;
  s.tables.resize(static_cast<std::size_t>(n));
  s.labels.resize(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    s.tables[static_cast<std::size_t>(v)].node = v;
    s.labels[static_cast<std::size_t>(v)].node = v;
  }
  if (n <= 1) {
    s.diagnostics.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
  }
  const auto [diam, diam_exact] = detail::diameter_bound(g);
  s.diagnostics.diameter_bound = diam;
  s.diagnostics.diameter_exact = diam_exact;

  std::vector<std::uint64_t> ids;
  const int jobs = std::max(1, cfg.jobs);
  const int L = s.hierarchy.reps;
  for (int level = 1; level <= s.hierarchy.d_star; ++level) {
    const double delta = HierarchyParams::delta(level);
    const CoverParams params = detail::level_params(cfg, s.hierarchy, level, n);
    const std::uint64_t level_seed = hash_keys(cfg.seed, {0x6c766cULL, static_cast<std::uint64_t>(level)});
    LevelDiagnostics ld;
    ld.level = level;
    ld.delta = delta;
    // Repetitions are built `jobs` at a time so at most that many raw covers
    // are alive; scattering into the per-node tables is sequential.
    for (int first = 0; first < L; first += jobs) {
      const int batch = std::min(jobs, L - first);
      std::vector<TreeCover> covers(static_cast<std::size_t>(batch));
      std::vector<std::vector<TreeRouting>> routing(static_cast<std::size_t>(batch));
      parallel_for(static_cast<std::size_t>(batch), jobs, [&](std::size_t k) {
        const int r = first + static_cast<int>(k);
        const auto seed = hash_keys(level_seed, {0x726570ULL, static_cast<std::uint64_t>(r)});
        covers[k] = prune_far_roots(build_cover(g, params, seed, r, level_seed), delta, g);
        for (const auto& ct : covers[k].trees) routing[k].push_back(build_tree_tables(ct.tree));
      });
      for (std::size_t k = 0; k < covers.size(); ++k) {
        const auto& c = covers[k];
        detail::merge_audit(s.diagnostics.audit, c.audit);
        ld.max_depth = std::max(ld.max_depth, c.depth);
        ld.max_trees_per_vertex_per_recursion =
            std::max(ld.max_trees_per_vertex_per_recursion, max_trees_per_vertex_per_level(c));
        for (const auto& ts : c.trees_of)
          ld.max_trees_per_node_per_cover = std::max(ld.max_trees_per_node_per_cover, static_cast<int>(ts.size()));
        for (std::size_t ti = 0; ti < c.trees.size(); ++ti) {
          const auto& ct = c.trees[ti];
          const auto& tr = routing[k][ti];
          ids.push_back(ct.id);
          ++ld.trees;
          if (static_cast<VertexId>(ct.tree.members.size()) == n) ld.spanning = true;
          for (std::size_t j = 0; j < tr.members.size(); ++j) {
            auto& tab = s.tables[static_cast<std::size_t>(tr.members[j])];
            SchemeEntry e;
            e.tree = ct.id;
            e.level = static_cast<std::int16_t>(level);
            e.rep = static_cast<std::int16_t>(ct.repetition);
            e.table = tr.tables[j];
            e.child_begin = static_cast<std::uint32_t>(tab.children.size());
            e.child_count = static_cast<std::uint32_t>(tr.children[j].size());
            tab.children.insert(tab.children.end(), tr.children[j].begin(), tr.children[j].end());
            tab.entries.push_back(e);
            auto& lab = s.labels[static_cast<std::size_t>(tr.members[j])];
            const auto& tl = tr.labels[j];
            lab.entries.push_back({ct.id, tl.root, tl.a, tl.d, static_cast<std::uint32_t>(lab.light.size()),
                                   static_cast<std::uint32_t>(tl.light.size())});
            lab.light.insert(lab.light.end(), tl.light.begin(), tl.light.end());
          }
        }
      }
    }
    s.diagnostics.levels.push_back(ld);
    s.diagnostics.levels_built = level;
    if (2.0 * delta > diam && ld.spanning) break;
  }

  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw SchemeError("tree id collision; choose another seed");
  s.diagnostics.trees = static_cast<std::int64_t>(ids.size());

  // Sort every node's entries by tree id and repack the pools in that order.
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t v) {
    auto& tab = s.tables[v];
    std::sort(tab.entries.begin(), tab.entries.end(),
              [](const SchemeEntry& a, const SchemeEntry& b) { return a.tree < b.tree; });
    std::vector<VertexId> pool;
    pool.reserve(tab.children.size());
    for (auto& e : tab.entries) {
      const auto begin = static_cast<std::uint32_t>(pool.size());
      pool.insert(pool.end(), tab.children.begin() + e.child_begin, tab.children.begin() + e.child_begin + e.child_count);
      e.child_begin = begin;
    }
    tab.children = std::move(pool);
    auto& lab = s.labels[v];
    std::sort(lab.entries.begin(), lab.entries.end(),
              [](const LabelEntry& a, const LabelEntry& b) { return a.tree < b.tree; });
    std::vector<VertexId> lpool;
    lpool.reserve(lab.light.size());
    for (auto& e : lab.entries) {
      const auto begin = static_cast<std::uint32_t>(lpool.size());
      lpool.insert(lpool.end(), lab.light.begin() + e.light_begin, lab.light.begin() + e.light_begin + e.light_count);
      e.light_begin = begin;
    }
    lab.light = std::move(lpool);
  });
  s.diagnostics.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

struct Selection {
  enum class Kind { Delivered, Selected, NoTree };
  Kind kind{Kind::NoTree};
  std::uint64_t tree{0};
  Length bound{0};  // d(s, root) + d(root, t), graph numerators
  int level{0};
};

/// Stage-3 tree choice at s for target label t: intersect tree ids and take
/// the smallest bound through the root, ties to the smaller id.
inline Selection select_tree(const SchemeTable& s, const SchemeLabel& t) {
  if (s.node == t.node) return {Selection::Kind::Delivered, 0, 0, 0};
  Selection best;
  auto i = s.entries.begin();
  auto j = t.entries.begin();
  while (i != s.entries.end() && j != t.entries.end()) {
    if (i->tree < j->tree) {
      ++i;
    } else if (j->tree < i->tree) {
      ++j;
    } else {
      const Length b = i->table.d + j->d;
      if (best.kind == Selection::Kind::NoTree || b < best.bound) best = {Selection::Kind::Selected, i->tree, b, i->level};
      ++i;
      ++j;
    }
  }
  return best;
}

struct NodeSize {
  std::int64_t trees{0};
  std::int64_t label_bits{0};
  std::int64_t table_bits{0};
};

struct SizeReport {
  int id_bits{0};
  int dist_bits{0};
  int count_bits{0};
  std::vector<NodeSize> nodes;
  std::int64_t max_label_bits{0};
  std::int64_t max_table_bits{0};
  std::int64_t max_trees{0};
  double mean_label_bits{0.0};
  double mean_table_bits{0.0};
  double mean_trees{0.0};
};

/// Bit sizes with fixed-width fields: 64-bit tree ids, ceil(log2 n)-bit
/// vertex ids and DFS indices, ceil(log2(nW+1))-bit distances. A label entry
/// is (id, root, a, d, light count, light ids); a table entry is (id, root,
/// parent, a, b, heavy, d, children).
inline SizeReport measure_sizes(const Scheme& s) {
  SizeReport r;
  const VertexId n = s.n;
  r.nodes.resize(static_cast<std::size_t>(n));
  if (n <= 1) return r;
  r.id_bits = std::max(1, ceil_log2(n));
  r.dist_bits = std::max(1, ceil_log2(static_cast<std::int64_t>(n) * s.max_weight + 1));
  r.count_bits = std::max(1, ceil_log2(static_cast<std::int64_t>(std::floor(std::log2(n))) + 2));
  for (VertexId v = 0; v < n; ++v) {
    auto& ns = r.nodes[static_cast<std::size_t>(v)];
    const auto& tab = s.tables[static_cast<std::size_t>(v)];
    const auto& lab = s.labels[static_cast<std::size_t>(v)];
    ns.trees = static_cast<std::int64_t>(tab.entries.size());
    for (const auto& e : lab.entries)
      ns.label_bits += 64 + 2 * r.id_bits + r.dist_bits + r.count_bits + static_cast<std::int64_t>(e.light_count) * r.id_bits;
    for (const auto& e : tab.entries)
      ns.table_bits += 64 + 5 * r.id_bits + r.dist_bits + r.id_bits + static_cast<std::int64_t>(e.child_count) * r.id_bits;
    r.max_label_bits = std::max(r.max_label_bits, ns.label_bits);
    r.max_table_bits = std::max(r.max_table_bits, ns.table_bits);
    r.max_trees = std::max(r.max_trees, ns.trees);
    r.mean_label_bits += static_cast<double>(ns.label_bits);
    r.mean_table_bits += static_cast<double>(ns.table_bits);
    r.mean_trees += static_cast<double>(ns.trees);
  }
  r.mean_label_bits /= n;
  r.mean_table_bits /= n;
  r.mean_trees /= n;
  return r;
}

/// Histogram of trees per node in power-of-two buckets: key k counts nodes
/// with 2^(k-1) < trees <= 2^k (k = 0 for zero or one tree).
inline std::map<int, std::int64_t> trees_per_node_histogram(const Scheme& s) {
  std::map<int, std::int64_t> h;
  for (const auto& t : s.tables) ++h[ceil_log2(static_cast<std::int64_t>(t.entries.size()))];
  return h;
}

// ---- serialization ----------------------------------------------------------
//
// Little-endian. Header: "PRTS1\0\0\0", u32 format, u32 length + tool
// version bytes, u32 n, i64 denominator, i64 max weight, u32 d_star, u32
// levels built, f64 eps, u64 seed, u32 reps, u32 mode, f64 noise eps, u32
// full-multiplier flag. Then per node: u32 entries,
// each (u64 tree, i16 level, i16 rep, i32 root, i64 d, i32 parent, i32 a,
// i32 b, i32 heavy, u32 k, k x i32 child), then u32 labels, each (u64 tree,
// i32 root, i32 a, i64 d, u32 k, k x i32 light).

inline constexpr char kSchemeMagic[8] = {'P', 'R', 'T', 'S', '1', 0, 0, 0};
inline constexpr std::uint32_t kSchemeFormat = 1;

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& os) : os_(os) {}
  template <class T>
  void put(T value) {
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>) {
      std::memcpy(&bits, &value, sizeof(T));
    } else {
      bits = static_cast<std::uint64_t>(value);
    }
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os_.write(buf, sizeof(T));
  }

 private:
  std::ostream& os_;
};

class ByteReader {
 public:
  explicit ByteReader(std::istream& is) : is_(is) {}
  template <class T>
  T get() {
    unsigned char buf[sizeof(T)];
    if (!is_.read(reinterpret_cast<char*>(buf), sizeof(T))) throw SchemeError("truncated scheme file");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_floating_point_v<T>) {
      T value;
      std::memcpy(&value, &bits, sizeof(T));
      return value;
    } else {
      return static_cast<T>(bits);
    }
  }
  std::uint32_t count(std::uint64_t limit) {
    const auto k = get<std::uint32_t>();
    if (k > limit) throw SchemeError("corrupt scheme file: count out of range");
    return k;
  }

 private:
  std::istream& is_;
};

}  // namespace detail

inline void write_scheme(const Scheme& s, std::ostream& os) {
  os.write(kSchemeMagic, sizeof kSchemeMagic);
  detail::ByteWriter w(os);
  w.put<std::uint32_t>(kSchemeFormat);
  const std::string version = kVersion;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(version.size()));
  os.write(version.data(), static_cast<std::streamsize>(version.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.n));
  w.put<std::int64_t>(s.denominator);
  w.put<std::int64_t>(s.max_weight);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.hierarchy.d_star));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.diagnostics.levels_built));
  w.put<double>(s.config.eps);
  w.put<std::uint64_t>(s.config.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.hierarchy.reps));
  w.put<std::uint32_t>(s.config.mode == SsspMode::Exact ? 0u : 1u);
  w.put<double>(s.config.noise_eps);
  w.put<std::uint32_t>(s.config.full_multiplier ? 1u : 0u);
  for (VertexId v = 0; v < s.n; ++v) {
    const auto& tab = s.tables[static_cast<std::size_t>(v)];
    w.put<std::uint32_t>(static_cast<std::uint32_t>(tab.entries.size()));
    for (const auto& e : tab.entries) {
      w.put<std::uint64_t>(e.tree);
      w.put<std::int16_t>(e.level);
      w.put<std::int16_t>(e.rep);
      w.put<std::int32_t>(e.table.root);
      w.put<std::int64_t>(e.table.d);
      w.put<std::int32_t>(e.table.parent);
      w.put<std::int32_t>(e.table.a);
      w.put<std::int32_t>(e.table.b);
      w.put<std::int32_t>(e.table.heavy);
      w.put<std::uint32_t>(e.child_count);
      for (VertexId c : tab.children_of(e)) w.put<std::int32_t>(c);
    }
    const auto& lab = s.labels[static_cast<std::size_t>(v)];
    w.put<std::uint32_t>(static_cast<std::uint32_t>(lab.entries.size()));
    for (const auto& e : lab.entries) {
      w.put<std::uint64_t>(e.tree);
      w.put<std::int32_t>(e.root);
      w.put<std::int32_t>(e.a);
      w.put<std::int64_t>(e.d);
      w.put<std::uint32_t>(e.light_count);
      for (std::uint32_t k = 0; k < e.light_count; ++k) w.put<std::int32_t>(lab.light[e.light_begin + k]);
    }
  }
  if (!os) throw SchemeError("failed to write scheme");
}

/// Reads tables and labels back. Diagnostics are not part of the binary.
inline Scheme read_scheme(std::istream& is) {
  char magic[sizeof kSchemeMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kSchemeMagic, sizeof magic) != 0)
    throw SchemeError("not a PRTS1 scheme file");
  detail::ByteReader r(is);
  if (r.get<std::uint32_t>() != kSchemeFormat) throw SchemeError("unsupported scheme format version");
  Scheme s;
  s.tool_version.resize(r.count(256));
  if (!is.read(s.tool_version.data(), static_cast<std::streamsize>(s.tool_version.size())))
    throw SchemeError("truncated scheme file");
  s.n = static_cast<VertexId>(r.get<std::uint32_t>());
  s.denominator = r.get<std::int64_t>();
  s.max_weight = r.get<std::int64_t>();
  s.hierarchy.d_star = static_cast<int>(r.get<std::uint32_t>());
  s.diagnostics.levels_built = static_cast<int>(r.get<std::uint32_t>());
  s.config.eps = r.get<double>();
  s.hierarchy.cover_eps = s.config.eps / 3.0;
  s.config.seed = r.get<std::uint64_t>();
  s.hierarchy.reps = static_cast<int>(r.get<std::uint32_t>());
  s.config.reps = s.hierarchy.reps;
  s.config.mode = r.get<std::uint32_t>() == 0 ? SsspMode::Exact : SsspMode::StretchNoise;
  s.config.noise_eps = r.get<double>();
  s.config.full_multiplier = r.get<std::uint32_t>() != 0;
  if (s.n < 0) throw SchemeError("corrupt scheme file: vertex count");
  const auto limit = static_cast<std::uint64_t>(1) << 31;
  s.tables.resize(static_cast<std::size_t>(s.n));
  s.labels.resize(static_cast<std::size_t>(s.n));
  for (VertexId v = 0; v < s.n; ++v) {
    auto& tab = s.tables[static_cast<std::size_t>(v)];
    tab.node = v;
    tab.entries.resize(r.count(limit));
    for (auto& e : tab.entries) {
      e.tree = r.get<std::uint64_t>();
      e.level = r.get<std::int16_t>();
      e.rep = r.get<std::int16_t>();
      e.table.root = r.get<std::int32_t>();
      e.table.d = r.get<std::int64_t>();
      e.table.parent = r.get<std::int32_t>();
      e.table.a = r.get<std::int32_t>();
      e.table.b = r.get<std::int32_t>();
      e.table.heavy = r.get<std::int32_t>();
      e.child_begin = static_cast<std::uint32_t>(tab.children.size());
      e.child_count = r.count(static_cast<std::uint64_t>(s.n));
      for (std::uint32_t k = 0; k < e.child_count; ++k) tab.children.push_back(r.get<std::int32_t>());
    }
    auto& lab = s.labels[static_cast<std::size_t>(v)];
    lab.node = v;
    lab.entries.resize(r.count(limit));
    for (auto& e : lab.entries) {
      e.tree = r.get<std::uint64_t>();
      e.root = r.get<std::int32_t>();
      e.a = r.get<std::int32_t>();
      e.d = r.get<std::int64_t>();
      e.light_begin = static_cast<std::uint32_t>(lab.light.size());
      e.light_count = r.count(static_cast<std::uint64_t>(s.n));
      for (std::uint32_t k = 0; k < e.light_count; ++k) lab.light.push_back(r.get<std::int32_t>());
    }
  }
  return s;
}

}  // namespace planroute
