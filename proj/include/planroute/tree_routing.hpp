#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "planroute/graph.hpp"

namespace planroute {

class TreeRoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rooted tree over graph vertices, as parallel arrays. parent is kNoVertex
/// at the root; dist is the tree distance to the root.
struct RootedTree {
  VertexId root{kNoVertex};
  std::vector<VertexId> members;
  std::vector<VertexId> parent;
  std::vector<Length> dist;

  std::size_t size() const noexcept { return members.size(); }
};

/// Per-node routing state in one tree.
struct TreeTable {
  VertexId root{kNoVertex};
  Length d{0};
  VertexId parent{kNoVertex};
  std::int32_t a{0};  // DFS preorder index
  std::int32_t b{0};  // largest preorder index in the subtree
  VertexId heavy{kNoVertex};

  friend bool operator==(const TreeTable&, const TreeTable&) = default;
};

/// Per-target label in one tree. `light` lists the lower endpoints of the
/// non-heavy edges on the root path, root first.
struct TreeLabel {
  VertexId root{kNoVertex};
  std::int32_t a{0};
  std::vector<VertexId> light;
  Length d{0};

  friend bool operator==(const TreeLabel&, const TreeLabel&) = default;
};

/// Tables, labels and child lists for every member, indexed like tree.members.
struct TreeRouting {
  std::vector<VertexId> members;  // sorted by id
  std::vector<TreeTable> tables;
  std::vector<TreeLabel> labels;
  std::vector<std::vector<VertexId>> children;  // sorted by id

  std::int64_t local(VertexId v) const {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v) return -1;
    return it - members.begin();
  }
};

inline TreeRouting build_tree_tables(const RootedTree& tree) {
  const std::size_t n = tree.members.size();
  if (tree.parent.size() != n || tree.dist.size() != n) throw TreeRoutingError("tree arrays differ in length");
  TreeRouting r;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) { return tree.members[x] < tree.members[y]; });
  r.members.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.members[i] = tree.members[perm[i]];
  if (std::adjacent_find(r.members.begin(), r.members.end()) != r.members.end())
    throw TreeRoutingError("duplicate tree member");

  std::vector<std::int64_t> par(n, -1);
  std::vector<Length> dist(n, 0);
  std::int64_t root = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = perm[i];
    dist[i] = tree.dist[src];
    const VertexId p = tree.parent[src];
    if (p == kNoVertex) {
      if (root >= 0) throw TreeRoutingError("several roots");
      root = static_cast<std::int64_t>(i);
      continue;
    }
    par[i] = r.local(p);
    if (par[i] < 0) throw TreeRoutingError("parent outside tree");
  }
  if (n > 0 && (root < 0 || r.members[static_cast<std::size_t>(root)] != tree.root))
    throw TreeRoutingError("root mismatch");

  // Cycle check: every parent chain must reach the root.
  std::vector<char> state(n, 0);  // 0 new, 1 on stack, 2 ok
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> chain;
    std::int64_t v = static_cast<std::int64_t>(i);
    while (v >= 0 && state[static_cast<std::size_t>(v)] == 0) {
      state[static_cast<std::size_t>(v)] = 1;
      chain.push_back(static_cast<std::size_t>(v));
      v = par[static_cast<std::size_t>(v)];
    }
    if (v >= 0 && state[static_cast<std::size_t>(v)] == 1) throw TreeRoutingError("cycle in parent links");
    for (auto c : chain) state[c] = 2;
  }

  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i)
    if (par[i] >= 0) kids[static_cast<std::size_t>(par[i])].push_back(i);
  // Subtree sizes by decreasing depth.
  std::vector<std::size_t> order;
  order.reserve(n);
  if (n > 0) order.push_back(static_cast<std::size_t>(root));
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto c : kids[order[k]]) order.push_back(c);
  std::vector<std::int64_t> size(n, 1);
  for (std::size_t k = order.size(); k-- > 1;) size[static_cast<std::size_t>(par[order[k]])] += size[order[k]];

  r.tables.resize(n);
  r.labels.resize(n);
  r.children.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& ks = kids[i];
    // Visit order: ascending (subtree size, id).
    std::sort(ks.begin(), ks.end(), [&](std::size_t x, std::size_t y) {
      return size[x] != size[y] ? size[x] < size[y] : r.members[x] < r.members[y];
    });
    for (auto c : ks) r.children[i].push_back(r.members[c]);
    std::sort(r.children[i].begin(), r.children[i].end());
    auto& t = r.tables[i];
    t.root = tree.root;
    t.d = dist[i];
    t.parent = par[i] >= 0 ? r.members[static_cast<std::size_t>(par[i])] : kNoVertex;
    t.heavy = kNoVertex;
    std::int64_t best = 0;
    for (auto c : ks)  // largest subtree, ties to the smaller id
      if (size[c] > best) {
        best = size[c];
        t.heavy = r.members[c];
      }
  }

  // Iterative preorder.
  std::int32_t counter = 0;
  std::vector<std::size_t> stack;
  if (n > 0) stack.push_back(static_cast<std::size_t>(root));
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    r.tables[v].a = counter++;
    const auto& ks = kids[v];
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.push_back(*it);
  }
  for (std::size_t i = 0; i < n; ++i) r.tables[i].b = r.tables[i].a + static_cast<std::int32_t>(size[i]) - 1;

  for (auto v : order) {
    auto& lab = r.labels[v];
    lab.root = tree.root;
    lab.a = r.tables[v].a;
    lab.d = dist[v];
    if (par[v] >= 0) {
      const auto p = static_cast<std::size_t>(par[v]);
      lab.light = r.labels[p].light;
      if (r.tables[p].heavy != r.members[v]) lab.light.push_back(r.members[v]);
    }
  }
  return r;
}

struct NextHop {
  enum class Kind { Delivered, Forward, NotInTree };
  Kind kind{Kind::Delivered};
  VertexId vertex{kNoVertex};
};

/// Forwarding decision at a node holding `table`, whose tree children are
/// `children` (sorted ids), for a packet carrying `target`. Memoryless.
inline NextHop tree_next_hop(const TreeTable& table, std::span<const VertexId> children, const TreeLabel& target) {
  if (table.root != target.root) return {NextHop::Kind::NotInTree, kNoVertex};
  if (target.a == table.a) return {NextHop::Kind::Delivered, kNoVertex};
  if (target.a < table.a || target.a > table.b) {
    if (table.parent == kNoVertex) return {NextHop::Kind::NotInTree, kNoVertex};
    return {NextHop::Kind::Forward, table.parent};
  }
  for (VertexId l : target.light)
    if (std::binary_search(children.begin(), children.end(), l)) return {NextHop::Kind::Forward, l};
  if (table.heavy == kNoVertex) return {NextHop::Kind::NotInTree, kNoVertex};
  return {NextHop::Kind::Forward, table.heavy};
}

/// Full path from s to the owner of `target` inside one tree.
inline std::vector<VertexId> tree_route(const TreeRouting& r, VertexId s, const TreeLabel& target) {
  std::int64_t at = r.local(s);
  if (at < 0) throw TreeRoutingError("source not in tree");
  std::vector<VertexId> path{s};
  for (std::size_t hops = 0; hops <= r.members.size(); ++hops) {
    const auto i = static_cast<std::size_t>(at);
    const NextHop h = tree_next_hop(r.tables[i], r.children[i], target);
    if (h.kind == NextHop::Kind::Delivered) return path;
    if (h.kind == NextHop::Kind::NotInTree) throw TreeRoutingError("target not in tree");
    path.push_back(h.vertex);
    at = r.local(h.vertex);
  }
  throw TreeRoutingError("routing loop");
}

}  // namespace planroute
