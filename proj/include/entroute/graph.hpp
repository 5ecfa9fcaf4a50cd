#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace entroute {

using NodeId = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Position {
  double x_km = 0.0;
  double y_km = 0.0;
};

// Unordered edge; normalized so a < b.
struct EdgeEndpoints {
  NodeId a = 0;
  NodeId b = 0;

  friend bool operator==(const EdgeEndpoints&, const EdgeEndpoints&) = default;
};

// The two end users of a routing cycle.
struct NodePair {
  NodeId u;
  NodeId v;

  NodePair(NodeId u_, NodeId v_) : u(u_), v(v_) {
    if (u == v) throw std::invalid_argument("NodePair: endpoints must differ");
  }
};

// Immutable node-positioned undirected graph over a square [0,R]x[0,R] region.
// Node ids are contiguous 0..n-1; adjacency is CSR, sorted by neighbor id.
class PhysicalTopology {
 public:
  struct AdjEntry {
    NodeId neighbor;
    EdgeIndex edge;
  };

  PhysicalTopology(std::vector<Position> positions, std::vector<EdgeEndpoints> edges,
                   double region_km)
      : positions_(std::move(positions)), edges_(std::move(edges)), region_km_(region_km) {
    if (region_km_ < 0.0) throw std::invalid_argument("PhysicalTopology: negative region size");
    const double tol = 1e-9 * std::max(1.0, region_km_);
    for (const auto& p : positions_) {
      if (!(p.x_km >= -tol && p.x_km <= region_km_ + tol && p.y_km >= -tol &&
            p.y_km <= region_km_ + tol)) {
        throw std::invalid_argument("PhysicalTopology: position outside region");
      }
    }
    const auto n = positions_.size();
    for (auto& e : edges_) {
      if (e.a >= n || e.b >= n) throw std::invalid_argument("PhysicalTopology: edge id out of range");
      if (e.a == e.b) throw std::invalid_argument("PhysicalTopology: self-loop");
      if (e.a > e.b) std::swap(e.a, e.b);
    }
    {
      auto sorted = edges_;
      std::sort(sorted.begin(), sorted.end(),
                [](const EdgeEndpoints& x, const EdgeEndpoints& y) {
                  return x.a != y.a ? x.a < y.a : x.b < y.b;
                });
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("PhysicalTopology: duplicate edge");
    }

    lengths_.reserve(edges_.size());
    for (const auto& e : edges_) {
      const double dx = positions_[e.a].x_km - positions_[e.b].x_km;
      const double dy = positions_[e.a].y_km - positions_[e.b].y_km;
      lengths_.push_back(std::hypot(dx, dy));
    }

    // CSR adjacency, neighbors ascending (gives BFS its deterministic
    // smallest-neighbor-id expansion order).
    std::vector<std::uint32_t> degree(n, 0);
    for (const auto& e : edges_) {
      ++degree[e.a];
      ++degree[e.b];
    }
    adj_offsets_.assign(n + 1, 0);
    std::partial_sum(degree.begin(), degree.end(), adj_offsets_.begin() + 1);
    adj_.resize(adj_offsets_.back());
    std::vector<std::uint32_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (EdgeIndex i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      adj_[cursor[e.a]++] = {e.b, i};
      adj_[cursor[e.b]++] = {e.a, i};
    }
    for (NodeId v = 0; v < n; ++v) {
      std::sort(adj_.begin() + adj_offsets_[v], adj_.begin() + adj_offsets_[v + 1],
                [](const AdjEntry& x, const AdjEntry& y) { return x.neighbor < y.neighbor; });
    }
  }

  std::size_t node_count() const noexcept { return positions_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double region_km() const noexcept { return region_km_; }

  const Position& position(NodeId v) const {
    check_node(v);
    return positions_[v];
  }
  const std::vector<Position>& positions() const noexcept { return positions_; }

  const EdgeEndpoints& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::vector<EdgeEndpoints>& edges() const noexcept { return edges_; }
  double edge_length_km(EdgeIndex e) const { return lengths_.at(e); }

  std::span<const AdjEntry> adjacency(NodeId v) const {
    check_node(v);
    return {adj_.data() + adj_offsets_[v], adj_.data() + adj_offsets_[v + 1]};
  }

  std::optional<EdgeIndex> find_edge(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    const auto adj = adjacency(u);
    auto it = std::lower_bound(adj.begin(), adj.end(), v,
                               [](const AdjEntry& a, NodeId id) { return a.neighbor < id; });
    if (it != adj.end() && it->neighbor == v) return it->edge;
    return std::nullopt;
  }

  void check_node(NodeId v) const {
    if (v >= positions_.size()) throw std::invalid_argument("invalid node id");
  }

  friend bool operator==(const PhysicalTopology& lhs, const PhysicalTopology& rhs) {
    if (lhs.region_km_ != rhs.region_km_ || lhs.positions_.size() != rhs.positions_.size() ||
        lhs.edges_ != rhs.edges_)
      return false;
    for (std::size_t i = 0; i < lhs.positions_.size(); ++i) {
      if (lhs.positions_[i].x_km != rhs.positions_[i].x_km ||
          lhs.positions_[i].y_km != rhs.positions_[i].y_km)
        return false;
    }
    return true;
  }

 private:
  std::vector<Position> positions_;
  std::vector<EdgeEndpoints> edges_;
  std::vector<double> lengths_;
  std::vector<AdjEntry> adj_;
  std::vector<std::uint32_t> adj_offsets_;
  double region_km_;
};

// One cycle's sample of surviving entanglement links: a subset of the parent's
// edges, stored by index so a single physical topology serves many samples.
class VirtualTopology {
 public:
  VirtualTopology(const PhysicalTopology& parent, bool all_alive)
      : parent_(&parent),
        alive_(parent.edge_count(), all_alive ? 1 : 0),
        alive_count_(all_alive ? parent.edge_count() : 0) {}

  const PhysicalTopology& parent() const noexcept { return *parent_; }
  std::size_t alive_count() const noexcept { return alive_count_; }

  bool alive(EdgeIndex e) const { return alive_.at(e) != 0; }

  void set_alive(EdgeIndex e, bool value) {
    std::uint8_t& slot = alive_.at(e);
    alive_count_ += static_cast<std::size_t>(value) - static_cast<std::size_t>(slot);
    slot = value ? 1 : 0;
  }

 private:
  const PhysicalTopology* parent_;
  std::vector<std::uint8_t> alive_;
  std::size_t alive_count_;
};

// Weighted quick-union with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), NodeId{0});
  }

  NodeId find(NodeId x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(NodeId a, NodeId b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  bool same(NodeId a, NodeId b) noexcept { return find(a) == find(b); }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> size_;
};

inline double euclidean_distance(const PhysicalTopology& topo, NodeId u, NodeId v) {
  const auto& a = topo.position(u);
  const auto& b = topo.position(v);
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

inline double euclidean_distance(const PhysicalTopology& topo, NodePair pair) {
  return euclidean_distance(topo, pair.u, pair.v);
}

// Minimum-hop path from pair.u to pair.v through allowed nodes over alive
// edges, or nullopt if none exists. Ties broken by BFS with ascending
// neighbor-id expansion, so results are reproducible.
inline std::optional<std::vector<NodeId>> fewest_hops_path(const VirtualTopology& vt, NodePair pair,
                                                           std::span<const std::uint8_t> allowed) {
  const auto& topo = vt.parent();
  const std::size_t n = topo.node_count();
  if (allowed.size() != n) throw std::invalid_argument("fewest_hops_path: bad allowed-mask size");
  if (!allowed[pair.u] || !allowed[pair.v])
    throw std::invalid_argument("fewest_hops_path: pair not in allowed set");

  constexpr NodeId kUnvisited = ~NodeId{0};
  std::vector<NodeId> parent(n, kUnvisited);
  std::vector<NodeId> queue;
  queue.reserve(n);
  parent[pair.u] = pair.u;
  queue.push_back(pair.u);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId cur = queue[head];
    if (cur == pair.v) break;
    for (const auto& entry : topo.adjacency(cur)) {
      if (!vt.alive(entry.edge) || !allowed[entry.neighbor]) continue;
      if (parent[entry.neighbor] != kUnvisited) continue;
      parent[entry.neighbor] = cur;
      queue.push_back(entry.neighbor);
    }
  }
  if (parent[pair.v] == kUnvisited) return std::nullopt;

  std::vector<NodeId> path;
  for (NodeId cur = pair.v; cur != pair.u; cur = parent[cur]) path.push_back(cur);
  path.push_back(pair.u);
  std::reverse(path.begin(), path.end());
  return path;
}

// True iff a path of alive edges joins the pair inside surviving_nodes.
inline bool connected(const VirtualTopology& vt, NodePair pair,
                      std::span<const std::uint8_t> surviving_nodes) {
  const auto& topo = vt.parent();
  const std::size_t n = topo.node_count();
  if (surviving_nodes.size() != n) throw std::invalid_argument("connected: bad mask size");
  if (!surviving_nodes[pair.u] || !surviving_nodes[pair.v])
    throw std::invalid_argument("connected: pair not in surviving set");

  UnionFind uf(n);
  const auto& edges = topo.edges();
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    if (!vt.alive(e)) continue;
    const auto& ep = edges[e];
    if (surviving_nodes[ep.a] && surviving_nodes[ep.b]) uf.unite(ep.a, ep.b);
  }
  return uf.same(pair.u, pair.v);
}

// Copy of vt with the path's edges removed. Every path edge must be alive.
inline VirtualTopology remove_path_edges(const VirtualTopology& vt, std::span<const NodeId> path) {
  VirtualTopology out = vt;
  const auto& topo = vt.parent();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = topo.find_edge(path[i], path[i + 1]);
    if (!e || !out.alive(*e)) throw std::invalid_argument("remove_path_edges: edge not alive");
    out.set_alive(*e, false);
  }
  return out;
}

}  // namespace entroute
