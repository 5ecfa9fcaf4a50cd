#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "entroute/graph.hpp"
#include "entroute/rng.hpp"

namespace entroute {

struct GridSpec {
  int nodes_per_side = 15;
  double region_km = 100.0;

  void validate() const {
    if (nodes_per_side < 2) throw std::invalid_argument("GridSpec: need at least 2 nodes per side");
    if (!(region_km > 0.0)) throw std::invalid_argument("GridSpec: region must be positive");
  }
};

struct WaxmanSpec {
  int nodes = 30;
  double region_km = 100.0;
  double alpha = 1.598;  // alpha * sqrt(2) * 100 km = 226 km
  double beta = 1.0;

  // L = sqrt(2) * R, the region diagonal.
  double characteristic_length_km() const { return alpha * std::sqrt(2.0) * region_km; }

  void validate() const {
    if (nodes < 2) throw std::invalid_argument("WaxmanSpec: need at least 2 nodes");
    if (!(region_km > 0.0)) throw std::invalid_argument("WaxmanSpec: region must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("WaxmanSpec: alpha must be positive");
    // beta = 0 (always edgeless) is degenerate but well defined
    if (!(beta >= 0.0) || beta > 1.0)
      throw std::invalid_argument("WaxmanSpec: beta must be in [0,1]");
  }
};

struct ScaleFreeSpec {
  int nodes = 30;
  double region_km = 100.0;
  int edges_per_node = 5;  // m
  int seed_clique = 6;     // m0
  double degree_exponent = 1.0;    // mu
  double distance_exponent = 1.0;  // nu

  void validate() const {
    if (!(region_km > 0.0)) throw std::invalid_argument("ScaleFreeSpec: region must be positive");
    if (edges_per_node < 1) throw std::invalid_argument("ScaleFreeSpec: m must be >= 1");
    if (seed_clique < edges_per_node)
      throw std::invalid_argument("ScaleFreeSpec: m0 must be >= m");
    if (nodes < seed_clique) throw std::invalid_argument("ScaleFreeSpec: n must be >= m0");
    if (degree_exponent < 0.0 || distance_exponent < 0.0)
      throw std::invalid_argument("ScaleFreeSpec: exponents must be >= 0");
  }
};

// N*N nodes on the lattice points of [0,R]^2, neighbors R/(N-1) apart.
inline PhysicalTopology gen_square_grid(const GridSpec& spec) {
  spec.validate();
  const int n = spec.nodes_per_side;
  const double spacing = spec.region_km / (n - 1);
  std::vector<Position> positions;
  positions.reserve(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col)
      positions.push_back({col * spacing, row * spacing});

  std::vector<EdgeEndpoints> edges;
  edges.reserve(2u * n * (n - 1));
  const auto id = [n](int row, int col) { return static_cast<NodeId>(row * n + col); };
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (col + 1 < n) edges.push_back({id(row, col), id(row, col + 1)});
      if (row + 1 < n) edges.push_back({id(row, col), id(row + 1, col)});
    }
  }
  return {std::move(positions), std::move(edges), spec.region_km};
}

// Uniform node placement; each pair connected independently with probability
// beta * exp(-d / (alpha * L)). Disconnected outputs are allowed.
inline PhysicalTopology gen_waxman(const WaxmanSpec& spec, RngStream& rng) {
  spec.validate();
  const int n = spec.nodes;
  std::vector<Position> positions;
  positions.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform01() * spec.region_km;
    const double y = rng.uniform01() * spec.region_km;
    positions.push_back({x, y});
  }

  const double scale = spec.characteristic_length_km();
  std::vector<EdgeEndpoints> edges;
  for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
    for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j) {
      const double d = std::hypot(positions[i].x_km - positions[j].x_km,
                                  positions[i].y_km - positions[j].y_km);
      const double p = spec.beta * std::exp(-d / scale);
      if (rng.bernoulli(p)) edges.push_back({i, j});
    }
  }
  return {std::move(positions), std::move(edges), spec.region_km};
}

// Spatial preferential attachment: a complete seed clique, then each new
// node attaches to m distinct existing nodes with weights k_j^mu / d_ij^nu.
inline PhysicalTopology gen_scale_free(const ScaleFreeSpec& spec, RngStream& rng) {
  spec.validate();
  const int n = spec.nodes;
  const int m0 = spec.seed_clique;
  const int m = spec.edges_per_node;
  // Distances below this clamp are treated as the clamp; the attachment
  // weight diverges at d = 0.
  constexpr double kMinDistanceKm = 1e-6;

  std::vector<Position> positions;
  positions.reserve(n);
  std::vector<EdgeEndpoints> edges;
  std::vector<std::uint32_t> degree(n, 0);

  for (int i = 0; i < m0; ++i) {
    const double x = rng.uniform01() * spec.region_km;
    const double y = rng.uniform01() * spec.region_km;
    positions.push_back({x, y});
  }
  for (NodeId i = 0; i < static_cast<NodeId>(m0); ++i) {
    for (NodeId j = i + 1; j < static_cast<NodeId>(m0); ++j) {
      edges.push_back({i, j});
      ++degree[i];
      ++degree[j];
    }
  }

  std::vector<double> weight;
  std::vector<std::uint8_t> taken;
  for (int i = m0; i < n; ++i) {
    const double x = rng.uniform01() * spec.region_km;
    const double y = rng.uniform01() * spec.region_km;
    positions.push_back({x, y});

    // Degrees are frozen for the duration of this node's m attachments.
    weight.assign(i, 0.0);
    taken.assign(i, 0);
    double total = 0.0;
    for (int j = 0; j < i; ++j) {
      const double d =
          std::max(kMinDistanceKm, std::hypot(x - positions[j].x_km, y - positions[j].y_km));
      weight[j] = std::pow(static_cast<double>(degree[j]), spec.degree_exponent) /
                  std::pow(d, spec.distance_exponent);
      total += weight[j];
    }

    for (int pick = 0; pick < m; ++pick) {
      if (!(total > 0.0)) {
        // All remaining weights vanished (isolated seed nodes); fall back to
        // uniform over the nodes not yet chosen.
        total = 0.0;
        for (int j = 0; j < i; ++j) {
          weight[j] = taken[j] ? 0.0 : 1.0;
          total += weight[j];
        }
      }
      const double r = rng.uniform01() * total;
      double acc = 0.0;
      int chosen = -1;
      for (int j = 0; j < i; ++j) {
        acc += weight[j];
        if (r < acc) {
          chosen = j;
          break;
        }
      }
      if (chosen < 0) {  // numeric edge of the cumulative scan
        for (int j = i - 1; j >= 0; --j) {
          if (weight[j] > 0.0) {
            chosen = j;
            break;
          }
        }
      }
      edges.push_back({static_cast<NodeId>(chosen), static_cast<NodeId>(i)});
      taken[chosen] = 1;
      total -= weight[chosen];
      weight[chosen] = 0.0;  // without replacement
    }
    for (int pick = 0; pick < m; ++pick) ++degree[edges[edges.size() - 1 - pick].a];
    degree[i] += m;
  }
  return {std::move(positions), std::move(edges), spec.region_km};
}

}  // namespace entroute
