#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entroute/graph.hpp"
#include "entroute/link_model.hpp"
#include "entroute/rng.hpp"

namespace entroute {

enum class Strategy {
  kBsm,         // greedy multipath routing with Bell state measurements
  kGhzUniform,  // k-GHZ measurements succeed with probability q for all k
  kGhzExp,      // k-GHZ measurements succeed with probability q^(k-1)
  kGhz23,       // cascade of two/three-qubit fusions, q^ceil((k-1)/2)
  kHybrid,      // local GHZ preparation + one BSM per elementary link
};

inline constexpr Strategy kAllStrategies[] = {Strategy::kBsm, Strategy::kGhzUniform,
                                              Strategy::kGhzExp, Strategy::kGhz23,
                                              Strategy::kHybrid};

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kBsm: return "bsm";
    case Strategy::kGhzUniform: return "ghz_uniform";
    case Strategy::kGhzExp: return "ghz_exp";
    case Strategy::kGhz23: return "ghz_23";
    case Strategy::kHybrid: return "hybrid";
  }
  throw std::invalid_argument("unknown strategy");
}

inline std::optional<Strategy> strategy_from_name(std::string_view name) {
  for (const Strategy s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  return std::nullopt;
}

struct StrategyParams {
  Strategy strategy = Strategy::kBsm;
  double q = 1.0;  // measurement success probability
  LinkParams link;

  void validate() const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("StrategyParams: q must be in [0,1]");
    link.validate();
  }
};

struct CycleOutcome {
  int pairs_delivered = 0;
};

// Survival probability of a helper of virtual degree k (k >= 2) performing a
// k-GHZ measurement. A (2,3) cascade needs ceil((k-1)/2) fusions, all of
// which must succeed.
inline double ghz_survival_prob(Strategy strategy, double q, std::uint32_t degree) {
  switch (strategy) {
    case Strategy::kGhzUniform: return q;
    case Strategy::kGhzExp: return std::pow(q, static_cast<double>(degree - 1));
    case Strategy::kGhz23: return std::pow(q, static_cast<double>(degree / 2));
    default: throw std::invalid_argument("ghz_survival_prob: not a GHZ strategy");
  }
}

// One entanglement-generation round: each physical edge is alive
// independently with the given probability. Always consumes exactly one
// uniform draw per edge, in edge-index order.
inline VirtualTopology sample_virtual(const PhysicalTopology& topo,
                                      std::span<const double> edge_alive_prob, RngStream& rng) {
  if (edge_alive_prob.size() != topo.edge_count())
    throw std::invalid_argument("sample_virtual: bad probability table size");
  VirtualTopology vt(topo, false);
  for (EdgeIndex e = 0; e < topo.edge_count(); ++e) {
    if (rng.bernoulli(edge_alive_prob[e])) vt.set_alive(e, true);
  }
  return vt;
}

// Per-edge elementary-link success probabilities under the fiber loss model.
inline std::vector<double> edge_success_probs(const PhysicalTopology& topo,
                                              const LinkParams& link) {
  link.validate();
  std::vector<double> probs;
  probs.reserve(topo.edge_count());
  for (EdgeIndex e = 0; e < topo.edge_count(); ++e)
    probs.push_back(link_success(topo.edge_length_km(e), link));
  return probs;
}

inline VirtualTopology sample_virtual(const PhysicalTopology& topo, const LinkParams& link,
                                      RngStream& rng) {
  const auto probs = edge_success_probs(topo, link);
  return sample_virtual(topo, probs, rng);
}

// Greedy multipath BSM routing: repeatedly take the fewest-hop path in the
// remaining virtual graph, remove its edges, and deliver the path with
// probability q^(hops-1) (one swap per intermediate node).
inline CycleOutcome run_cycle_bsm(const PhysicalTopology& topo, NodePair pair,
                                  const StrategyParams& params,
                                  std::span<const double> edge_alive_prob, RngStream& rng) {
  VirtualTopology vt = sample_virtual(topo, edge_alive_prob, rng);
  const std::vector<std::uint8_t> all(topo.node_count(), 1);
  int delivered = 0;
  for (;;) {
    const auto path = fewest_hops_path(vt, pair, all);
    if (!path) break;
    const double u = rng.uniform01();
    const auto hops = path->size() - 1;
    if (u < std::pow(params.q, static_cast<double>(hops - 1))) ++delivered;
    for (std::size_t i = 0; i + 1 < path->size(); ++i)
      vt.set_alive(*topo.find_edge((*path)[i], (*path)[i + 1]), false);
  }
  return {delivered};
}

// GHZ routing (uniform / exponential-decay / (2,3) variants): all helpers
// measure simultaneously based on their virtual degree; a failed measurement
// removes the helper and its incident links (site percolation). Exactly one
// uniform draw is consumed per helper regardless of degree, so runs with
// different q or different survival laws stay aligned on shared streams.
inline CycleOutcome run_cycle_ghz(const PhysicalTopology& topo, NodePair pair,
                                  const StrategyParams& params,
                                  std::span<const double> edge_alive_prob, RngStream& rng) {
  const VirtualTopology vt = sample_virtual(topo, edge_alive_prob, rng);
  const std::size_t n = topo.node_count();

  std::vector<std::uint32_t> degree(n, 0);
  for (EdgeIndex e = 0; e < topo.edge_count(); ++e) {
    if (!vt.alive(e)) continue;
    ++degree[topo.edge(e).a];
    ++degree[topo.edge(e).b];
  }

  std::vector<std::uint8_t> surviving(n, 1);
  for (NodeId h = 0; h < n; ++h) {
    if (h == pair.u || h == pair.v) continue;  // user nodes never measure
    const double u = rng.uniform01();
    const std::uint32_t k = degree[h];
    if (k == 0) continue;
    if (k == 1) {
      surviving[h] = 0;  // X measurement disentangles the leaf
      continue;
    }
    if (u >= ghz_survival_prob(params.strategy, params.q, k)) surviving[h] = 0;
  }
  return {connected(vt, pair, surviving) ? 1 : 0};
}

// Hybrid GHZ-BSM routing: per edge, transmission and the single fusing BSM
// must both succeed (probability eta*q); helper nodes themselves never fail.
inline CycleOutcome run_cycle_hybrid(const PhysicalTopology& topo, NodePair pair,
                                     const StrategyParams& params,
                                     std::span<const double> edge_alive_prob, RngStream& rng) {
  if (edge_alive_prob.size() != topo.edge_count())
    throw std::invalid_argument("run_cycle_hybrid: bad probability table size");
  VirtualTopology vt(topo, false);
  for (EdgeIndex e = 0; e < topo.edge_count(); ++e) {
    if (rng.bernoulli(edge_alive_prob[e] * params.q)) vt.set_alive(e, true);
  }
  const std::vector<std::uint8_t> all(topo.node_count(), 1);
  return {connected(vt, pair, all) ? 1 : 0};
}

inline CycleOutcome run_cycle(const PhysicalTopology& topo, NodePair pair,
                              const StrategyParams& params,
                              std::span<const double> edge_alive_prob, RngStream& rng) {
  topo.check_node(pair.u);
  topo.check_node(pair.v);
  switch (params.strategy) {
    case Strategy::kBsm: return run_cycle_bsm(topo, pair, params, edge_alive_prob, rng);
    case Strategy::kGhzUniform:
    case Strategy::kGhzExp:
    case Strategy::kGhz23: return run_cycle_ghz(topo, pair, params, edge_alive_prob, rng);
    case Strategy::kHybrid: return run_cycle_hybrid(topo, pair, params, edge_alive_prob, rng);
  }
  throw std::invalid_argument("unknown strategy");
}

inline CycleOutcome run_cycle(const PhysicalTopology& topo, NodePair pair,
                              const StrategyParams& params, RngStream& rng) {
  params.validate();
  const auto probs = edge_success_probs(topo, params.link);
  return run_cycle(topo, pair, params, probs, rng);
}

// Exact expected pairs per cycle by enumeration over all edge-alive subsets
// (and, for the GHZ family, all helper survival outcomes). Verification
// oracle for the Monte Carlo path; only feasible on small instances.
inline double exact_rate_bruteforce(const PhysicalTopology& topo, NodePair pair,
                                    const StrategyParams& params) {
  params.validate();
  topo.check_node(pair.u);
  topo.check_node(pair.v);
  const std::size_t n_edges = topo.edge_count();
  const std::size_t n_helpers = topo.node_count() - 2;
  if (n_edges + n_helpers > 20)
    throw std::invalid_argument("exact_rate_bruteforce: instance too large");

  const auto probs = edge_success_probs(topo, params.link);
  const std::size_t n = topo.node_count();
  const std::vector<std::uint8_t> all(n, 1);

  double expected = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_edges); ++mask) {
    VirtualTopology vt(topo, false);
    double p_mask = 1.0;
    for (EdgeIndex e = 0; e < n_edges; ++e) {
      const double pe =
          params.strategy == Strategy::kHybrid ? probs[e] * params.q : probs[e];
      if (mask & (std::uint64_t{1} << e)) {
        p_mask *= pe;
        vt.set_alive(e, true);
      } else {
        p_mask *= 1.0 - pe;
      }
    }
    if (p_mask == 0.0) continue;

    switch (params.strategy) {
      case Strategy::kBsm: {
        // Replay the greedy path selection; expectation over the independent
        // swap outcomes is q^(hops-1) per selected path.
        double delivered = 0.0;
        for (;;) {
          const auto path = fewest_hops_path(vt, pair, all);
          if (!path) break;
          delivered += std::pow(params.q, static_cast<double>(path->size() - 2));
          for (std::size_t i = 0; i + 1 < path->size(); ++i)
            vt.set_alive(*topo.find_edge((*path)[i], (*path)[i + 1]), false);
        }
        expected += p_mask * delivered;
        break;
      }
      case Strategy::kHybrid: {
        if (connected(vt, pair, all)) expected += p_mask;
        break;
      }
      default: {  // GHZ family
        std::vector<std::uint32_t> degree(n, 0);
        for (EdgeIndex e = 0; e < n_edges; ++e) {
          if (!vt.alive(e)) continue;
          ++degree[topo.edge(e).a];
          ++degree[topo.edge(e).b];
        }
        std::vector<NodeId> fallible;  // helpers that measure with k >= 2
        std::vector<std::uint8_t> surviving(n, 1);
        for (NodeId h = 0; h < n; ++h) {
          if (h == pair.u || h == pair.v) continue;
          if (degree[h] == 1) surviving[h] = 0;
          else if (degree[h] >= 2) fallible.push_back(h);
        }
        double p_conn = 0.0;
        for (std::uint64_t smask = 0; smask < (std::uint64_t{1} << fallible.size()); ++smask) {
          double p_s = 1.0;
          for (std::size_t i = 0; i < fallible.size(); ++i) {
            const double s = ghz_survival_prob(params.strategy, params.q, degree[fallible[i]]);
            const bool alive = smask & (std::uint64_t{1} << i);
            surviving[fallible[i]] = alive ? 1 : 0;
            p_s *= alive ? s : 1.0 - s;
          }
          if (p_s > 0.0 && connected(vt, pair, surviving)) p_conn += p_s;
        }
        expected += p_mask * p_conn;
        break;
      }
    }
  }
  return expected;
}

}  // namespace entroute
