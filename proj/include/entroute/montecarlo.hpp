#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "entroute/generators.hpp"
#include "entroute/gml.hpp"
#include "entroute/graph.hpp"
#include "entroute/link_model.hpp"
#include "entroute/rng.hpp"
#include "entroute/strategies.hpp"
#include "entroute/topology_format.hpp"

namespace entroute {

struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  NodePair pair;
  double distance_km = 0.0;
};

// Addresses the per-cycle streams of one (topology, pair) estimation unit.
// Cycle i replays derive_stream(master, topology_index, pair_index, i), so
// every strategy and every q value sees identical randomness for cycle i.
class CycleStreamSource {
 public:
  CycleStreamSource(std::uint64_t master_seed, std::uint64_t topology_index,
                    std::uint64_t pair_index)
      : master_(master_seed), topology_(topology_index), pair_(pair_index) {}

  RngStream cycle(std::uint64_t i) const { return derive_stream(master_, topology_, pair_, i); }

 private:
  std::uint64_t master_;
  std::uint64_t topology_;
  std::uint64_t pair_;
};

namespace mc_detail {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }
};

}  // namespace mc_detail

// Monte Carlo mean and standard error of pairs_delivered over n_samples
// independent cycles. Deterministic given the stream source.
inline RateEstimate estimate_rate(const PhysicalTopology& topo, NodePair pair,
                                  const StrategyParams& params, std::int64_t n_samples,
                                  const CycleStreamSource& streams) {
  if (n_samples < 1) throw std::invalid_argument("estimate_rate: need n_samples >= 1");
  params.validate();
  const auto probs = edge_success_probs(topo, params.link);
  mc_detail::Accumulator acc;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    RngStream rng = streams.cycle(static_cast<std::uint64_t>(i));
    acc.add(run_cycle(topo, pair, params, probs, rng).pairs_delivered);
  }
  return {acc.mean(), acc.std_error(), n_samples, pair, euclidean_distance(topo, pair)};
}

enum class TopologyKind { kGrid, kWaxman, kScaleFree, kFile };

inline std::string_view topology_kind_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::kGrid: return "grid";
    case TopologyKind::kWaxman: return "waxman";
    case TopologyKind::kScaleFree: return "scalefree";
    case TopologyKind::kFile: return "file";
  }
  throw std::invalid_argument("unknown topology kind");
}

struct TopologySpec {
  TopologyKind kind = TopologyKind::kGrid;
  std::vector<int> sizes = {15};  // grid: nodes per side; waxman/scale-free: node count
  double region_km = 100.0;
  // Waxman
  double alpha = 1.598;
  double beta = 1.0;
  // scale-free
  int edges_per_node = 5;
  int seed_clique = 6;
  double degree_exponent = 1.0;
  double distance_exponent = 1.0;
  // file
  std::string path;
};

enum class ExperimentMode { kAverageRate, kRateVsDistance };

// Zeros mean "use the default for this topology kind and mode".
struct SamplingPlan {
  int topologies = 0;
  int pairs = 0;  // for file topologies the default is all node pairs
  int virtual_samples = 0;
  bool same_component_only = false;
};

struct ExperimentConfig {
  TopologySpec topology;
  std::vector<Strategy> strategies = {Strategy::kBsm, Strategy::kGhzUniform, Strategy::kGhzExp,
                                      Strategy::kGhz23, Strategy::kHybrid};
  std::vector<double> q_values = {0.9};
  LinkParams link;
  ExperimentMode mode = ExperimentMode::kAverageRate;
  SamplingPlan plan;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (strategies.empty()) throw std::invalid_argument("config: no strategies");
    if (q_values.empty()) throw std::invalid_argument("config: no q values");
    for (const double q : q_values)
      if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("config: q outside [0,1]");
    link.validate();
    if (topology.kind == TopologyKind::kFile) {
      if (topology.path.empty()) throw std::invalid_argument("config: file topology needs a path");
    } else if (topology.sizes.empty()) {
      throw std::invalid_argument("config: topology size list is empty");
    }
    if (plan.topologies < 0 || plan.pairs < 0 || plan.virtual_samples < 0)
      throw std::invalid_argument("config: negative sampling counts");
  }

  // Sampling-plan defaults: random models 10 topologies x 20 pairs x 500
  // samples; square grids 100 pairs x 500 samples; file topologies all pairs
  // x 500 samples. Rate-vs-distance runs use 100 pairs x 1000 samples.
  SamplingPlan resolved_plan() const {
    SamplingPlan p = plan;
    const bool random_model =
        topology.kind == TopologyKind::kWaxman || topology.kind == TopologyKind::kScaleFree;
    if (p.topologies == 0)
      p.topologies = random_model && mode == ExperimentMode::kAverageRate ? 10 : 1;
    if (!random_model) p.topologies = 1;  // grids and files have no topology randomness
    if (mode == ExperimentMode::kRateVsDistance) {
      if (p.pairs == 0) p.pairs = 100;
      if (p.virtual_samples == 0) p.virtual_samples = 1000;
    } else {
      if (p.pairs == 0) {
        if (topology.kind == TopologyKind::kFile) p.pairs = -1;  // all pairs
        else if (topology.kind == TopologyKind::kGrid) p.pairs = 100;
        else p.pairs = 20;
      }
      if (p.virtual_samples == 0) p.virtual_samples = 500;
    }
    return p;
  }
};

struct PairRateRecord {
  double sweep_value = 0.0;
  int topology_index = 0;
  Strategy strategy = Strategy::kBsm;
  double q = 0.0;
  RateEstimate estimate{0.0, 0.0, 0, NodePair{0, 1}, 0.0};
};

struct AverageRateRecord {
  double sweep_value = 0.0;
  Strategy strategy = Strategy::kBsm;
  double q = 0.0;
  double mean = 0.0;
  double std_error = 0.0;  // spread of the per-pair estimates
  std::int64_t n_pair_estimates = 0;
  std::int64_t samples_per_pair = 0;
};

struct ExperimentResults {
  std::vector<PairRateRecord> pair_rates;
  std::vector<AverageRateRecord> averages;
};

inline PhysicalTopology load_topology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".gml") == 0)
    return parse_gml(text).topology;
  return read_topology(text);
}

namespace mc_detail {

inline PhysicalTopology make_topology(const TopologySpec& spec, int size, RngStream& rng) {
  switch (spec.kind) {
    case TopologyKind::kGrid: return gen_square_grid({size, spec.region_km});
    case TopologyKind::kWaxman: return gen_waxman({size, spec.region_km, spec.alpha, spec.beta}, rng);
    case TopologyKind::kScaleFree:
      return gen_scale_free({size, spec.region_km, spec.edges_per_node, spec.seed_clique,
                             spec.degree_exponent, spec.distance_exponent},
                            rng);
    case TopologyKind::kFile: return load_topology_file(spec.path);
  }
  throw std::invalid_argument("unknown topology kind");
}

// Uniform over unordered distinct pairs; without replacement when the budget
// fits, with replacement (duplicates allowed) otherwise. budget < 0 => all.
inline std::vector<NodePair> sample_pairs(const PhysicalTopology& topo, int budget,
                                          bool same_component_only, RngStream& rng) {
  const std::size_t n = topo.node_count();
  if (n < 2) throw std::invalid_argument("sample_pairs: need at least 2 nodes");

  std::vector<std::uint8_t> ok;
  if (same_component_only) {
    UnionFind uf(n);
    for (const auto& e : topo.edges()) uf.unite(e.a, e.b);
    ok.assign(n * n, 0);
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (uf.same(u, v)) ok[u * n + v] = 1;
  }
  const auto admissible = [&](NodeId u, NodeId v) {
    return !same_component_only || ok[u * n + v] != 0;
  };

  std::vector<NodePair> all;
  all.reserve(n * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (admissible(u, v)) all.emplace_back(u, v);
  if (all.empty()) throw std::runtime_error("sample_pairs: no admissible node pair");

  if (budget < 0 || static_cast<std::size_t>(budget) == all.size()) return all;

  if (static_cast<std::size_t>(budget) < all.size()) {
    // Partial Fisher-Yates: first `budget` entries are a uniform sample
    // without replacement.
    for (int i = 0; i < budget; ++i) {
      const std::size_t j = i + rng.below(all.size() - i);
      std::swap(all[i], all[j]);
    }
    all.erase(all.begin() + budget, all.end());
    return all;
  }

  std::vector<NodePair> out;
  out.reserve(budget);
  for (int i = 0; i < budget; ++i) out.push_back(all[rng.below(all.size())]);
  return out;
}

}  // namespace mc_detail

// Runs the configured experiment. Work is split over (topology, pair) units;
// every unit derives its own streams from the master seed, so results are
// byte-identical for any worker count.
inline ExperimentResults run_experiment(const ExperimentConfig& config, int threads = 1) {
  config.validate();
  const SamplingPlan plan = config.resolved_plan();

  struct Unit {
    int sweep_idx;
    int size;
    int topo_idx;          // within sweep value
    std::uint64_t global_topo;
    std::uint64_t pair_idx;
    const PhysicalTopology* topo;
    NodePair pair{0, 1};
  };

  const std::vector<int> sizes =
      config.topology.kind == TopologyKind::kFile ? std::vector<int>{0} : config.topology.sizes;

  // Generate topologies and pair lists up front (cheap relative to cycles).
  std::vector<PhysicalTopology> topologies;
  std::vector<Unit> units;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (int t = 0; t < plan.topologies; ++t) {
      const std::uint64_t global_topo = s * static_cast<std::uint64_t>(plan.topologies) + t;
      RngStream topo_rng(
          derive_key(config.master_seed, StreamDomain::kTopology, global_topo, 0, 0));
      topologies.push_back(mc_detail::make_topology(config.topology, sizes[s], topo_rng));
    }
  }
  {
    std::size_t topo_slot = 0;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      for (int t = 0; t < plan.topologies; ++t, ++topo_slot) {
        const PhysicalTopology& topo = topologies[topo_slot];
        const std::uint64_t global_topo = s * static_cast<std::uint64_t>(plan.topologies) + t;
        RngStream pair_rng(
            derive_key(config.master_seed, StreamDomain::kPairs, global_topo, 0, 0));
        const auto pairs =
            mc_detail::sample_pairs(topo, plan.pairs, plan.same_component_only, pair_rng);
        for (std::size_t p = 0; p < pairs.size(); ++p)
          units.push_back({static_cast<int>(s), sizes[s], t, global_topo, p, &topo, pairs[p]});
      }
    }
  }

  // Per unit, estimate every (strategy, q) on shared per-cycle streams.
  const std::size_t n_cells = config.strategies.size() * config.q_values.size();
  std::vector<std::vector<RateEstimate>> unit_results(units.size());

  const auto run_unit = [&](const Unit& unit, std::vector<RateEstimate>& out) {
    const PhysicalTopology& topo = *unit.topo;
    const auto probs = edge_success_probs(topo, config.link);
    std::vector<mc_detail::Accumulator> acc(n_cells);
    for (std::int64_t i = 0; i < plan.virtual_samples; ++i) {
      std::size_t cell = 0;
      for (const Strategy strategy : config.strategies) {
        for (const double q : config.q_values) {
          RngStream rng = derive_stream(config.master_seed, unit.global_topo, unit.pair_idx,
                                        static_cast<std::uint64_t>(i));
          const StrategyParams params{strategy, q, config.link};
          acc[cell].add(run_cycle(topo, unit.pair, params, probs, rng).pairs_delivered);
          ++cell;
        }
      }
    }
    out.reserve(n_cells);
    const double dist = euclidean_distance(topo, unit.pair);
    for (std::size_t c = 0; c < n_cells; ++c)
      out.push_back({acc[c].mean(), acc[c].std_error(), plan.virtual_samples, unit.pair, dist});
  };

  const int worker_count =
      std::max(1, std::min<int>(threads, static_cast<int>(units.size())));
  if (worker_count <= 1) {
    for (std::size_t u = 0; u < units.size(); ++u) run_unit(units[u], unit_results[u]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t u = next.fetch_add(1);
          if (u >= units.size()) return;
          run_unit(units[u], unit_results[u]);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  ExperimentResults results;
  if (config.mode == ExperimentMode::kRateVsDistance) {
    for (std::size_t u = 0; u < units.size(); ++u) {
      std::size_t cell = 0;
      for (const Strategy strategy : config.strategies) {
        for (const double q : config.q_values) {
          results.pair_rates.push_back({static_cast<double>(units[u].size), units[u].topo_idx,
                                        strategy, q, unit_results[u][cell]});
          ++cell;
        }
      }
    }
    std::stable_sort(results.pair_rates.begin(), results.pair_rates.end(),
                     [](const PairRateRecord& a, const PairRateRecord& b) {
                       if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
                       if (a.strategy != b.strategy) return a.strategy < b.strategy;
                       if (a.q != b.q) return a.q < b.q;
                       return a.estimate.distance_km < b.estimate.distance_km;
                     });
  } else {
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      std::size_t cell = 0;
      for (const Strategy strategy : config.strategies) {
        for (const double q : config.q_values) {
          mc_detail::Accumulator acc;
          for (std::size_t u = 0; u < units.size(); ++u) {
            if (units[u].sweep_idx != static_cast<int>(s)) continue;
            acc.add(unit_results[u][cell].mean);
          }
          results.averages.push_back({static_cast<double>(sizes[s]), strategy, q, acc.mean(),
                                      acc.std_error(), acc.n, plan.virtual_samples});
          ++cell;
        }
      }
    }
  }
  return results;
}

// The two figures of merit as single calls.
inline std::vector<AverageRateRecord> average_rate(ExperimentConfig config, int threads = 1) {
  config.mode = ExperimentMode::kAverageRate;
  return run_experiment(config, threads).averages;
}

inline std::vector<PairRateRecord> rate_vs_distance(ExperimentConfig config, int threads = 1) {
  config.mode = ExperimentMode::kRateVsDistance;
  return run_experiment(config, threads).pair_rates;
}

}  // namespace entroute
