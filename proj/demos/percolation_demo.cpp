// Minimal tour of the library: build a grid, sample a virtual topology, run
// one cycle of each strategy, and estimate a rate.
#include <cstdio>

#include "entroute/generators.hpp"
#include "entroute/montecarlo.hpp"
#include "entroute/strategies.hpp"

int main() {
  using namespace entroute;

  const PhysicalTopology grid = gen_square_grid({5, 100.0});
  const NodePair corners{0, static_cast<NodeId>(grid.node_count() - 1)};
  std::printf("5x5 grid: %zu nodes, %zu edges, corner distance %.1f km\n", grid.node_count(),
              grid.edge_count(), euclidean_distance(grid, corners));

  const LinkParams link{0.2, 1};
  RngStream rng(derive_key(7, StreamDomain::kGeneric, 0, 0, 0));
  const VirtualTopology vt = sample_virtual(grid, link, rng);
  std::printf("one entanglement round: %zu of %zu links alive\n", vt.alive_count(),
              grid.edge_count());

  for (const Strategy strategy : kAllStrategies) {
    const StrategyParams params{strategy, 0.9, link};
    const RateEstimate est =
        estimate_rate(grid, corners, params, 20000, CycleStreamSource(7, 0, 0));
    std::printf("  %-12s rate %.4f +- %.4f pairs/cycle\n",
                std::string(strategy_name(strategy)).c_str(), est.mean, est.std_error);
  }
  return 0;
}
