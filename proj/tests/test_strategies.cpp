#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "entroute/generators.hpp"
#include "entroute/rng.hpp"
#include "entroute/strategies.hpp"

using namespace entroute;
using Catch::Matchers::WithinAbs;

namespace {

// gamma making every edge of the given length transmit with probability eta.
double gamma_for(double eta, double length_km) {
  return -10.0 * std::log10(eta) / length_km;
}

PhysicalTopology chain_topology(int hops, double spacing = 10.0) {
  std::vector<Position> pos;
  std::vector<EdgeEndpoints> edges;
  for (int i = 0; i <= hops; ++i) pos.push_back({i * spacing, 0.0});
  for (NodeId i = 0; i < static_cast<NodeId>(hops); ++i) edges.push_back({i, i + 1});
  return {std::move(pos), std::move(edges), spacing * hops};
}

double mc_rate(const PhysicalTopology& topo, NodePair pair, const StrategyParams& params,
               int cycles, std::uint64_t seed) {
  const auto probs = edge_success_probs(topo, params.link);
  long long total = 0;
  for (int i = 0; i < cycles; ++i) {
    RngStream rng = derive_stream(seed, 0, 0, i);
    total += run_cycle(topo, pair, params, probs, rng).pairs_delivered;
  }
  return static_cast<double>(total) / cycles;
}

struct SmallInstance {
  PhysicalTopology topo;
  NodePair pair;
};

// Random instances small enough for the brute-force oracle.
SmallInstance random_instance(RngStream& rng) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng.below(6));  // 3..8 nodes
    std::vector<Position> pos;
    for (int i = 0; i < n; ++i) pos.push_back({rng.uniform01() * 60, rng.uniform01() * 60});
    std::vector<EdgeEndpoints> edges;
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i)
      for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j)
        if (rng.uniform01() < 0.5) edges.push_back({i, j});
    if (edges.empty() || edges.size() > 12) continue;
    PhysicalTopology topo(pos, edges, 60);
    const NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n - 1));
    if (v >= u) ++v;
    return {std::move(topo), NodePair{u, v}};
  }
}

}  // namespace

TEST_CASE("ghz survival probabilities per variant") {
  const double q = 0.8;
  for (std::uint32_t k = 2; k <= 6; ++k) {
    REQUIRE(ghz_survival_prob(Strategy::kGhzUniform, q, k) == q);
    REQUIRE_THAT(ghz_survival_prob(Strategy::kGhzExp, q, k),
                 WithinAbs(std::pow(q, k - 1.0), 1e-15));
  }
  // (2,3) cascade: ceil((k-1)/2) fusions, identity 2*t3 + t2 = k - 1
  REQUIRE_THAT(ghz_survival_prob(Strategy::kGhz23, q, 2), WithinAbs(q, 1e-15));
  REQUIRE_THAT(ghz_survival_prob(Strategy::kGhz23, q, 3), WithinAbs(q, 1e-15));
  REQUIRE_THAT(ghz_survival_prob(Strategy::kGhz23, q, 4), WithinAbs(q * q, 1e-15));
  REQUIRE_THAT(ghz_survival_prob(Strategy::kGhz23, q, 5), WithinAbs(q * q, 1e-15));
  for (std::uint32_t k = 2; k <= 9; ++k) {
    const std::uint32_t fusions = k / 2;  // ceil((k-1)/2)
    const std::uint32_t three_fusions = (k - 1) / 2;
    const std::uint32_t two_fusions = (k - 1) % 2;
    REQUIRE(2 * three_fusions + two_fusions == k - 1);
    REQUIRE(three_fusions + two_fusions == fusions);
    REQUIRE_THAT(ghz_survival_prob(Strategy::kGhz23, q, k),
                 WithinAbs(std::pow(q, fusions), 1e-15));
    REQUIRE(ghz_survival_prob(Strategy::kGhzExp, q, k) <=
            ghz_survival_prob(Strategy::kGhz23, q, k) + 1e-15);
    REQUIRE(ghz_survival_prob(Strategy::kGhz23, q, k) <=
            ghz_survival_prob(Strategy::kGhzUniform, q, k) + 1e-15);
  }
}

TEST_CASE("sample_virtual edge statistics") {
  SECTION("zero loss keeps everything alive") {
    const auto grid = gen_square_grid({3, 100.0});
    RngStream rng(1);
    const auto vt = sample_virtual(grid, LinkParams{0.0, 1}, rng);
    REQUIRE(vt.alive_count() == grid.edge_count());
  }
  SECTION("single 50 km edge is alive about 10% of the time") {
    const auto t = chain_topology(1, 50.0);
    int alive = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      RngStream rng = derive_stream(21, 0, 0, i);
      alive += sample_virtual(t, LinkParams{0.2, 1}, rng).alive_count();
    }
    const double freq = static_cast<double>(alive) / n;
    REQUIRE_THAT(freq, WithinAbs(0.1, 4.0 * std::sqrt(0.1 * 0.9 / n)));
  }
  SECTION("deterministic under a fixed stream") {
    const auto grid = gen_square_grid({4, 100.0});
    RngStream a(77), b(77);
    const auto va = sample_virtual(grid, LinkParams{0.2, 1}, a);
    const auto vb = sample_virtual(grid, LinkParams{0.2, 1}, b);
    for (EdgeIndex e = 0; e < grid.edge_count(); ++e) REQUIRE(va.alive(e) == vb.alive(e));
  }
}

TEST_CASE("bsm routing closed forms") {
  SECTION("direct edge always delivers") {
    const auto t = chain_topology(1);
    const StrategyParams params{Strategy::kBsm, 0.2, {0.0, 1}};
    for (int i = 0; i < 200; ++i) {
      RngStream rng = derive_stream(3, 0, 0, i);
      REQUIRE(run_cycle(t, {0, 1}, params, rng).pairs_delivered == 1);
    }
  }
  SECTION("3-node chain with eta = 0.5 and q = 0.9") {
    const auto t = chain_topology(2, 50.0);
    const StrategyParams params{Strategy::kBsm, 0.9, {gamma_for(0.5, 50.0), 1}};
    REQUIRE_THAT(exact_rate_bruteforce(t, {0, 2}, params), WithinAbs(0.225, 1e-12));
    REQUIRE_THAT(mc_rate(t, {0, 2}, params, 100000, 8),
                 WithinAbs(0.225, 4.0 * std::sqrt(0.225 / 100000)));
  }
  SECTION("two edge-disjoint 2-hop paths, q = 0.5, expected pairs 1.0") {
    // u=0, v=1, relays 2 and 3; brute force enumerates the 4 swap outcomes
    PhysicalTopology t({{0, 0}, {100, 0}, {50, 40}, {50, 60}},
                       {{0, 2}, {1, 2}, {0, 3}, {1, 3}}, 100);
    const StrategyParams params{Strategy::kBsm, 0.5, {0.0, 1}};
    REQUIRE_THAT(exact_rate_bruteforce(t, {0, 1}, params), WithinAbs(1.0, 1e-12));
    const double mc = mc_rate(t, {0, 1}, params, 50000, 9);
    REQUIRE_THAT(mc, WithinAbs(1.0, 4.0 * std::sqrt(0.5 / 50000)));
  }
}

TEST_CASE("ghz routing closed forms") {
  SECTION("chains reduce to swap chains: q^(h-1)") {
    for (const Strategy s : {Strategy::kGhzUniform, Strategy::kGhzExp, Strategy::kGhz23}) {
      for (int h = 1; h <= 5; ++h) {
        const auto t = chain_topology(h);
        const StrategyParams params{s, 0.7, {0.0, 1}};
        REQUIRE_THAT(exact_rate_bruteforce(t, {0, static_cast<NodeId>(h)}, params),
                     WithinAbs(std::pow(0.7, h - 1), 1e-12));
      }
    }
  }
  SECTION("degree-2 helpers behave identically under uniform and exponential decay") {
    const auto t = chain_topology(3);
    const StrategyParams uni{Strategy::kGhzUniform, 0.61, {0.1, 1}};
    const StrategyParams expd{Strategy::kGhzExp, 0.61, {0.1, 1}};
    REQUIRE_THAT(exact_rate_bruteforce(t, {0, 3}, uni),
                 WithinAbs(exact_rate_bruteforce(t, {0, 3}, expd), 1e-12));
  }
  SECTION("2x2 grid, opposite corners: 1 - (1-q)^2") {
    const auto g = gen_square_grid({2, 100.0});
    const StrategyParams params{Strategy::kGhzUniform, 0.8, {0.0, 1}};
    REQUIRE_THAT(exact_rate_bruteforce(g, {0, 3}, params), WithinAbs(0.96, 1e-12));
    REQUIRE_THAT(mc_rate(g, {0, 3}, params, 100000, 10),
                 WithinAbs(0.96, 4.0 * std::sqrt(0.96 * 0.04 / 100000)));
  }
}

TEST_CASE("hybrid routing closed forms") {
  SECTION("series chain: q^h") {
    for (int h = 1; h <= 5; ++h) {
      const auto t = chain_topology(h);
      const StrategyParams params{Strategy::kHybrid, 0.85, {0.0, 1}};
      REQUIRE_THAT(exact_rate_bruteforce(t, {0, static_cast<NodeId>(h)}, params),
                   WithinAbs(std::pow(0.85, h), 1e-12));
    }
  }
  SECTION("perfect links and measurements always deliver when connected") {
    const auto g = gen_square_grid({3, 100.0});
    const StrategyParams params{Strategy::kHybrid, 1.0, {0.0, 1}};
    for (int i = 0; i < 100; ++i) {
      RngStream rng = derive_stream(11, 0, 0, i);
      REQUIRE(run_cycle(g, {0, 8}, params, rng).pairs_delivered == 1);
    }
  }
  SECTION("triangle with q = 0.5: direct or two-hop backup") {
    PhysicalTopology t({{0, 0}, {100, 0}, {50, 80}}, {{0, 1}, {0, 2}, {1, 2}}, 100);
    const StrategyParams params{Strategy::kHybrid, 0.5, {0.0, 1}};
    REQUIRE_THAT(exact_rate_bruteforce(t, {0, 1}, params), WithinAbs(0.625, 1e-12));
  }
  SECTION("2x2 grid vs an independent hand enumeration") {
    // eta = 0.9, q = 0.8: each edge lives with p = 0.72; two disjoint 2-hop
    // routes between opposite corners give 2 p^2 - p^4 = 0.76806144.
    const auto g = gen_square_grid({2, 100.0});
    const StrategyParams params{Strategy::kHybrid, 0.8, {gamma_for(0.9, 100.0), 1}};
    REQUIRE_THAT(exact_rate_bruteforce(g, {0, 3}, params), WithinAbs(0.76806144, 1e-10));
  }
}

TEST_CASE("bruteforce rejects oversized instances") {
  const auto g = gen_square_grid({4, 100.0});  // 24 edges + 14 helpers
  REQUIRE_THROWS_AS(exact_rate_bruteforce(g, {0, 15}, {Strategy::kBsm, 0.5, {0.2, 1}}),
                    std::invalid_argument);
}

TEST_CASE("monte carlo agrees with the bruteforce oracle on random instances") {
  RngStream inst_rng(31007);
  for (int trial = 0; trial < 4; ++trial) {
    const auto inst = random_instance(inst_rng);
    const double q = 0.3 + 0.6 * inst_rng.uniform01();
    const double gamma = 0.05 + 0.1 * inst_rng.uniform01();
    for (const Strategy s : kAllStrategies) {
      const StrategyParams params{s, q, {gamma, 1}};
      const double exact = exact_rate_bruteforce(inst.topo, inst.pair, params);
      const int cycles = 40000;
      const auto probs = edge_success_probs(inst.topo, params.link);
      double sum = 0.0, sum_sq = 0.0;
      for (int i = 0; i < cycles; ++i) {
        RngStream rng = derive_stream(1000 + trial, 0, 0, i);
        const double x = run_cycle(inst.topo, inst.pair, params, probs, rng).pairs_delivered;
        sum += x;
        sum_sq += x * x;
      }
      const double mean = sum / cycles;
      const double se =
          std::sqrt(std::max(0.0, (sum_sq - cycles * mean * mean) / (cycles - 1)) / cycles);
      REQUIRE_THAT(mean, WithinAbs(exact, 5.0 * se + 1e-9));
    }
  }
}

TEST_CASE("shared streams couple strategy and q orderings cycle by cycle") {
  RngStream inst_rng(555123);
  for (int trial = 0; trial < 6; ++trial) {
    const auto inst = random_instance(inst_rng);
    const LinkParams link{0.08, 1};
    const auto probs = edge_success_probs(inst.topo, link);
    for (int i = 0; i < 3000; ++i) {
      // raising q never flips a delivered cycle to undelivered
      for (const Strategy s : kAllStrategies) {
        RngStream lo = derive_stream(42, trial, 0, i);
        RngStream hi = derive_stream(42, trial, 0, i);
        const int out_lo =
            run_cycle(inst.topo, inst.pair, {s, 0.55, link}, probs, lo).pairs_delivered;
        const int out_hi =
            run_cycle(inst.topo, inst.pair, {s, 0.85, link}, probs, hi).pairs_delivered;
        REQUIRE(out_lo <= out_hi);
      }
      // survival-law ordering: exp <= (2,3) <= uniform on identical draws
      RngStream r1 = derive_stream(42, trial, 0, i);
      RngStream r2 = derive_stream(42, trial, 0, i);
      RngStream r3 = derive_stream(42, trial, 0, i);
      const int uni =
          run_cycle(inst.topo, inst.pair, {Strategy::kGhzUniform, 0.7, link}, probs, r1)
              .pairs_delivered;
      const int g23 =
          run_cycle(inst.topo, inst.pair, {Strategy::kGhz23, 0.7, link}, probs, r2)
              .pairs_delivered;
      const int expd =
          run_cycle(inst.topo, inst.pair, {Strategy::kGhzExp, 0.7, link}, probs, r3)
              .pairs_delivered;
      REQUIRE(expd <= g23);
      REQUIRE(g23 <= uni);
    }
  }
}

TEST_CASE("stronger links never hurt uniform-ghz or hybrid on shared draws") {
  // One uniform draw per edge and per helper keeps runs with different link
  // probabilities aligned. Uniform-success GHZ and hybrid are monotone under
  // that coupling; the exponential/(2,3) laws are not (an extra incident link
  // raises a helper's degree and lowers its survival), so they are excluded.
  RngStream inst_rng(77001);
  for (int trial = 0; trial < 6; ++trial) {
    const auto inst = random_instance(inst_rng);
    const LinkParams strong{0.03, 1};
    const LinkParams weak{0.12, 1};
    const auto probs_strong = edge_success_probs(inst.topo, strong);
    const auto probs_weak = edge_success_probs(inst.topo, weak);
    for (const Strategy s : {Strategy::kGhzUniform, Strategy::kHybrid}) {
      for (int i = 0; i < 3000; ++i) {
        RngStream ra = derive_stream(64, trial, 0, i);
        RngStream rb = derive_stream(64, trial, 0, i);
        const int out_weak =
            run_cycle(inst.topo, inst.pair, {s, 0.8, weak}, probs_weak, ra).pairs_delivered;
        const int out_strong =
            run_cycle(inst.topo, inst.pair, {s, 0.8, strong}, probs_strong, rb).pairs_delivered;
        REQUIRE(out_weak <= out_strong);
      }
    }
  }
}

TEST_CASE("outcome ranges per strategy") {
  RngStream inst_rng(90210);
  const auto inst = random_instance(inst_rng);
  for (const Strategy s : kAllStrategies) {
    for (int i = 0; i < 500; ++i) {
      RngStream rng = derive_stream(5, 0, 0, i);
      const int out = run_cycle(inst.topo, inst.pair, {s, 0.6, {0.05, 1}}, rng).pairs_delivered;
      REQUIRE(out >= 0);
      if (s != Strategy::kBsm) REQUIRE(out <= 1);
      else REQUIRE(static_cast<std::size_t>(out) <= inst.topo.edge_count());
    }
  }
}
