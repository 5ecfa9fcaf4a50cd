#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "entroute/generators.hpp"
#include "entroute/rng.hpp"

using namespace entroute;
using Catch::Matchers::WithinAbs;

TEST_CASE("square grid node and edge counts") {
  const auto g2 = gen_square_grid({2, 100.0});
  REQUIRE(g2.node_count() == 4);
  REQUIRE(g2.edge_count() == 4);
  for (EdgeIndex e = 0; e < g2.edge_count(); ++e) REQUIRE(g2.edge_length_km(e) == 100.0);

  const auto g4 = gen_square_grid({4, 100.0});
  REQUIRE(g4.node_count() == 16);
  REQUIRE(g4.edge_count() == 24);
  for (EdgeIndex e = 0; e < g4.edge_count(); ++e)
    REQUIRE_THAT(g4.edge_length_km(e), WithinAbs(100.0 / 3.0, 1e-12));

  const auto g15 = gen_square_grid({15, 100.0});
  REQUIRE(g15.node_count() == 225);
  REQUIRE(g15.edge_count() == 420);

  REQUIRE_THROWS_AS(gen_square_grid({1, 100.0}), std::invalid_argument);
}

TEST_CASE("waxman generator degenerate parameters") {
  SECTION("vanishing distances make every pair all but certain") {
    // alpha chosen so alpha*L stays 226 km while the region shrinks: every
    // distance is then negligible against both decay scales.
    RngStream rng(3);
    const double region = 1e-9;
    const double alpha = 226.0 / (std::sqrt(2.0) * region);
    const auto t = gen_waxman({12, region, alpha, 1.0}, rng);
    REQUIRE(t.edge_count() == 12 * 11 / 2);
  }
  SECTION("beta = 0 is always edgeless") {
    RngStream rng(4);
    const auto t = gen_waxman({20, 100.0, 1.598, 0.0}, rng);
    REQUIRE(t.edge_count() == 0);
  }
}

TEST_CASE("generators are deterministic in (spec, seed)") {
  RngStream a(42), b(42), c(43);
  const auto ta = gen_waxman({25, 100.0, 1.598, 1.0}, a);
  const auto tb = gen_waxman({25, 100.0, 1.598, 1.0}, b);
  const auto tc = gen_waxman({25, 100.0, 1.598, 1.0}, c);
  REQUIRE(ta == tb);
  REQUIRE_FALSE(ta == tc);

  RngStream d(42), e(42);
  REQUIRE(gen_scale_free({30, 100.0, 5, 6, 1.0, 1.0}, d) ==
          gen_scale_free({30, 100.0, 5, 6, 1.0, 1.0}, e));
}

TEST_CASE("waxman mean edge count matches the pairwise-probability oracle") {
  // Oracle: E[#edges] = C(30,2) * E[exp(-d/226)] with the expectation taken
  // by Monte Carlo over uniform point pairs on the square.
  RngStream orng(5);
  double sum = 0.0, sum_sq = 0.0;
  const int oracle_n = 400000;
  for (int i = 0; i < oracle_n; ++i) {
    const double dx = (orng.uniform01() - orng.uniform01()) * 100.0;
    const double dy = (orng.uniform01() - orng.uniform01()) * 100.0;
    const double p = std::exp(-std::hypot(dx, dy) / 226.0);
    sum += p;
    sum_sq += p * p;
  }
  const double mean_p = sum / oracle_n;
  const double var_p = (sum_sq - oracle_n * mean_p * mean_p) / (oracle_n - 1);
  const double expected_edges = 435.0 * mean_p;

  const int seeds = 600;
  double mean_edges = 0.0, edges_sq = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    RngStream rng(derive_key(6, StreamDomain::kTopology, seed, 0, 0));
    const double e = static_cast<double>(gen_waxman({30, 100.0, 1.598, 1.0}, rng).edge_count());
    mean_edges += e;
    edges_sq += e * e;
  }
  mean_edges /= seeds;
  const double var_edges = (edges_sq - seeds * mean_edges * mean_edges) / (seeds - 1);

  const double se = std::sqrt(var_edges / seeds + 435.0 * 435.0 * var_p / oracle_n);
  REQUIRE_THAT(mean_edges, WithinAbs(expected_edges, 4.0 * se));
}

TEST_CASE("scale-free seed clique and edge counts") {
  RngStream rng(9);
  const auto seed_only = gen_scale_free({6, 100.0, 5, 6, 1.0, 1.0}, rng);
  REQUIRE(seed_only.node_count() == 6);
  REQUIRE(seed_only.edge_count() == 15);  // complete graph, no growth steps

  RngStream rng2(9);
  const auto t = gen_scale_free({30, 100.0, 5, 6, 1.0, 1.0}, rng2);
  REQUIRE(t.edge_count() == 15 + 5 * 24);

  // every new node takes m distinct targets
  RngStream rng3(11);
  const auto t3 = gen_scale_free({40, 100.0, 3, 4, 1.0, 1.0}, rng3);
  REQUIRE(t3.edge_count() == 6 + 3 * 36);

  REQUIRE_THROWS_AS(gen_scale_free({5, 100.0, 5, 6, 1.0, 1.0}, rng3), std::invalid_argument);
}

TEST_CASE("zero exponents degrade attachment to uniform") {
  // With mu = nu = 0 every existing node has equal weight: over many seeds the
  // seed-clique nodes of a single-step growth receive near-equal attachment.
  std::map<NodeId, int> hits;
  const int trials = 8000;
  for (int s = 0; s < trials; ++s) {
    RngStream rng(derive_key(13, StreamDomain::kTopology, s, 0, 0));
    const auto t = gen_scale_free({5, 100.0, 1, 4, 0.0, 0.0}, rng);
    for (const auto& e : t.edges())
      if (e.b == 4) ++hits[e.a];
  }
  for (NodeId j = 0; j < 4; ++j) {
    const double expected = trials / 4.0;
    REQUIRE_THAT(static_cast<double>(hits[j]),
                 WithinAbs(expected, 5.0 * std::sqrt(expected * 0.75)));
  }
}
