#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "entroute/graph.hpp"
#include "entroute/link_model.hpp"
#include "entroute/rng.hpp"

namespace entroute {

struct WaxmanAnalyticParams {
  double region_km = 100.0;
  double alpha = 1.598;
  double beta = 1.0;
  LinkParams link;   // gamma and attempt count
  int nodes = 100;   // N

  double characteristic_length_km() const { return alpha * std::sqrt(2.0) * region_km; }

  void validate() const {
    if (!(region_km > 0.0)) throw std::invalid_argument("analytics: region must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("analytics: alpha must be positive");
    if (!(beta >= 0.0) || beta > 1.0)
      throw std::invalid_argument("analytics: beta must be in [0,1]");
    link.validate();
  }
};

// Probability that a Waxman link both exists and survives transmission:
// beta * exp(-d / alphaL) * [1 - (1 - 10^(-gamma d / 10))^m].
inline double waxman_edge_prob(Position x1, Position x2, const WaxmanAnalyticParams& params) {
  const double d = std::hypot(x1.x_km - x2.x_km, x1.y_km - x2.y_km);
  return params.beta * std::exp(-d / params.characteristic_length_km()) *
         link_success(d, params.link);
}

struct MeanEdgeProb {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// E = E_{x1,x2}[p(x1,x2)] over i.i.d. uniform points on the square.
inline MeanEdgeProb mean_edge_prob(const WaxmanAnalyticParams& params, std::int64_t n_mc,
                                   RngStream& rng) {
  params.validate();
  if (n_mc < 1) throw std::invalid_argument("mean_edge_prob: need n_mc >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n_mc; ++i) {
    const Position a{rng.uniform01() * params.region_km, rng.uniform01() * params.region_km};
    const Position b{rng.uniform01() * params.region_km, rng.uniform01() * params.region_km};
    const double p = waxman_edge_prob(a, b, params);
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / n_mc;
  double se = 0.0;
  if (n_mc > 1) {
    const double var = std::max(0.0, (sum_sq - n_mc * mean * mean) / (n_mc - 1));
    se = std::sqrt(var / n_mc);
  }
  return {mean, se, n_mc};
}

struct PathCountResult {
  double edge_prob = 0.0;   // E
  double series = 0.0;      // expected path count (sum form); +inf if unrepresentable
  double log_series = 0.0;
  double asymptotic = 0.0;  // (N-2)! E^(N-1) e^(1/E); +inf if unrepresentable
  double log_asymptotic = 0.0;
  std::optional<double> lower;  // undefined when E*N <= 1
  double upper = 0.0;
  // asymptotic - series, evaluated by its own convergent tail sum. The direct
  // subtraction loses all precision once the series dwarfs the O(1/N) gap;
  // this field stays exact, so ordering checks against the bound corrections
  // remain meaningful at any magnitude.
  double tail_gap = 0.0;
};

// Expected number of paths between two random nodes,
//   sum_{j=1}^{N-1} (N-2)!/(N-j-1)! E^j,
// evaluated by the term recurrence t_{j+1} = t_j (N-1-j) E, with the dominant
// product tracked in log space so large N stays finite.
inline PathCountResult expected_paths(int n_nodes, double edge_prob) {
  if (n_nodes < 2) throw std::invalid_argument("expected_paths: need N >= 2");
  if (!(edge_prob > 0.0) || edge_prob > 1.0)
    throw std::invalid_argument("expected_paths: E must be in (0,1]");
  const double n = n_nodes;
  const double e = edge_prob;

  double term = e;           // t_1
  double sum = e;            // running linear sum (may overflow to +inf)
  double log_term = std::log(e);
  double log_sum = log_term;  // log-sum-exp accumulation
  for (int j = 1; j <= n_nodes - 2; ++j) {
    const double factor = (n - 1.0 - j) * e;
    term *= factor;
    sum += term;
    log_term += std::log(factor);
    const double hi = std::max(log_sum, log_term);
    log_sum = hi + std::log1p(std::exp(std::min(log_sum, log_term) - hi));
  }

  const double log_dom = std::lgamma(n - 1.0) + (n - 1.0) * std::log(e) + 1.0 / e;
  const double dom = std::exp(log_dom);

  // asymptotic - series = sum_{i >= N-1} (N-2)! E^(N-1-i) / i!, with
  // t_0 = 1/(N-1) and t_{k+1} = t_k / (E (N+k)).
  double gap = 0.0;
  {
    double t = 1.0 / (n - 1.0);
    for (int k = 0; k < 100000 && t > gap * 1e-18 && std::isfinite(t); ++k) {
      gap += t;
      t /= e * (n + k);
    }
  }

  PathCountResult out;
  out.edge_prob = e;
  out.series = std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
  out.log_series = log_sum;
  out.asymptotic = dom;
  out.log_asymptotic = log_dom;
  const double en = e * n;
  out.upper = dom - (en + 1.0) / (en * (n - 1.0));
  if (en > 1.0) out.lower = dom - en / ((en - 1.0) * (n - 1.0));
  out.tail_gap = gap;
  return out;
}

// Leading-order connectivity threshold E* = (1/N)(1 + sqrt((2/N) ln(N/2pi))).
// The paper's O(1/N^sigma) correction carries an undetermined sigma and is
// dropped; for N below 2*pi the log is clamped at zero.
inline double connectivity_threshold(int n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("connectivity_threshold: need N >= 3");
  const double n = n_nodes;
  const double log_term = std::max(0.0, std::log(n / (2.0 * 3.14159265358979323846)));
  return (1.0 + std::sqrt(2.0 / n * log_term)) / n;
}

struct CorrelationEstimate {
  std::optional<double> rho;  // undefined in degenerate (zero-variance) setups
  double std_error = 0.0;     // by batch means
  std::int64_t n_samples = 0;
};

// Pearson correlation of p(x1,x2) and p(x2,x3) over i.i.d. uniform triples;
// measures how far adjacent-hop edge probabilities are from independence.
inline CorrelationEstimate path_prob_correlation(const WaxmanAnalyticParams& params,
                                                 std::int64_t n_mc, RngStream& rng) {
  params.validate();
  if (n_mc < 1000) throw std::invalid_argument("path_prob_correlation: need n_mc >= 1000");

  const int n_batches = 30;
  const std::int64_t per_batch = n_mc / n_batches;
  const std::int64_t used = per_batch * n_batches;

  // Global sufficient statistics plus per-batch correlations.
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  double batch_rhos[n_batches];
  int batch_count = 0;
  double ba = 0, bb = 0, baa = 0, bbb = 0, bab = 0;
  std::int64_t in_batch = 0;

  for (std::int64_t i = 0; i < used; ++i) {
    const Position x1{rng.uniform01() * params.region_km, rng.uniform01() * params.region_km};
    const Position x2{rng.uniform01() * params.region_km, rng.uniform01() * params.region_km};
    const Position x3{rng.uniform01() * params.region_km, rng.uniform01() * params.region_km};
    const double a = waxman_edge_prob(x1, x2, params);
    const double b = waxman_edge_prob(x2, x3, params);
    sa += a; sb += b; saa += a * a; sbb += b * b; sab += a * b;
    ba += a; bb += b; baa += a * a; bbb += b * b; bab += a * b;
    if (++in_batch == per_batch) {
      const double ca = baa - ba * ba / per_batch;
      const double cb = bbb - bb * bb / per_batch;
      const double cab = bab - ba * bb / per_batch;
      if (ca > 0.0 && cb > 0.0 && batch_count < n_batches)
        batch_rhos[batch_count++] = cab / std::sqrt(ca * cb);
      ba = bb = baa = bbb = bab = 0.0;
      in_batch = 0;
    }
  }

  const double ca = saa - sa * sa / used;
  const double cb = sbb - sb * sb / used;
  CorrelationEstimate out;
  out.n_samples = used;
  const double scale = 1e-12 * (saa + sbb + 1.0);
  if (!(ca > scale) || !(cb > scale)) return out;  // degenerate: constants
  out.rho = (sab - sa * sb / used) / std::sqrt(ca * cb);
  if (batch_count > 1) {
    double m = 0.0;
    for (int i = 0; i < batch_count; ++i) m += batch_rhos[i];
    m /= batch_count;
    double var = 0.0;
    for (int i = 0; i < batch_count; ++i) var += (batch_rhos[i] - m) * (batch_rhos[i] - m);
    var /= (batch_count - 1);
    out.std_error = std::sqrt(var / batch_count);
  }
  return out;
}

// Crude average shortest-path-length estimate <l> = ln n / ln <k>.
inline double avg_path_length_heuristic(double n_nodes, double mean_degree) {
  if (!(n_nodes >= 1.0)) throw std::invalid_argument("avg_path_length_heuristic: need n >= 1");
  if (!(mean_degree > 1.0))
    throw std::invalid_argument("avg_path_length_heuristic: need mean degree > 1");
  return std::log(n_nodes) / std::log(mean_degree);
}

}  // namespace entroute
