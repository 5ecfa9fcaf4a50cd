#pragma once

#include <cmath>
#include <stdexcept>

namespace entroute {

// Elementary-link generation parameters: fiber loss coefficient and the
// number of transmission attempts per cycle (global for all links).
struct LinkParams {
  double gamma_per_km = 0.2;
  int attempts = 1;

  void validate() const {
    if (gamma_per_km < 0.0) throw std::invalid_argument("LinkParams: gamma must be >= 0");
    if (attempts < 1) throw std::invalid_argument("LinkParams: attempts must be >= 1");
  }
};

// Fiber transmission probability 10^(-gamma*d/10).
inline double transmission(double distance_km, double gamma_per_km) {
  if (distance_km < 0.0) throw std::invalid_argument("transmission: negative distance");
  if (gamma_per_km < 0.0) throw std::invalid_argument("transmission: negative gamma");
  return std::pow(10.0, -gamma_per_km * distance_km / 10.0);
}

// Probability that at least one of m attempts survives the fiber:
// 1 - (1 - eta)^m.
inline double link_success(double distance_km, const LinkParams& params) {
  params.validate();
  const double eta = transmission(distance_km, params.gamma_per_km);
  if (params.attempts == 1) return eta;
  return 1.0 - std::pow(1.0 - eta, params.attempts);
}

}  // namespace entroute
