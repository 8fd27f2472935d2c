#pragma once

#include <cmath>
#include <random>

#include "evprice/ingest.hpp"

namespace evprice {

// The bundled elastic scenario: 4 stations on a 96-slot day, elasticity -1.2,
// traffic peaks around slots 34 and 72, capacity at 75% of each station's
// peak demand so it binds at the reference price. History prices are
// log-uniform in [0.10, 0.80] $/kWh so the fit sees real price variation.
inline SynthOptions elastic_demo_options() {
  SynthOptions o;
  o.n_stations = 4;
  o.grid = SlotGrid{};
  o.truth = {{8.0, -1.2, 0.1}, {10.0, -1.2, 0.1}, {12.0, -1.2, 0.1}, {9.0, -1.2, 0.1}};
  o.seed = 42;
  o.p_min = 0.05;
  o.p_max = 1.0;
  o.p_ref = 0.30;
  o.capacity_factor = 0.75;

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_price(std::log(0.10), std::log(0.80));
  Matrix history(o.n_stations, o.grid.size());
  for (double& p : history.flat()) p = std::exp(log_price(rng));
  o.price_history = PriceSchedule(std::move(history));

  for (std::size_t t = 0; t < o.grid.size(); ++t) {
    const double x = static_cast<double>(t);
    auto bump = [x](double center, double width) {
      return std::exp(-0.5 * (x - center) * (x - center) / (width * width));
    };
    o.traffic_shape.push_back(0.05 + 1.0 * bump(34.0, 3.5) + 0.85 * bump(72.0, 4.0));
  }
  return o;
}

}  // namespace evprice
