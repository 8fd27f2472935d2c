#pragma once

#include <algorithm>
#include <cmath>

#include "evprice/scenario.hpp"

namespace evprice {

// Floor for ratio denominators so empty slots stay finite.
inline constexpr double kDemandEpsilon = 1e-6;

// Requested demand at the posted prices: the station's base profile scaled by
// the model's response relative to p_ref. The log-normal correction factor
// cancels in the ratio, leaving (p / p_ref)^c.
inline Matrix demand_matrix(const Scenario& s, const PriceSchedule& p) {
  const std::size_t n = s.n_stations();
  const std::size_t t_count = s.n_slots();
  Matrix d(n, t_count);
  const double log_ref = std::log(s.p_ref);
  for (std::size_t cs = 0; cs < n; ++cs) {
    const double c = s.models[cs].c_mean;
    for (std::size_t t = 0; t < t_count; ++t) {
      const double base = s.base_profile(cs, t);
      d(cs, t) = c == 0.0 ? base : base * std::exp(c * (std::log(p(cs, t)) - log_ref));
    }
  }
  return d;
}

inline Matrix delivered(const Scenario& s, const Matrix& demand) {
  Matrix out(demand.rows(), demand.cols());
  for (std::size_t cs = 0; cs < demand.rows(); ++cs) {
    for (std::size_t t = 0; t < demand.cols(); ++t) {
      out(cs, t) = std::min(demand(cs, t), s.capacity(cs, t));
    }
  }
  return out;
}

namespace detail {

inline double revenue_of(const Scenario& s, const PriceSchedule& p, const Matrix& demand) {
  double total = 0.0;
  for (std::size_t cs = 0; cs < demand.rows(); ++cs) {
    for (std::size_t t = 0; t < demand.cols(); ++t) {
      const double billed = s.revenue_mode == RevenueMode::kCapped
                                ? std::min(demand(cs, t), s.capacity(cs, t))
                                : demand(cs, t);
      total += p(cs, t) * billed;
    }
  }
  return total;
}

inline double par_of(const Matrix& demand) {
  if (demand.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t cs = 0; cs < demand.rows(); ++cs) {
    const auto row = demand.row(cs);
    const double peak = *std::max_element(row.begin(), row.end());
    for (double d : row) total += peak / std::max(d, kDemandEpsilon);
  }
  return total / static_cast<double>(demand.size());
}

inline double qos_of(const Scenario& s, const Matrix& demand) {
  if (demand.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t cs = 0; cs < demand.rows(); ++cs) {
    for (std::size_t t = 0; t < demand.cols(); ++t) {
      const double req = demand(cs, t);
      total += req <= kDemandEpsilon ? 1.0 : std::min(req, s.capacity(cs, t)) / req;
    }
  }
  return total / static_cast<double>(demand.size());
}

}  // namespace detail

inline double f_revenue(const Scenario& s, const PriceSchedule& p) {
  return detail::revenue_of(s, p, demand_matrix(s, p));
}

inline double f_par(const Scenario& s, const PriceSchedule& p) {
  return detail::par_of(demand_matrix(s, p));
}

inline double f_qos(const Scenario& s, const PriceSchedule& p) {
  return detail::qos_of(s, demand_matrix(s, p));
}

// All three objectives from a single demand-matrix evaluation.
inline ObjectiveTriple evaluate(const Scenario& s, const PriceSchedule& p) {
  const Matrix d = demand_matrix(s, p);
  return {detail::revenue_of(s, p, d), detail::qos_of(s, d), detail::par_of(d)};
}

}  // namespace evprice
