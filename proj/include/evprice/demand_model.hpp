#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "evprice/error.hpp"
#include "evprice/observation.hpp"

namespace evprice {

// Posterior of the constant-elasticity model log D = log a + c log P + e,
// e ~ N(0, noise_variance), for one station.
struct DemandModelPosterior {
  std::string station_id;
  double log_a_mean = 0.0;
  double c_mean = 0.0;
  // Over (log a, c).
  std::array<std::array<double, 2>, 2> covariance{};
  double noise_variance = 0.0;
  std::size_t n_obs = 0;
  // True when the station had too little data and carries the all-station fit.
  bool pooled = false;

  friend bool operator==(const DemandModelPosterior&, const DemandModelPosterior&) = default;
};

using ModelMap = std::map<std::string, DemandModelPosterior>;

struct FitConfig {
  double prior_log_a = 0.0;
  double prior_c = -1.0;
  double prior_precision = 0.01;  // lambda, isotropic
  std::size_t min_obs_per_station = 20;

  void validate() const {
    if (!(prior_precision >= 0.0) || !std::isfinite(prior_precision)) {
      throw InputError("prior precision must be finite and >= 0");
    }
  }
};

namespace detail {

// Conjugate Gaussian regression of log demand on log price.
//
// With prior beta ~ N(m0, sigma^2 / lambda I) the posterior mean is
//   (X'X + lambda I)^-1 (X'y + lambda m0)
// and the posterior covariance sigma^2 (X'X + lambda I)^-1, where sigma^2 is
// replaced by the residual variance of the posterior-mean line.
inline DemandModelPosterior fit_station(const std::string& id,
                                        std::span<const DemandObservation* const> obs,
                                        const FitConfig& cfg) {
  const std::size_t n = obs.size();
  if (n < 2) {
    throw FitError(id, "station '" + id + "' has " + std::to_string(n) +
                           " observation(s); at least 2 are required");
  }

  std::set<double> prices;
  double s_x = 0, s_xx = 0, s_y = 0, s_xy = 0;
  for (const auto* o : obs) {
    const double x = std::log(o->price);
    const double y = std::log(o->demand);
    s_x += x;
    s_xx += x * x;
    s_y += y;
    s_xy += x * y;
    prices.insert(o->price);
  }

  const double lambda = cfg.prior_precision;
  if (lambda == 0.0 && prices.size() < 2) {
    throw FitError(id, "station '" + id +
                           "': all observations share one price and prior precision is 0 "
                           "(singular design matrix)");
  }

  const double a00 = static_cast<double>(n) + lambda;
  const double a01 = s_x;
  const double a11 = s_xx + lambda;
  const double det = a00 * a11 - a01 * a01;
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw FitError(id, "station '" + id + "': singular design matrix");
  }
  const double i00 = a11 / det;
  const double i01 = -a01 / det;
  const double i11 = a00 / det;

  const double r0 = s_y + lambda * cfg.prior_log_a;
  const double r1 = s_xy + lambda * cfg.prior_c;

  DemandModelPosterior post;
  post.station_id = id;
  post.log_a_mean = i00 * r0 + i01 * r1;
  post.c_mean = i01 * r0 + i11 * r1;
  post.n_obs = n;

  double rss = 0.0;
  for (const auto* o : obs) {
    const double r = std::log(o->demand) - post.log_a_mean - post.c_mean * std::log(o->price);
    rss += r * r;
  }
  const double dof = n > 2 ? static_cast<double>(n - 2) : 1.0;
  post.noise_variance = rss / dof;
  post.covariance = {{{post.noise_variance * i00, post.noise_variance * i01},
                      {post.noise_variance * i01, post.noise_variance * i11}}};
  return post;
}

}  // namespace detail

// Fits one posterior per station present in `observations`. Stations with
// fewer than cfg.min_obs_per_station samples receive the pooled posterior.
inline ModelMap fit(std::span<const DemandObservation> observations, const FitConfig& cfg = {}) {
  cfg.validate();
  if (observations.empty()) throw InputError("no observations to fit");

  std::map<std::string, std::vector<const DemandObservation*>> by_station;
  std::vector<const DemandObservation*> all;
  all.reserve(observations.size());
  for (const auto& o : observations) {
    if (!(o.price > 0.0) || !(o.demand > 0.0) || !std::isfinite(o.price) ||
        !std::isfinite(o.demand)) {
      throw InputError("observation for station '" + o.station_id +
                       "' has non-positive price or demand");
    }
    by_station[o.station_id].push_back(&o);
    all.push_back(&o);
  }

  bool any_fittable = false;
  for (const auto& [id, obs] : by_station) any_fittable |= obs.size() >= 2;
  if (!any_fittable) {
    throw InputError("every station has fewer than 2 observations; nothing to fit");
  }

  ModelMap out;
  std::optional<DemandModelPosterior> pooled;
  for (const auto& [id, obs] : by_station) {
    if (obs.size() >= cfg.min_obs_per_station) {
      out.emplace(id, detail::fit_station(id, obs, cfg));
      continue;
    }
    if (!pooled) pooled = detail::fit_station("(pooled)", all, cfg);
    DemandModelPosterior p = *pooled;
    p.station_id = id;
    p.pooled = true;
    out.emplace(id, std::move(p));
  }
  return out;
}

// Posterior-mean predictive expectation of demand at `price`, including the
// log-normal correction exp(sigma^2 / 2).
inline double predict_demand(const DemandModelPosterior& m, double price) {
  if (!(price > 0.0)) {
    throw std::domain_error("predict_demand: price must be > 0");
  }
  return std::exp(m.log_a_mean + m.c_mean * std::log(price) + 0.5 * m.noise_variance);
}

inline double elasticity(const DemandModelPosterior& m) noexcept { return m.c_mean; }

}  // namespace evprice
