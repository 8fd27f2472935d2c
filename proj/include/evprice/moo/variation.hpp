#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "evprice/error.hpp"
#include "evprice/moo/problem.hpp"

namespace evprice::moo {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Simulated binary crossover (bounded form). Each variable is recombined with
// probability 1/2 once the pair is selected for crossover.
inline std::pair<std::vector<double>, std::vector<double>> sbx_crossover(
    std::span<const double> a, std::span<const double> b, std::span<const double> lower,
    std::span<const double> upper, const GaConfig& cfg, Rng& rng) {
  if (a.size() != b.size() || a.size() != lower.size() || a.size() != upper.size()) {
    throw InputError("sbx_crossover: genome length mismatch");
  }
  std::vector<double> c1(a.begin(), a.end());
  std::vector<double> c2(b.begin(), b.end());
  if (uniform01(rng) >= cfg.crossover_prob) return {c1, c2};

  const double eta = cfg.sbx_eta;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (uniform01(rng) > 0.5) continue;
    const double x1 = a[i];
    const double x2 = b[i];
    if (std::abs(x1 - x2) <= 1e-14) continue;
    const double y1 = std::min(x1, x2);
    const double y2 = std::max(x1, x2);
    const double lo = lower[i];
    const double hi = upper[i];
    const double u = uniform01(rng);

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    const double betaq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    double v1 = 0.5 * ((y1 + y2) - betaq1 * (y2 - y1));
    const double betaq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    double v2 = 0.5 * ((y1 + y2) + betaq2 * (y2 - y1));
    v1 = std::clamp(v1, lo, hi);
    v2 = std::clamp(v2, lo, hi);
    if (uniform01(rng) <= 0.5) std::swap(v1, v2);
    c1[i] = v1;
    c2[i] = v2;
  }
  return {std::move(c1), std::move(c2)};
}

// Polynomial mutation; zero-width boxes are left untouched.
inline std::vector<double> polynomial_mutation(std::span<const double> g,
                                               std::span<const double> lower,
                                               std::span<const double> upper,
                                               const GaConfig& cfg, Rng& rng) {
  std::vector<double> out(g.begin(), g.end());
  const double pm = cfg.mutation_prob_for(g.size());
  const double eta = cfg.mutation_eta;
  const double mut_pow = 1.0 / (eta + 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (uniform01(rng) >= pm) continue;
    const double lo = lower[i];
    const double hi = upper[i];
    if (!(hi > lo)) continue;
    const double y = out[i];
    const double d1 = (y - lo) / (hi - lo);
    const double d2 = (hi - y) / (hi - lo);
    const double u = uniform01(rng);
    double deltaq = 0.0;
    if (u < 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      deltaq = std::pow(val, mut_pow) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      deltaq = 1.0 - std::pow(val, mut_pow);
    }
    out[i] = std::clamp(y + deltaq * (hi - lo), lo, hi);
  }
  return out;
}

}  // namespace evprice::moo
