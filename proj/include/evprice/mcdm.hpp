#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "evprice/error.hpp"
#include "evprice/pricing.hpp"

namespace evprice {

// Pseudo-weights over a front in minimization space. For objective i a
// member's weight is its normalized distance from the front's worst value,
// renormalized over all objectives. Objectives with zero range contribute 0;
// a member with no positive term (a single-member front, or the all-worst
// corner) gets uniform weights.
inline std::vector<std::vector<double>> pseudo_weights(std::span<const moo::Objectives> front) {
  std::vector<std::vector<double>> out;
  if (front.empty()) return out;
  const std::size_t m = front.front().size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& f : front) {
    for (std::size_t j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], f[j]);
      hi[j] = std::max(hi[j], f[j]);
    }
  }
  out.reserve(front.size());
  for (const auto& f : front) {
    std::vector<double> w(m, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double range = hi[j] - lo[j];
      w[j] = range > 0.0 ? (hi[j] - f[j]) / range : 0.0;
      sum += w[j];
    }
    if (sum > 0.0) {
      for (double& x : w) x /= sum;
    } else {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m));
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline std::vector<std::array<double, 3>> pseudo_weights(const ParetoSet& front) {
  const auto objs = front.minimization_objectives();
  const auto w = pseudo_weights(std::span<const moo::Objectives>(objs));
  std::vector<std::array<double, 3>> out;
  out.reserve(w.size());
  for (const auto& v : w) out.push_back({v[0], v[1], v[2]});
  return out;
}

inline void compute_pseudo_weights(ParetoSet& front) { front.pseudo_weights = pseudo_weights(front); }

// Relative importance of (revenue, qos, par); normalized to sum 1.
class ImportanceVector {
 public:
  ImportanceVector() : w_{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0} {}
  ImportanceVector(double revenue, double qos, double par) : w_{revenue, qos, par} {
    double sum = 0.0;
    for (double x : w_) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw InputError("importance weights must be finite and >= 0");
      }
      sum += x;
    }
    if (!(sum > 0.0)) throw InputError("importance needs at least one positive weight");
    for (double& x : w_) x /= sum;
  }

  static ImportanceVector balanced() { return {}; }

  const std::array<double, 3>& weights() const noexcept { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

  friend bool operator==(const ImportanceVector&, const ImportanceVector&) = default;

 private:
  std::array<double, 3> w_;
};

// Index of the member whose pseudo-weight vector is nearest (Euclidean) to the
// importance vector. Ties go to the lower first objective (higher revenue in
// pricing fronts), then to the lower index.
inline std::size_t select(std::span<const moo::Objectives> front,
                          std::span<const double> importance) {
  if (front.empty()) throw InputError("cannot select from an empty front");
  const auto w = pseudo_weights(front);
  constexpr double tie = 1e-12;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < importance.size(); ++j) {
      const double diff = w[i][j] - importance[j];
      d2 += diff * diff;
    }
    const double d = std::sqrt(d2);
    if (d < best_d - tie) {
      best = i;
      best_d = d;
    } else if (d <= best_d + tie && front[i][0] < front[best][0]) {
      best = i;
      best_d = std::min(best_d, d);
    }
  }
  return best;
}

inline std::size_t select(const ParetoSet& front, const ImportanceVector& importance) {
  const auto objs = front.minimization_objectives();
  return select(std::span<const moo::Objectives>(objs), importance.weights());
}

enum class Direction { kMaximize, kMinimize };

// Percentage improvement of `now` over `before`.
inline double improvement_pct(double now, double before, Direction dir) {
  if (before == 0.0) throw InputError("improvement_pct: baseline value is 0");
  return dir == Direction::kMaximize ? 100.0 * (now - before) / before
                                     : 100.0 * (before - now) / before;
}

}  // namespace evprice
