#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "evprice/demand_model.hpp"
#include "evprice/error.hpp"
#include "evprice/grid.hpp"
#include "evprice/matrix.hpp"

namespace evprice {

// How revenue bills energy: capacity-capped delivery, or the raw model demand.
enum class RevenueMode { kCapped, kLiteral };

// Full optimization instance. Row i of every matrix and models[i] belong to
// station_ids[i].
struct Scenario {
  std::vector<std::string> station_ids;
  SlotGrid grid;
  double p_min = 0.01;
  double p_max = 1.0;
  double p_ref = 0.3;
  Matrix capacity;      // kWh per slot
  Matrix base_profile;  // kWh per slot at p_ref
  std::vector<DemandModelPosterior> models;
  RevenueMode revenue_mode = RevenueMode::kCapped;

  std::size_t n_stations() const noexcept { return station_ids.size(); }
  std::size_t n_slots() const noexcept { return grid.size(); }

  void validate() const {
    grid.validate();
    if (station_ids.empty()) throw InputError("scenario has no stations");
    if (!(p_min > 0.0 && p_min < p_max) || !std::isfinite(p_max)) {
      throw InputError("scenario price bounds must satisfy 0 < p_min < p_max");
    }
    if (!(p_ref > 0.0)) throw InputError("scenario p_ref must be > 0");
    const std::size_t n = n_stations();
    const std::size_t t = n_slots();
    if (capacity.rows() != n || capacity.cols() != t) {
      throw InputError("capacity matrix must be " + std::to_string(n) + " x " +
                       std::to_string(t));
    }
    if (base_profile.rows() != n || base_profile.cols() != t) {
      throw InputError("base_profile matrix must be " + std::to_string(n) + " x " +
                       std::to_string(t));
    }
    for (double v : capacity.flat()) {
      if (!(v >= 0.0)) throw InputError("capacity entries must be >= 0");
    }
    for (double v : base_profile.flat()) {
      if (!(v >= 0.0)) throw InputError("base_profile entries must be >= 0");
    }
    if (models.size() != n) throw InputError("scenario needs one demand model per station");
  }
};

// The decision variable: one price per (station, slot).
class PriceSchedule {
 public:
  PriceSchedule() = default;
  explicit PriceSchedule(Matrix prices) : prices_(std::move(prices)) {}
  PriceSchedule(std::size_t n_stations, std::size_t n_slots, double fill)
      : prices_(n_stations, n_slots, fill) {}

  const Matrix& prices() const noexcept { return prices_; }
  Matrix& prices() noexcept { return prices_; }
  double operator()(std::size_t cs, std::size_t t) const { return prices_(cs, t); }
  double& operator()(std::size_t cs, std::size_t t) { return prices_(cs, t); }
  std::size_t n_stations() const noexcept { return prices_.rows(); }
  std::size_t n_slots() const noexcept { return prices_.cols(); }

  static PriceSchedule from_genome(std::span<const double> genome, std::size_t n_stations,
                                   std::size_t n_slots) {
    if (genome.size() != n_stations * n_slots) {
      throw InputError("genome length " + std::to_string(genome.size()) + " does not match " +
                       std::to_string(n_stations) + " x " + std::to_string(n_slots));
    }
    Matrix m(n_stations, n_slots);
    std::copy(genome.begin(), genome.end(), m.flat().begin());
    return PriceSchedule(std::move(m));
  }

  friend bool operator==(const PriceSchedule&, const PriceSchedule&) = default;

 private:
  Matrix prices_;
};

inline void check_bounds(const Scenario& s, const PriceSchedule& p) {
  if (p.n_stations() != s.n_stations() || p.n_slots() != s.n_slots()) {
    throw InputError("price schedule shape does not match scenario");
  }
  for (double v : p.prices().flat()) {
    if (!(v >= s.p_min && v <= s.p_max)) {
      throw InputError("price " + std::to_string(v) + " outside [" + std::to_string(s.p_min) +
                       ", " + std::to_string(s.p_max) + "]");
    }
  }
}

// Objective values in their natural orientation: revenue and qos are
// maximized, par is minimized.
struct ObjectiveTriple {
  double revenue = 0.0;
  double qos = 0.0;
  double par = 0.0;

  // (-revenue, -qos, par): every component is minimized.
  std::array<double, 3> minimization() const noexcept { return {-revenue, -qos, par}; }

  static ObjectiveTriple from_minimization(std::span<const double> f) {
    return {-f[0], -f[1], f[2]};
  }

  friend bool operator==(const ObjectiveTriple&, const ObjectiveTriple&) = default;
};

}  // namespace evprice
