#pragma once

#include <cmath>
#include <set>
#include <string>

#include "evprice/error.hpp"
#include "evprice/scenario.hpp"

namespace evprice {

// Time-of-use tariff keyed to traffic state.
struct TouSchedule {
  std::set<std::size_t> peak_slots;
  std::set<std::size_t> offpeak_slots;
  double peak_price = 0.50;
  double normal_price = 0.30;
  double offpeak_price = 0.15;

  enum class State { kOffpeak, kNormal, kPeak };

  State state(std::size_t slot) const {
    if (peak_slots.contains(slot)) return State::kPeak;
    if (offpeak_slots.contains(slot)) return State::kOffpeak;
    return State::kNormal;
  }

  double price(std::size_t slot) const {
    switch (state(slot)) {
      case State::kPeak: return peak_price;
      case State::kOffpeak: return offpeak_price;
      case State::kNormal: break;
    }
    return normal_price;
  }

  // Peaks within 4 slots of 34 and 72, off-peak 0..24, on a 96-slot day.
  // Other grids scale the slot indices proportionally.
  static TouSchedule defaults(const SlotGrid& grid = {}) {
    TouSchedule s;
    const double scale = static_cast<double>(grid.slots_per_day) / 96.0;
    const auto at = [&](double slot96) {
      return static_cast<long>(std::lround(slot96 * scale));
    };
    const long last = grid.slots_per_day - 1;
    for (double center : {34.0, 72.0}) {
      for (long t = at(center - 4); t <= at(center + 4); ++t) {
        if (t >= 0 && t <= last) s.peak_slots.insert(static_cast<std::size_t>(t));
      }
    }
    for (long t = 0; t <= at(24); ++t) {
      if (t <= last && !s.peak_slots.contains(static_cast<std::size_t>(t))) {
        s.offpeak_slots.insert(static_cast<std::size_t>(t));
      }
    }
    return s;
  }

  void validate(const Scenario& sc) const {
    for (std::size_t t : peak_slots) {
      if (offpeak_slots.contains(t)) {
        throw InputError("ToU slot " + std::to_string(t) + " is both peak and off-peak");
      }
    }
    for (double p : {peak_price, normal_price, offpeak_price}) {
      if (!(p >= sc.p_min && p <= sc.p_max)) {
        throw InputError("ToU price " + std::to_string(p) + " outside scenario bounds");
      }
    }
  }
};

inline PriceSchedule stationary(const Scenario& s, double price) {
  if (!(price >= s.p_min && price <= s.p_max)) {
    throw InputError("stationary price " + std::to_string(price) + " outside [" +
                     std::to_string(s.p_min) + ", " + std::to_string(s.p_max) + "]");
  }
  return PriceSchedule(s.n_stations(), s.n_slots(), price);
}

inline PriceSchedule tou(const Scenario& s, const TouSchedule& sched) {
  sched.validate(s);
  PriceSchedule out(s.n_stations(), s.n_slots(), 0.0);
  for (std::size_t t = 0; t < s.n_slots(); ++t) {
    const double p = sched.price(t);
    for (std::size_t cs = 0; cs < s.n_stations(); ++cs) out(cs, t) = p;
  }
  return out;
}

}  // namespace evprice
