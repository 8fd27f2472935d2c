#pragma once

#include <cstddef>
#include <string>

#include "evprice/error.hpp"

namespace evprice {

inline constexpr int kMinutesPerDay = 1440;

// Partition of one day into equal-length pricing slots.
struct SlotGrid {
  int slots_per_day = 96;
  int slot_minutes = 15;

  std::size_t size() const noexcept { return static_cast<std::size_t>(slots_per_day); }

  void validate() const {
    if (slots_per_day <= 0 || slot_minutes <= 0 ||
        slots_per_day * slot_minutes != kMinutesPerDay) {
      throw InputError("slot grid must tile one day: " + std::to_string(slots_per_day) +
                       " x " + std::to_string(slot_minutes) + " min != 1440");
    }
  }

  static SlotGrid from_slots(int slots_per_day) {
    if (slots_per_day <= 0 || kMinutesPerDay % slots_per_day != 0) {
      throw InputError("slots per day must divide 1440, got " + std::to_string(slots_per_day));
    }
    return SlotGrid{slots_per_day, kMinutesPerDay / slots_per_day};
  }

  friend bool operator==(const SlotGrid&, const SlotGrid&) = default;
};

}  // namespace evprice
