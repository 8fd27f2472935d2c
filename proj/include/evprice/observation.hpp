#pragma once

#include <cstddef>
#include <string>

namespace evprice {

// One (price, demand) sample at a station and slot. Both values are
// strictly positive so the log-log model is defined.
struct DemandObservation {
  std::string station_id;
  std::size_t slot_index = 0;
  double price = 0.0;   // $/kWh
  double demand = 0.0;  // kWh

  friend bool operator==(const DemandObservation&, const DemandObservation&) = default;
};

}  // namespace evprice
