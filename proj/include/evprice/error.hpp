#pragma once

#include <stdexcept>
#include <string>

namespace evprice {

// Bad user input: unreadable files, schema violations, out-of-range values.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fitting failed for a specific station (e.g. singular design matrix).
class FitError : public InputError {
 public:
  FitError(std::string station, const std::string& what)
      : InputError(what), station_(std::move(station)) {}

  const std::string& station() const noexcept { return station_; }

 private:
  std::string station_;
};

}  // namespace evprice
