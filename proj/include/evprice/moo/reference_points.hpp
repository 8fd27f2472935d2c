#pragma once

#include <cstddef>
#include <vector>

#include "evprice/error.hpp"

namespace evprice::moo {

// Structured simplex lattice of reference directions.
struct ReferencePointSet {
  std::vector<std::vector<double>> points;
  std::size_t partitions = 0;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t dimensions() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

// Das-Dennis points: every vector with components in {0, 1/p, ..., 1} summing
// to one. There are C(p + M - 1, M - 1) of them.
inline ReferencePointSet das_dennis(std::size_t partitions, std::size_t dims = 3) {
  if (partitions < 1) throw InputError("das_dennis: partitions must be >= 1");
  if (dims < 1) throw InputError("das_dennis: dims must be >= 1");
  ReferencePointSet out;
  out.partitions = partitions;
  std::vector<std::size_t> counts(dims, 0);
  // Enumerate compositions of `partitions` into `dims` parts, lexicographic
  // with the first coordinate largest first.
  auto recurse = [&](auto&& self, std::size_t dim, std::size_t left) -> void {
    if (dim + 1 == dims) {
      counts[dim] = left;
      std::vector<double> p(dims);
      for (std::size_t i = 0; i < dims; ++i) {
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(partitions);
      }
      out.points.push_back(std::move(p));
      return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
      counts[dim] = k;
      self(self, dim + 1, left - k);
    }
  };
  recurse(recurse, 0, partitions);
  return out;
}

}  // namespace evprice::moo
