#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "evprice/moo/problem.hpp"

namespace evprice::moo {

// Pareto dominance for minimization.
inline bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

// Fast non-dominated sort. Returns fronts as index lists, best front first;
// indices inside a front are ascending.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(
    std::span<const Objectives> pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(pop[p], pop[q])) {
        dominated_by_me[p].push_back(q);
        ++domination_count[q];
      } else if (dominates(pop[q], pop[p])) {
        dominated_by_me[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated_by_me[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

// Crowding distance of pop[members[k]] within the front `members`.
inline std::vector<double> crowding_distance(std::span<const Objectives> pop,
                                             std::span<const std::size_t> members) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = members.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  const std::size_t m = pop[members[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[members[a]][obj] < pop[members[b]][obj];
    });
    const double lo = pop[members[order.front()]][obj];
    const double hi = pop[members[order.back()]][obj];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double range = hi - lo;
    if (!(range > 0.0)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      dist[order[k]] += (pop[members[order[k + 1]]][obj] - pop[members[order[k - 1]]][obj]) / range;
    }
  }
  return dist;
}

inline std::vector<double> crowding_distance(std::span<const Objectives> front) {
  std::vector<std::size_t> all(front.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return crowding_distance(front, all);
}

}  // namespace evprice::moo
