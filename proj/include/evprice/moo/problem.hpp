#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evprice/error.hpp"

namespace evprice::moo {

using Objectives = std::vector<double>;

// A box-constrained minimization problem.
template <class P>
concept Problem = requires(const P& p, std::span<const double> x, std::size_t i) {
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.objective_count() } -> std::convertible_to<std::size_t>;
  { p.lower_bound(i) } -> std::convertible_to<double>;
  { p.upper_bound(i) } -> std::convertible_to<double>;
  { p.evaluate(x) } -> std::convertible_to<Objectives>;
};

struct Individual {
  std::vector<double> genome;
  Objectives objectives;  // minimization space
  std::size_t rank = 0;
  double crowding = 0.0;
};

struct GaConfig {
  std::size_t population = 100;
  std::size_t generations = 200;
  double crossover_prob = 0.9;
  double sbx_eta = 15.0;
  // Per-variable mutation probability; unset means 1 / genome length.
  std::optional<double> mutation_prob;
  double mutation_eta = 20.0;
  std::uint64_t seed = 0;

  static GaConfig nsga2_defaults() { return {}; }
  static GaConfig nsga3_defaults() {
    GaConfig c;
    c.population = 92;
    return c;
  }

  double mutation_prob_for(std::size_t dimension) const {
    if (mutation_prob) return *mutation_prob;
    return dimension == 0 ? 0.0 : 1.0 / static_cast<double>(dimension);
  }

  void validate() const {
    if (population < 4 || population % 2 != 0) {
      throw InputError("population must be even and >= 4, got " + std::to_string(population));
    }
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(crossover_prob)) throw InputError("crossover_prob must be in [0, 1]");
    if (mutation_prob && !prob_ok(*mutation_prob)) {
      throw InputError("mutation_prob must be in [0, 1]");
    }
    if (!(sbx_eta >= 0.0) || !(mutation_eta >= 0.0)) {
      throw InputError("distribution indices must be >= 0");
    }
  }
};

struct GenerationStats {
  std::size_t generation = 0;
  Objectives best;  // per-objective minimum over the population
  std::size_t front_size = 0;
};

struct RunLog {
  std::vector<GenerationStats> generations;
  std::vector<std::string> notes;  // each distinct message once

  void note(std::string msg) {
    if (std::find(notes.begin(), notes.end(), msg) == notes.end()) notes.push_back(std::move(msg));
  }
};

// The returned non-dominated set, duplicates removed.
struct Front {
  std::vector<Individual> members;
};

}  // namespace evprice::moo
