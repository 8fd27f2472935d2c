#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evprice/moo/problem.hpp"
#include "evprice/moo/reference_points.hpp"
#include "evprice/moo/sorting.hpp"
#include "evprice/moo/variation.hpp"

namespace evprice::moo {

namespace detail {

inline std::vector<Objectives> objectives_of(const std::vector<Individual>& pop) {
  std::vector<Objectives> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back(ind.objectives);
  return out;
}

// Writes rank and crowding into every member of `pop`.
inline void assign_rank_and_crowding(std::vector<Individual>& pop) {
  const auto objs = objectives_of(pop);
  const auto fronts = non_dominated_sort(objs);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto dist = crowding_distance(objs, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pop[fronts[r][k]].rank = r;
      pop[fronts[r][k]].crowding = dist[k];
    }
  }
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Binary tournament on (rank asc, crowding desc); ties go to a coin flip.
inline std::size_t tournament(const std::vector<Individual>& pop, Rng& rng) {
  const std::size_t a = uniform_index(rng, pop.size());
  const std::size_t b = uniform_index(rng, pop.size());
  const auto& x = pop[a];
  const auto& y = pop[b];
  if (x.rank != y.rank) return x.rank < y.rank ? a : b;
  if (x.crowding != y.crowding) return x.crowding > y.crowding ? a : b;
  return uniform01(rng) < 0.5 ? a : b;
}

template <Problem P>
void evaluate_all(const P& problem, std::span<Individual> members) {
  for (auto& ind : members) ind.objectives = problem.evaluate(ind.genome);
}

inline GenerationStats stats_of(std::size_t generation, const std::vector<Individual>& pop) {
  GenerationStats s;
  s.generation = generation;
  const std::size_t m = pop.front().objectives.size();
  s.best.assign(m, std::numeric_limits<double>::infinity());
  for (const auto& ind : pop) {
    for (std::size_t j = 0; j < m; ++j) s.best[j] = std::min(s.best[j], ind.objectives[j]);
    if (ind.rank == 0) ++s.front_size;
  }
  return s;
}

// Rank-0 members with duplicate objective vectors removed (first kept).
inline Front first_front(const std::vector<Individual>& pop) {
  Front out;
  for (const auto& ind : pop) {
    if (ind.rank != 0) continue;
    const bool dup = std::any_of(out.members.begin(), out.members.end(),
                                 [&](const Individual& o) { return o.objectives == ind.objectives; });
    if (!dup) out.members.push_back(ind);
  }
  return out;
}

// Generational loop shared by both engines; `survive` reduces the merged
// parent+offspring population back to cfg.population members.
template <Problem P, class Survival>
Front run_generational(const P& problem, const GaConfig& cfg, Survival&& survive, Rng& rng,
                       RunLog* log) {
  cfg.validate();
  const std::size_t dim = problem.dimension();
  std::vector<double> lower(dim), upper(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    lower[i] = problem.lower_bound(i);
    upper[i] = problem.upper_bound(i);
    if (!(lower[i] <= upper[i])) throw InputError("problem bounds are inverted");
  }

  std::vector<Individual> pop(cfg.population);
  for (auto& ind : pop) {
    ind.genome.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      ind.genome[i] = std::uniform_real_distribution<double>(lower[i], upper[i])(rng);
    }
  }
  evaluate_all(problem, std::span<Individual>(pop));
  assign_rank_and_crowding(pop);
  if (log) log->generations.push_back(stats_of(0, pop));

  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<Individual> merged = pop;
    merged.reserve(2 * cfg.population);
    while (merged.size() < 2 * cfg.population) {
      const auto& p1 = pop[tournament(pop, rng)];
      const auto& p2 = pop[tournament(pop, rng)];
      auto [g1, g2] = sbx_crossover(p1.genome, p2.genome, lower, upper, cfg, rng);
      Individual c1, c2;
      c1.genome = polynomial_mutation(g1, lower, upper, cfg, rng);
      c2.genome = polynomial_mutation(g2, lower, upper, cfg, rng);
      merged.push_back(std::move(c1));
      if (merged.size() < 2 * cfg.population) merged.push_back(std::move(c2));
    }
    evaluate_all(problem, std::span<Individual>(merged).subspan(cfg.population));
    pop = survive(std::move(merged), cfg.population, rng, log);
    assign_rank_and_crowding(pop);
    if (log) log->generations.push_back(stats_of(gen, pop));
  }
  return first_front(pop);
}

// Whole fronts in rank order until the next one would overflow `target`.
// Returns the chosen indices and the index list of the split front (possibly
// empty when the fronts fill `target` exactly).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> take_whole_fronts(
    const std::vector<std::vector<std::size_t>>& fronts, std::size_t target) {
  std::vector<std::size_t> chosen;
  for (const auto& f : fronts) {
    if (chosen.size() + f.size() <= target) {
      chosen.insert(chosen.end(), f.begin(), f.end());
      if (chosen.size() == target) return {chosen, {}};
    } else {
      return {chosen, f};
    }
  }
  return {chosen, {}};
}

}  // namespace detail

// NSGA-II survivor selection: rank, then crowding distance descending.
inline std::vector<Individual> nsga2_survival(std::vector<Individual> merged, std::size_t target) {
  const auto objs = detail::objectives_of(merged);
  const auto fronts = non_dominated_sort(objs);
  auto [chosen, split] = detail::take_whole_fronts(fronts, target);
  if (!split.empty()) {
    const auto dist = crowding_distance(objs, split);
    std::vector<std::size_t> order(split.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    for (std::size_t k = 0; chosen.size() < target; ++k) chosen.push_back(split[order[k]]);
  }
  std::vector<Individual> out;
  out.reserve(target);
  for (std::size_t i : chosen) out.push_back(std::move(merged[i]));
  return out;
}

template <Problem P>
Front nsga2_run(const P& problem, const GaConfig& cfg, RunLog* log = nullptr) {
  Rng rng(cfg.seed);
  auto survive = [](std::vector<Individual> merged, std::size_t target, Rng&, RunLog*) {
    return nsga2_survival(std::move(merged), target);
  };
  return detail::run_generational(problem, cfg, survive, rng, log);
}

// ---------------------------------------------------------------------------
// NSGA-III niching
// ---------------------------------------------------------------------------

struct Normalization {
  Objectives ideal;
  Objectives intercepts;  // denominators per axis
  bool degenerate = false;
};

namespace detail {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

// Ideal-point translation plus hyperplane intercepts through the per-axis
// extreme points (minimum achievement scalarizing function). Falls back to the
// per-axis maximum when the hyperplane is degenerate, and to 1 when an axis
// has no spread at all.
inline Normalization normalize(std::span<const Objectives> objs, RunLog* log = nullptr) {
  constexpr double tiny = 1e-10;
  const std::size_t m = objs.front().size();
  Normalization norm;
  norm.ideal.assign(m, std::numeric_limits<double>::infinity());
  for (const auto& f : objs) {
    for (std::size_t j = 0; j < m; ++j) norm.ideal[j] = std::min(norm.ideal[j], f[j]);
  }

  std::vector<std::vector<double>> extremes;
  for (std::size_t axis = 0; axis < m; ++axis) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      double asf = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        const double w = j == axis ? 1.0 : 1e-6;
        asf = std::max(asf, (objs[i][j] - norm.ideal[j]) / w);
      }
      if (asf < best) {
        best = asf;
        best_i = i;
      }
    }
    std::vector<double> e(m);
    for (std::size_t j = 0; j < m; ++j) e[j] = objs[best_i][j] - norm.ideal[j];
    extremes.push_back(std::move(e));
  }

  norm.intercepts.assign(m, 0.0);
  bool ok = false;
  if (auto plane = detail::solve_linear(extremes, std::vector<double>(m, 1.0))) {
    ok = true;
    for (std::size_t j = 0; j < m; ++j) {
      const double b = (*plane)[j];
      if (!(b > 0.0) || !std::isfinite(1.0 / b) || 1.0 / b <= tiny) {
        ok = false;
        break;
      }
      norm.intercepts[j] = 1.0 / b;
    }
  }
  if (!ok) {
    for (std::size_t j = 0; j < m; ++j) {
      double worst = 0.0;
      for (const auto& f : objs) worst = std::max(worst, f[j] - norm.ideal[j]);
      if (worst <= tiny) {
        worst = 1.0;
        norm.degenerate = true;
      }
      norm.intercepts[j] = worst;
    }
    if (norm.degenerate && log) {
      log->note("degenerate normalization: unit denominator on a constant objective");
    }
  }
  return norm;
}

struct Association {
  std::size_t reference = 0;
  double distance = 0.0;
};

// Nearest reference direction by perpendicular distance for each normalized
// objective vector. Ties go to the lower reference index.
inline std::vector<Association> associate(std::span<const Objectives> normalized,
                                          const ReferencePointSet& refs) {
  std::vector<Association> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const auto& f = normalized[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const auto& w = refs.points[r];
      double dot = 0.0, ww = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        dot += f[j] * w[j];
        ww += w[j] * w[j];
      }
      const double k = ww > 0.0 ? dot / ww : 0.0;
      double d2 = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double diff = f[j] - k * w[j];
        d2 += diff * diff;
      }
      const double d = std::sqrt(d2);
      if (d < best) {
        best = d;
        out[i] = {r, d};
      }
    }
  }
  return out;
}

// NSGA-III survivor selection.
inline std::vector<Individual> nsga3_survival(std::vector<Individual> merged, std::size_t target,
                                              const ReferencePointSet& refs, Rng& rng,
                                              RunLog* log) {
  const auto objs = detail::objectives_of(merged);
  const auto fronts = non_dominated_sort(objs);
  auto [chosen, split] = detail::take_whole_fronts(fronts, target);

  if (!split.empty()) {
    // S_t = chosen + split front, normalized together.
    std::vector<std::size_t> candidates = chosen;
    candidates.insert(candidates.end(), split.begin(), split.end());
    std::vector<Objectives> s_objs;
    s_objs.reserve(candidates.size());
    for (std::size_t i : candidates) s_objs.push_back(objs[i]);

    const Normalization norm = normalize(s_objs, log);
    for (auto& f : s_objs) {
      for (std::size_t j = 0; j < f.size(); ++j) f[j] = (f[j] - norm.ideal[j]) / norm.intercepts[j];
    }
    const auto assoc = associate(s_objs, refs);

    std::vector<std::size_t> niche(refs.size(), 0);
    for (std::size_t k = 0; k < chosen.size(); ++k) ++niche[assoc[k].reference];

    // Split-front members still available, per reference direction.
    std::vector<std::vector<std::size_t>> pending(refs.size());
    for (std::size_t k = chosen.size(); k < candidates.size(); ++k) {
      pending[assoc[k].reference].push_back(k);
    }
    std::vector<bool> active(refs.size(), true);
    std::size_t remaining = target - chosen.size();

    // Per-objective best members survive unconditionally.
    const std::size_t whole = chosen.size();
    for (std::size_t j = 0; j < s_objs.front().size() && remaining > 0; ++j) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < candidates.size(); ++k) {
        if (objs[candidates[k]][j] < objs[candidates[best]][j]) best = k;
      }
      if (best < whole) continue;
      auto& pool = pending[assoc[best].reference];
      const auto it = std::find(pool.begin(), pool.end(), best);
      if (it == pool.end()) continue;
      pool.erase(it);
      chosen.push_back(candidates[best]);
      ++niche[assoc[best].reference];
      --remaining;
    }

    while (remaining > 0) {
      std::size_t min_count = std::numeric_limits<std::size_t>::max();
      for (std::size_t r = 0; r < refs.size(); ++r) {
        if (active[r]) min_count = std::min(min_count, niche[r]);
      }
      std::vector<std::size_t> least;
      for (std::size_t r = 0; r < refs.size(); ++r) {
        if (active[r] && niche[r] == min_count) least.push_back(r);
      }
      const std::size_t r = least[detail::uniform_index(rng, least.size())];
      auto& pool = pending[r];
      if (pool.empty()) {
        active[r] = false;
        continue;
      }
      std::size_t pick = 0;
      if (niche[r] == 0) {
        for (std::size_t q = 1; q < pool.size(); ++q) {
          if (assoc[pool[q]].distance < assoc[pool[pick]].distance) pick = q;
        }
      } else {
        pick = detail::uniform_index(rng, pool.size());
      }
      chosen.push_back(candidates[pool[pick]]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      ++niche[r];
      --remaining;
    }
  }

  std::vector<Individual> out;
  out.reserve(target);
  for (std::size_t i : chosen) out.push_back(std::move(merged[i]));
  return out;
}

template <Problem P>
Front nsga3_run(const P& problem, const GaConfig& cfg, const ReferencePointSet& refs,
                RunLog* log = nullptr) {
  if (refs.dimensions() != problem.objective_count()) {
    throw InputError("reference points have " + std::to_string(refs.dimensions()) +
                     " dimensions but the problem has " +
                     std::to_string(problem.objective_count()) + " objectives");
  }
  if (log && cfg.population < refs.size()) {
    log->note("population " + std::to_string(cfg.population) + " is smaller than " +
                         std::to_string(refs.size()) + " reference points");
  }
  Rng rng(cfg.seed);
  auto survive = [&refs](std::vector<Individual> merged, std::size_t target, Rng& r,
                         RunLog* lg) {
    return nsga3_survival(std::move(merged), target, refs, r, lg);
  };
  return detail::run_generational(problem, cfg, survive, rng, log);
}

}  // namespace evprice::moo
