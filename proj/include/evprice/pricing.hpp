#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "evprice/moo/nsga.hpp"
#include "evprice/objectives.hpp"
#include "evprice/scenario.hpp"

namespace evprice {

// Exposes a scenario as a minimization problem over the flattened price
// matrix (row-major, station then slot) with objectives (-revenue, -qos, par).
// Capacity is enforced inside evaluation through capped delivery, so every
// genome in the box is feasible.
class PricingProblem {
 public:
  explicit PricingProblem(const Scenario& s) : s_(&s) {}

  std::size_t dimension() const noexcept { return s_->n_stations() * s_->n_slots(); }
  std::size_t objective_count() const noexcept { return 3; }
  double lower_bound(std::size_t) const noexcept { return s_->p_min; }
  double upper_bound(std::size_t) const noexcept { return s_->p_max; }

  moo::Objectives evaluate(std::span<const double> genome) const {
    const auto p = PriceSchedule::from_genome(genome, s_->n_stations(), s_->n_slots());
    const auto f = evprice::evaluate(*s_, p).minimization();
    return {f.begin(), f.end()};
  }

 private:
  const Scenario* s_;
};

struct ParetoMember {
  PriceSchedule schedule;
  ObjectiveTriple objectives;
};

// Mutually non-dominated schedules; pseudo_weights is filled by the MCDM step
// and is either empty or one vector per member.
struct ParetoSet {
  std::vector<ParetoMember> members;
  std::vector<std::array<double, 3>> pseudo_weights;

  std::size_t size() const noexcept { return members.size(); }
  bool empty() const noexcept { return members.empty(); }

  std::vector<moo::Objectives> minimization_objectives() const {
    std::vector<moo::Objectives> out;
    out.reserve(members.size());
    for (const auto& m : members) {
      const auto f = m.objectives.minimization();
      out.emplace_back(f.begin(), f.end());
    }
    return out;
  }
};

enum class Engine { kNsga2, kNsga3 };

inline Engine parse_engine(std::string_view name) {
  if (name == "nsga2") return Engine::kNsga2;
  if (name == "nsga3") return Engine::kNsga3;
  throw InputError("unknown engine '" + std::string(name) + "' (expected nsga2 or nsga3)");
}

inline std::string_view engine_name(Engine e) { return e == Engine::kNsga2 ? "nsga2" : "nsga3"; }

inline ParetoSet to_pareto_set(const Scenario& s, const moo::Front& front) {
  ParetoSet out;
  out.members.reserve(front.members.size());
  for (const auto& ind : front.members) {
    out.members.push_back({PriceSchedule::from_genome(ind.genome, s.n_stations(), s.n_slots()),
                           ObjectiveTriple::from_minimization(ind.objectives)});
  }
  return out;
}

// Runs one engine on the scenario. `partitions` sets the Das-Dennis lattice
// used by NSGA-III.
inline ParetoSet optimize(const Scenario& s, Engine engine, const moo::GaConfig& cfg,
                          moo::RunLog* log = nullptr, std::size_t partitions = 12) {
  s.validate();
  const PricingProblem problem(s);
  const moo::Front front = engine == Engine::kNsga2
                               ? moo::nsga2_run(problem, cfg, log)
                               : moo::nsga3_run(problem, cfg, moo::das_dennis(partitions, 3), log);
  return to_pareto_set(s, front);
}

}  // namespace evprice
