#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evprice/baselines.hpp"
#include "evprice/demand_model.hpp"
#include "evprice/json_io.hpp"
#include "evprice/mcdm.hpp"
#include "evprice/objectives.hpp"
#include "evprice/pricing.hpp"

namespace evprice {

inline constexpr const char* kApproachSp = "SP";
inline constexpr const char* kApproachTou = "ToU";
inline constexpr const char* kApproachNsga2 = "BM+NSGA-II";
inline constexpr const char* kApproachNsga3 = "BM+NSGA-III";

inline const char* approach_name(Engine e) {
  return e == Engine::kNsga2 ? kApproachNsga2 : kApproachNsga3;
}

struct ExperimentConfig {
  moo::GaConfig nsga2 = moo::GaConfig::nsga2_defaults();
  moo::GaConfig nsga3 = moo::GaConfig::nsga3_defaults();
  std::size_t partitions = 12;
  FitConfig fit;
  std::size_t runs = 5;
  std::optional<TouSchedule> tou;
  std::optional<double> sp_price;
  std::vector<ImportanceVector> sweeps = {ImportanceVector(1, 0, 0), ImportanceVector(0, 0, 1)};
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = {{"nsga2", io::to_json(c.nsga2)},
                      {"nsga3", io::to_json(c.nsga3)},
                      {"partitions", c.partitions},
                      {"fit", io::to_json(c.fit)},
                      {"runs", c.runs}};
  if (c.tou) j["tou"] = io::to_json(*c.tou);
  if (c.sp_price) j["sp_price"] = *c.sp_price;
  nlohmann::json sweeps = nlohmann::json::array();
  for (const auto& s : c.sweeps) sweeps.push_back(s.weights());
  j["sweeps"] = std::move(sweeps);
  return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    const SlotGrid& grid = {}) {
  ExperimentConfig c;
  if (j.contains("nsga2")) c.nsga2 = io::ga_config_from_json(j.at("nsga2"), c.nsga2);
  if (j.contains("nsga3")) c.nsga3 = io::ga_config_from_json(j.at("nsga3"), c.nsga3);
  c.partitions = io::detail::get_or<std::size_t>(j, "partitions", c.partitions);
  if (c.partitions < 1) throw InputError("partitions must be >= 1");
  if (j.contains("fit")) c.fit = io::fit_config_from_json(j.at("fit"));
  c.runs = io::detail::get_or<std::size_t>(j, "runs", c.runs);
  if (c.runs < 1) throw InputError("runs must be >= 1");
  if (j.contains("tou")) c.tou = io::tou_from_json(j.at("tou"), grid);
  if (j.contains("sp_price")) c.sp_price = j.at("sp_price").get<double>();
  if (j.contains("sweeps")) {
    c.sweeps.clear();
    for (const auto& w : j.at("sweeps")) {
      const auto v = w.get<std::vector<double>>();
      if (v.size() != 3) throw InputError("each sweep importance needs 3 weights");
      c.sweeps.emplace_back(v[0], v[1], v[2]);
    }
  }
  return c;
}

// FNV-1a over the canonical config text; stable across runs and platforms.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

// Seed for one (run, engine) pair, independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::size_t run, Engine engine) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t tag = engine == Engine::kNsga2 ? 2 : 3;
  return mix(mix(mix(master) ^ static_cast<std::uint64_t>(run)) ^ tag);
}

// Runs `fn`, prefixing any input error with the pipeline stage it came from.
template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FitError& e) {
    throw FitError(e.station(), std::string("stage '") + stage + "': " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string("stage '") + stage + "': " + e.what());
  }
}

// Everything a report depends on besides the evolved fronts.
struct ExperimentInputs {
  Scenario scenario;
  ModelMap fitted;  // empty when the scenario carried models directly
  TouSchedule tou;
  double sp_price = 0.0;
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::string config_hash;
};

inline ExperimentInputs prepare_inputs(io::ScenarioFile file, ExperimentConfig config,
                                       std::uint64_t seed) {
  ExperimentInputs in;
  in.seed = seed;
  in.config_hash = config_hash(config);
  in.scenario = std::move(file.scenario);
  if (!file.observations.empty()) {
    in.fitted = in_stage("fit", [&] { return fit(file.observations, config.fit); });
    in_stage("fit", [&] { io::attach_models(in.scenario, in.fitted); });
  }
  in_stage("scenario", [&] { in.scenario.validate(); });
  in.tou = config.tou ? *config.tou : file.tou ? *file.tou : TouSchedule::defaults(in.scenario.grid);
  in.sp_price = config.sp_price ? *config.sp_price : file.sp_price ? *file.sp_price : in.scenario.p_ref;
  in_stage("baselines", [&] {
    in.tou.validate(in.scenario);
    (void)stationary(in.scenario, in.sp_price);
  });
  in.config = std::move(config);
  return in;
}

inline ExperimentInputs prepare_inputs(const std::filesystem::path& scenario_path,
                                       const std::optional<std::filesystem::path>& config_path,
                                       std::uint64_t seed) {
  auto file = in_stage("load scenario", [&] { return io::load_scenario(scenario_path); });
  ExperimentConfig cfg;
  if (config_path) {
    cfg = in_stage("load config", [&] {
      return experiment_config_from_json(io::read_json_file(*config_path), file.scenario.grid);
    });
  }
  return prepare_inputs(std::move(file), std::move(cfg), seed);
}

struct EngineRun {
  Engine engine = Engine::kNsga2;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  ParetoSet front;
  moo::RunLog log;
  double seconds = 0.0;
};

inline EngineRun run_engine(const ExperimentInputs& in, Engine engine, std::size_t run) {
  EngineRun r;
  r.engine = engine;
  r.run = run;
  r.seed = derive_seed(in.seed, run, engine);
  moo::GaConfig cfg = engine == Engine::kNsga2 ? in.config.nsga2 : in.config.nsga3;
  cfg.seed = r.seed;
  const auto t0 = std::chrono::steady_clock::now();
  r.front = in_stage("optimize", [&] {
    return optimize(in.scenario, engine, cfg, &r.log, in.config.partitions);
  });
  compute_pseudo_weights(r.front);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// All runs of both engines, NSGA-II first.
inline std::vector<EngineRun> run_fronts(const ExperimentInputs& in) {
  std::vector<EngineRun> out;
  for (Engine e : {Engine::kNsga2, Engine::kNsga3}) {
    for (std::size_t r = 0; r < in.config.runs; ++r) out.push_back(run_engine(in, e, r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct Selection {
  std::size_t index = 0;
  ObjectiveTriple objectives;
  std::array<double, 3> weights{};
};

inline Selection select_member(const ParetoSet& front, const ImportanceVector& importance) {
  if (front.empty()) throw InputError("cannot select from an empty front");
  const std::size_t i = select(front, importance);
  return {i, front.members[i].objectives, pseudo_weights(front)[i]};
}

struct RunSummary {
  Engine engine = Engine::kNsga2;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t front_size = 0;
  Selection balanced;
};

struct SweepEntry {
  Engine engine = Engine::kNsga2;
  std::size_t run = 0;
  ImportanceVector importance;
  Selection selection;
  // Improvement over the balanced pick per metric (revenue, qos, par), in %.
  std::array<double, 3> delta_pct{};
};

struct ImprovementCell {
  std::string baseline;
  std::string approach;
  std::string metric;
  double value = 0.0;
};

struct BoxStats {
  std::string approach;
  std::string metric;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t n = 0;
};

struct ExperimentReport {
  std::vector<std::pair<std::string, ObjectiveTriple>> averages;
  std::vector<ImprovementCell> improvements;
  std::vector<RunSummary> runs;
  std::vector<SweepEntry> sweeps;
  std::vector<BoxStats> boxplot;
  std::uint64_t seed = 0;
  std::string config_hash;

  const ObjectiveTriple& average(const std::string& approach) const {
    for (const auto& [name, t] : averages) {
      if (name == approach) return t;
    }
    throw InputError("no approach '" + approach + "' in report");
  }
};

inline constexpr std::array<const char*, 3> kMetricNames = {"revenue", "qos", "par"};

inline double metric_of(const ObjectiveTriple& t, std::size_t k) {
  return k == 0 ? t.revenue : k == 1 ? t.qos : t.par;
}

inline Direction metric_direction(std::size_t k) {
  return k == 2 ? Direction::kMinimize : Direction::kMaximize;
}

// Per-slot contributions to each metric, for distribution plots: revenue
// summed over stations, QoS and PAR ratios averaged over stations.
inline std::array<std::vector<double>, 3> slot_metrics(const Scenario& s, const PriceSchedule& p) {
  const Matrix d = demand_matrix(s, p);
  const std::size_t n = s.n_stations();
  const std::size_t t_count = s.n_slots();
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.assign(t_count, 0.0);
  for (std::size_t cs = 0; cs < n; ++cs) {
    const auto row = d.row(cs);
    const double peak = *std::max_element(row.begin(), row.end());
    for (std::size_t t = 0; t < t_count; ++t) {
      const double req = d(cs, t);
      const double dlv = std::min(req, s.capacity(cs, t));
      const double billed = s.revenue_mode == RevenueMode::kCapped ? dlv : req;
      out[0][t] += p(cs, t) * billed;
      out[1][t] += (req <= kDemandEpsilon ? 1.0 : dlv / req) / static_cast<double>(n);
      out[2][t] += peak / std::max(req, kDemandEpsilon) / static_cast<double>(n);
    }
  }
  return out;
}

// Linear-interpolation quantiles (the common "type 7" definition).
inline BoxStats box_stats(std::string approach, std::string metric, std::vector<double> v) {
  BoxStats b;
  b.approach = std::move(approach);
  b.metric = std::move(metric);
  b.n = v.size();
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  b.min = v.front();
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  b.max = v.back();
  return b;
}

inline std::vector<SweepEntry> importance_sweep(const std::vector<EngineRun>& fronts,
                                                const ImportanceVector& importance) {
  std::vector<SweepEntry> out;
  for (const auto& r : fronts) {
    if (r.front.empty()) {
      throw InputError(std::string("importance sweep: empty front for ") + approach_name(r.engine));
    }
    const Selection bal = select_member(r.front, ImportanceVector::balanced());
    SweepEntry e;
    e.engine = r.engine;
    e.run = r.run;
    e.importance = importance;
    e.selection = select_member(r.front, importance);
    for (std::size_t k = 0; k < 3; ++k) {
      const double before = metric_of(bal.objectives, k);
      e.delta_pct[k] = before == 0.0 ? 0.0
                                     : improvement_pct(metric_of(e.selection.objectives, k), before,
                                                       metric_direction(k));
    }
    out.push_back(e);
  }
  return out;
}

// Builds the report from prepared inputs and evolved fronts only, so it can
// be regenerated from persisted fronts.
inline ExperimentReport build_report(const ExperimentInputs& in,
                                     const std::vector<EngineRun>& fronts) {
  const Scenario& s = in.scenario;
  ExperimentReport rep;
  rep.seed = in.seed;
  rep.config_hash = in.config_hash;

  const PriceSchedule sp = stationary(s, in.sp_price);
  const PriceSchedule tu = tou(s, in.tou);
  rep.averages.emplace_back(kApproachSp, evaluate(s, sp));
  rep.averages.emplace_back(kApproachTou, evaluate(s, tu));

  std::array<std::vector<double>, 3> samples_sp = slot_metrics(s, sp);
  std::array<std::vector<double>, 3> samples_tou = slot_metrics(s, tu);

  for (Engine e : {Engine::kNsga2, Engine::kNsga3}) {
    ObjectiveTriple sum{};
    std::size_t count = 0;
    std::array<std::vector<double>, 3> samples;
    for (const auto& r : fronts) {
      if (r.engine != e) continue;
      if (r.front.empty()) {
        throw InputError(std::string("stage 'select': empty front for ") + approach_name(e));
      }
      RunSummary sum_r{e, r.run, r.seed, r.front.size(),
                       select_member(r.front, ImportanceVector::balanced())};
      sum.revenue += sum_r.balanced.objectives.revenue;
      sum.qos += sum_r.balanced.objectives.qos;
      sum.par += sum_r.balanced.objectives.par;
      ++count;
      const auto per_slot = slot_metrics(s, r.front.members[sum_r.balanced.index].schedule);
      for (std::size_t k = 0; k < 3; ++k) {
        samples[k].insert(samples[k].end(), per_slot[k].begin(), per_slot[k].end());
      }
      rep.runs.push_back(sum_r);
    }
    if (count == 0) throw InputError(std::string("no runs for ") + approach_name(e));
    const double n = static_cast<double>(count);
    rep.averages.emplace_back(approach_name(e), ObjectiveTriple{sum.revenue / n, sum.qos / n, sum.par / n});
    for (std::size_t k = 0; k < 3; ++k) {
      rep.boxplot.push_back(box_stats(approach_name(e), kMetricNames[k], samples[k]));
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    rep.boxplot.insert(rep.boxplot.begin() + static_cast<std::ptrdiff_t>(k),
                       box_stats(kApproachSp, kMetricNames[k], samples_sp[k]));
  }
  for (std::size_t k = 0; k < 3; ++k) {
    rep.boxplot.insert(rep.boxplot.begin() + 3 + static_cast<std::ptrdiff_t>(k),
                       box_stats(kApproachTou, kMetricNames[k], samples_tou[k]));
  }

  auto add_cells = [&](const std::string& baseline, std::initializer_list<const char*> approaches) {
    const ObjectiveTriple& base = rep.average(baseline);
    for (const char* a : approaches) {
      const ObjectiveTriple& now = rep.average(a);
      for (std::size_t k = 0; k < 3; ++k) {
        const double before = metric_of(base, k);
        if (before == 0.0) continue;
        rep.improvements.push_back({baseline, a, kMetricNames[k],
                                    improvement_pct(metric_of(now, k), before, metric_direction(k))});
      }
    }
  };
  add_cells(kApproachSp, {kApproachTou, kApproachNsga2, kApproachNsga3});
  add_cells(kApproachTou, {kApproachNsga2, kApproachNsga3});

  for (const auto& imp : in.config.sweeps) {
    auto entries = importance_sweep(fronts, imp);
    rep.sweeps.insert(rep.sweeps.end(), entries.begin(), entries.end());
  }
  return rep;
}

struct ExperimentResult {
  ExperimentInputs inputs;
  std::vector<EngineRun> fronts;
  ExperimentReport report;
};

inline ExperimentResult run_experiment(ExperimentInputs inputs) {
  ExperimentResult res;
  res.fronts = run_fronts(inputs);
  res.report = build_report(inputs, res.fronts);
  res.inputs = std::move(inputs);
  return res;
}

inline ExperimentResult run_experiment(const std::filesystem::path& scenario_path,
                                       const std::optional<std::filesystem::path>& config_path,
                                       std::uint64_t seed) {
  return run_experiment(prepare_inputs(scenario_path, config_path, seed));
}

// ---------------------------------------------------------------------------
// Serialization of the report directory
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Selection& s) {
  return {{"index", s.index}, {"objectives", io::to_json(s.objectives)}, {"pseudo_weights", s.weights}};
}

inline nlohmann::json report_json(const ExperimentInputs& in, const ExperimentReport& rep) {
  using nlohmann::json;
  json averages = json::object();
  for (const auto& [name, t] : rep.averages) averages[name] = io::to_json(t);

  json improvements = json::object();
  for (const auto& c : rep.improvements) {
    improvements["over_" + c.baseline][c.approach][c.metric] = c.value;
  }

  json runs = json::array();
  for (const auto& r : rep.runs) {
    runs.push_back({{"approach", approach_name(r.engine)},
                    {"run", r.run},
                    {"seed", r.seed},
                    {"front_size", r.front_size},
                    {"balanced", to_json(r.balanced)}});
  }

  json sweeps = json::array();
  for (const auto& e : rep.sweeps) {
    sweeps.push_back({{"approach", approach_name(e.engine)},
                      {"run", e.run},
                      {"importance", e.importance.weights()},
                      {"selected", to_json(e.selection)},
                      {"delta_pct", {{"revenue", e.delta_pct[0]}, {"qos", e.delta_pct[1]}, {"par", e.delta_pct[2]}}}});
  }

  json fitted = json::object();
  for (const auto& [id, m] : in.fitted) fitted[id] = io::to_json(m);

  return {{"averages", averages},
          {"improvement", improvements},
          {"runs", runs},
          {"importance_sweeps", sweeps},
          {"fitted_models", fitted},
          {"baselines",
           {{"sp_price", in.sp_price}, {"tou", io::to_json(in.tou)}}},
          {"metadata",
           {{"seed", rep.seed},
            {"config_hash", rep.config_hash},
            {"runs_per_engine", in.config.runs},
            {"n_stations", in.scenario.n_stations()},
            {"n_slots", in.scenario.n_slots()}}}};
}

inline std::string tables_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "table,approach,metric,value\n";
  for (const auto& [name, t] : rep.averages) {
    for (std::size_t k = 0; k < 3; ++k) {
      out << "average," << name << ',' << kMetricNames[k] << ',' << metric_of(t, k) << '\n';
    }
  }
  for (const auto& c : rep.improvements) {
    out << "improvement_pct_over_" << c.baseline << ',' << c.approach << ',' << c.metric << ','
        << c.value << '\n';
  }
  return out.str();
}

inline std::string boxplot_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "approach,metric,n,min,q1,median,q3,max\n";
  for (const auto& b : rep.boxplot) {
    out << b.approach << ',' << b.metric << ',' << b.n << ',' << b.min << ',' << b.q1 << ','
        << b.median << ',' << b.q3 << ',' << b.max << '\n';
  }
  return out.str();
}

inline nlohmann::json fronts_json(const std::vector<EngineRun>& fronts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : fronts) {
    out.push_back({{"engine", std::string(engine_name(r.engine))},
                   {"run", r.run},
                   {"seed", r.seed},
                   {"front", io::to_json(r.front)}});
  }
  return out;
}

inline std::vector<EngineRun> fronts_from_json(const nlohmann::json& j, const Scenario& s) {
  if (!j.is_array()) throw InputError("fronts document must be an array");
  std::vector<EngineRun> out;
  for (const auto& e : j) {
    EngineRun r;
    r.engine = parse_engine(io::detail::require<std::string>(e, "engine"));
    r.run = io::detail::require<std::size_t>(e, "run");
    r.seed = io::detail::require<std::uint64_t>(e, "seed");
    r.front = io::pareto_set_from_json(io::detail::require<nlohmann::json>(e, "front"), &s);
    out.push_back(std::move(r));
  }
  return out;
}

// Fixed file names inside `dir`. Wall-clock timings go to timings.json so
// report.json stays reproducible.
inline void write_report_dir(const std::filesystem::path& dir, const ExperimentResult& res) {
  std::filesystem::create_directories(dir);
  io::write_json_file(dir / "report.json", report_json(res.inputs, res.report));
  io::write_text_file(dir / "tables.csv", tables_csv(res.report));
  io::write_text_file(dir / "boxplot.csv", boxplot_csv(res.report));
  io::write_json_file(dir / "fronts.json", fronts_json(res.fronts));
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& r : res.fronts) {
    io::write_text_file(dir / ("runlog_" + std::string(engine_name(r.engine)) + "_" +
                               std::to_string(r.run) + ".csv"),
                        io::run_log_csv(r.log));
    timings.push_back({{"engine", std::string(engine_name(r.engine))}, {"run", r.run}, {"seconds", r.seconds}});
  }
  io::write_json_file(dir / "timings.json", timings);
}

}  // namespace evprice
