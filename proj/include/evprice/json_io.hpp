#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evprice/baselines.hpp"
#include "evprice/demand_model.hpp"
#include "evprice/error.hpp"
#include "evprice/ingest.hpp"
#include "evprice/mcdm.hpp"
#include "evprice/moo/problem.hpp"
#include "evprice/pricing.hpp"
#include "evprice/scenario.hpp"

namespace evprice::io {

using nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

// Serialized text ends with a newline so files diff cleanly.
inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

inline void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing required field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// ---- matrices --------------------------------------------------------------

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(std::string(what) + " must be a 2-D array");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw InputError(std::string(what) + " rows must all have length " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InputError(std::string(what) + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

// ---- demand models ---------------------------------------------------------

inline json to_json(const DemandModelPosterior& m) {
  return {{"log_a_mean", m.log_a_mean},
          {"c_mean", m.c_mean},
          {"covariance",
           {{m.covariance[0][0], m.covariance[0][1]}, {m.covariance[1][0], m.covariance[1][1]}}},
          {"noise_variance", m.noise_variance},
          {"n_obs", m.n_obs},
          {"pooled", m.pooled}};
}

inline json to_json(const ModelMap& models) {
  json out = json::object();
  for (const auto& [id, m] : models) out[id] = to_json(m);
  return out;
}

inline DemandModelPosterior model_from_json(const std::string& id, const json& j) {
  DemandModelPosterior m;
  m.station_id = id;
  m.log_a_mean = detail::require<double>(j, "log_a_mean");
  m.c_mean = detail::require<double>(j, "c_mean");
  m.noise_variance = detail::get_or<double>(j, "noise_variance", 0.0);
  m.n_obs = detail::get_or<std::size_t>(j, "n_obs", 0);
  m.pooled = detail::get_or<bool>(j, "pooled", false);
  if (j.contains("covariance")) {
    const auto cov = matrix_from_json(j.at("covariance"), "covariance");
    if (cov.rows() != 2 || cov.cols() != 2) throw InputError("covariance must be 2 x 2");
    m.covariance = {{{cov(0, 0), cov(0, 1)}, {cov(1, 0), cov(1, 1)}}};
  }
  if (!(m.noise_variance >= 0.0)) throw InputError("noise_variance must be >= 0");
  return m;
}

inline ModelMap models_from_json(const json& j) {
  if (!j.is_object()) throw InputError("models document must be an object keyed by station id");
  ModelMap out;
  for (const auto& [id, v] : j.items()) out.emplace(id, model_from_json(id, v));
  return out;
}

// ---- observations and profiles --------------------------------------------

inline json to_json(std::span<const DemandObservation> obs) {
  json out = json::array();
  for (const auto& o : obs) {
    out.push_back(
        {{"station_id", o.station_id}, {"slot", o.slot_index}, {"price", o.price}, {"demand", o.demand}});
  }
  return out;
}

inline std::vector<DemandObservation> observations_from_json(const json& j) {
  if (!j.is_array()) throw InputError("observations must be a JSON array");
  std::vector<DemandObservation> out;
  out.reserve(j.size());
  for (const auto& o : j) {
    out.push_back({detail::require<std::string>(o, "station_id"),
                   detail::get_or<std::size_t>(o, "slot", 0), detail::require<double>(o, "price"),
                   detail::require<double>(o, "demand")});
  }
  return out;
}

inline json to_json(const DemandProfile& p, const SlotGrid& grid) {
  return {{"slots_per_day", grid.slots_per_day},
          {"slot_minutes", grid.slot_minutes},
          {"days", p.days},
          {"station_ids", p.station_ids},
          {"kwh", to_json(p.kwh)}};
}

inline DemandProfile profile_from_json(const json& j) {
  DemandProfile p;
  p.station_ids = detail::require<std::vector<std::string>>(j, "station_ids");
  p.kwh = matrix_from_json(detail::require<json>(j, "kwh"), "kwh");
  p.days = detail::get_or<std::size_t>(j, "days", 1);
  if (p.kwh.rows() != p.station_ids.size()) throw InputError("profile rows != station count");
  return p;
}

// ---- ToU and GA configuration ---------------------------------------------

inline json to_json(const TouSchedule& t) {
  return {{"peak_slots", t.peak_slots},
          {"offpeak_slots", t.offpeak_slots},
          {"prices", {{"peak", t.peak_price}, {"normal", t.normal_price}, {"offpeak", t.offpeak_price}}}};
}

// Missing keys keep the grid defaults.
inline TouSchedule tou_from_json(const json& j, const SlotGrid& grid) {
  TouSchedule t = TouSchedule::defaults(grid);
  if (j.contains("peak_slots")) t.peak_slots = j.at("peak_slots").get<std::set<std::size_t>>();
  if (j.contains("offpeak_slots")) {
    t.offpeak_slots = j.at("offpeak_slots").get<std::set<std::size_t>>();
  }
  if (j.contains("prices")) {
    const auto& p = j.at("prices");
    t.peak_price = detail::get_or<double>(p, "peak", t.peak_price);
    t.normal_price = detail::get_or<double>(p, "normal", t.normal_price);
    t.offpeak_price = detail::get_or<double>(p, "offpeak", t.offpeak_price);
  }
  return t;
}

inline json to_json(const moo::GaConfig& c) {
  json j = {{"population", c.population},
            {"generations", c.generations},
            {"crossover_prob", c.crossover_prob},
            {"sbx_eta", c.sbx_eta},
            {"mutation_eta", c.mutation_eta},
            {"seed", c.seed}};
  j["mutation_prob"] = c.mutation_prob ? json(*c.mutation_prob) : json(nullptr);
  return j;
}

inline moo::GaConfig ga_config_from_json(const json& j, moo::GaConfig base) {
  base.population = detail::get_or<std::size_t>(j, "population", base.population);
  base.generations = detail::get_or<std::size_t>(j, "generations", base.generations);
  base.crossover_prob = detail::get_or<double>(j, "crossover_prob", base.crossover_prob);
  base.sbx_eta = detail::get_or<double>(j, "sbx_eta", base.sbx_eta);
  base.mutation_eta = detail::get_or<double>(j, "mutation_eta", base.mutation_eta);
  if (j.contains("mutation_prob") && !j.at("mutation_prob").is_null()) {
    base.mutation_prob = detail::require<double>(j, "mutation_prob");
  }
  base.validate();
  return base;
}

inline json to_json(const FitConfig& c) {
  return {{"prior_mean", {c.prior_log_a, c.prior_c}},
          {"prior_precision", c.prior_precision},
          {"min_obs_per_station", c.min_obs_per_station}};
}

inline FitConfig fit_config_from_json(const json& j, FitConfig base = {}) {
  if (j.contains("prior_mean")) {
    const auto pm = j.at("prior_mean").get<std::vector<double>>();
    if (pm.size() != 2) throw InputError("prior_mean must be [log_a0, c0]");
    base.prior_log_a = pm[0];
    base.prior_c = pm[1];
  }
  base.prior_precision = detail::get_or<double>(j, "prior_precision", base.prior_precision);
  base.min_obs_per_station =
      detail::get_or<std::size_t>(j, "min_obs_per_station", base.min_obs_per_station);
  base.validate();
  return base;
}

// ---- scenario --------------------------------------------------------------

// A scenario file plus the optional pieces that travel with it.
struct ScenarioFile {
  Scenario scenario;                            // models may be empty until fitted
  std::vector<DemandObservation> observations;  // fit input, if provided
  std::optional<TouSchedule> tou;
  std::optional<double> sp_price;
};

inline json to_json(const Scenario& s, const std::vector<DemandObservation>* observations = nullptr,
                    const TouSchedule* tou = nullptr, std::optional<double> sp_price = {}) {
  json j = {{"station_ids", s.station_ids},
            {"slots_per_day", s.grid.slots_per_day},
            {"slot_minutes", s.grid.slot_minutes},
            {"p_min", s.p_min},
            {"p_max", s.p_max},
            {"p_ref", s.p_ref},
            {"revenue_mode", s.revenue_mode == RevenueMode::kCapped ? "capped" : "literal"},
            {"capacity", to_json(s.capacity)},
            {"base_profile", to_json(s.base_profile)}};
  if (!s.models.empty()) {
    json models = json::object();
    for (const auto& m : s.models) models[m.station_id] = to_json(m);
    j["models"] = std::move(models);
  }
  if (observations) j["observations"] = to_json(*observations);
  if (tou) j["tou"] = to_json(*tou);
  if (sp_price) j["sp_price"] = *sp_price;
  return j;
}

// Attaches models to the scenario in station order; every station needs one.
inline void attach_models(Scenario& s, const ModelMap& models) {
  s.models.clear();
  for (const auto& id : s.station_ids) {
    const auto it = models.find(id);
    if (it == models.end()) throw InputError("no demand model for station '" + id + "'");
    s.models.push_back(it->second);
  }
}

// Reads a scenario document. Relative "models_file" / "observations_file"
// paths resolve against `base_dir`.
inline ScenarioFile scenario_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  ScenarioFile f;
  Scenario& s = f.scenario;
  s.station_ids = detail::require<std::vector<std::string>>(j, "station_ids");
  s.grid.slots_per_day = detail::get_or<int>(j, "slots_per_day", 96);
  s.grid.slot_minutes = detail::get_or<int>(j, "slot_minutes", kMinutesPerDay / s.grid.slots_per_day);
  s.p_min = detail::get_or<double>(j, "p_min", 0.01);
  s.p_max = detail::require<double>(j, "p_max");
  s.p_ref = detail::require<double>(j, "p_ref");
  const auto mode = detail::get_or<std::string>(j, "revenue_mode", "capped");
  if (mode == "capped") {
    s.revenue_mode = RevenueMode::kCapped;
  } else if (mode == "literal") {
    s.revenue_mode = RevenueMode::kLiteral;
  } else {
    throw InputError("revenue_mode must be 'capped' or 'literal'");
  }
  s.capacity = matrix_from_json(detail::require<json>(j, "capacity"), "capacity");
  s.base_profile = matrix_from_json(detail::require<json>(j, "base_profile"), "base_profile");

  if (j.contains("models")) {
    attach_models(s, models_from_json(j.at("models")));
  } else if (j.contains("models_file")) {
    attach_models(s, models_from_json(read_json_file(base_dir / detail::require<std::string>(j, "models_file"))));
  }
  if (j.contains("observations")) {
    f.observations = observations_from_json(j.at("observations"));
  } else if (j.contains("observations_file")) {
    f.observations = observations_from_json(
        read_json_file(base_dir / detail::require<std::string>(j, "observations_file")));
  }
  if (j.contains("tou")) f.tou = tou_from_json(j.at("tou"), s.grid);
  if (j.contains("sp_price")) f.sp_price = detail::require<double>(j, "sp_price");

  s.grid.validate();
  if (s.models.empty() && f.observations.empty()) {
    throw InputError("scenario needs either demand models or observations to fit them from");
  }
  if (!s.models.empty()) s.validate();
  return f;
}

inline ScenarioFile load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

// ---- Pareto sets and selections -------------------------------------------

inline json to_json(const ParetoSet& front) {
  json out = json::array();
  for (const auto& m : front.members) {
    const auto flat = m.schedule.prices().flat();
    out.push_back({{"genome", std::vector<double>(flat.begin(), flat.end())},
                   {"revenue", m.objectives.revenue},
                   {"qos", m.objectives.qos},
                   {"par", m.objectives.par}});
  }
  return out;
}

// Genomes are reshaped to n_stations x n_slots when a scenario is known;
// otherwise each schedule is a single row.
inline ParetoSet pareto_set_from_json(const json& j, const Scenario* s = nullptr) {
  if (!j.is_array()) throw InputError("front must be a JSON array");
  ParetoSet out;
  for (const auto& m : j) {
    const auto genome = detail::require<std::vector<double>>(m, "genome");
    const std::size_t rows = s ? s->n_stations() : 1;
    const std::size_t cols = s ? s->n_slots() : genome.size();
    out.members.push_back({PriceSchedule::from_genome(genome, rows, cols),
                           {detail::require<double>(m, "revenue"), detail::require<double>(m, "qos"),
                            detail::require<double>(m, "par")}});
  }
  return out;
}

inline json to_json(const ObjectiveTriple& t) {
  return {{"revenue", t.revenue}, {"qos", t.qos}, {"par", t.par}};
}

inline json selection_report(const ParetoSet& front, std::size_t selected,
                             const ImportanceVector& importance) {
  const auto w = pseudo_weights(front);
  return {{"selected_index", selected},
          {"pseudo_weights", w[selected]},
          {"importance", importance.weights()},
          {"objectives_raw", to_json(front.members[selected].objectives)}};
}

// ---- run log ---------------------------------------------------------------

// generation,best_revenue,best_qos,best_par,front_size for pricing runs.
inline std::string run_log_csv(const moo::RunLog& log) {
  std::ostringstream out;
  out.precision(17);
  out << "generation,best_revenue,best_qos,best_par,front_size\n";
  for (const auto& g : log.generations) {
    out << g.generation << ',' << -g.best[0] << ',' << -g.best[1] << ',' << g.best[2] << ','
        << g.front_size << '\n';
  }
  return out.str();
}

}  // namespace evprice::io
