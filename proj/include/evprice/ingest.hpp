#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evprice/demand_model.hpp"
#include "evprice/error.hpp"
#include "evprice/grid.hpp"
#include "evprice/matrix.hpp"
#include "evprice/observation.hpp"
#include "evprice/scenario.hpp"

namespace evprice {

// One charging session. Times are wall-clock minutes since 1970-01-01, so
// floor(t / 1440) is the calendar day and the remainder the minute of day.
struct SessionRecord {
  std::string station_id;
  double connect_minute = 0.0;
  double disconnect_minute = 0.0;
  double energy_kwh = 0.0;
};

struct SessionLoad {
  std::vector<SessionRecord> sessions;
  std::size_t warning_count = 0;
  std::vector<std::string> warnings;
};

// Per-station mean demand on the slot grid, averaged over the distinct days
// present in the data.
struct DemandProfile {
  std::vector<std::string> station_ids;
  Matrix kwh;  // stations x slots
  std::size_t days = 0;
};

enum class Aggregation { kPerStation, kSiteWide };

inline constexpr const char* kSiteStationId = "site";

namespace detail {

// Parses ISO-8601 ("2018-04-25T11:08:04Z", "2018-04-25 11:08:04.5-07:00",
// "2018-04-25T11:08") and the RFC 1123 form the ACN API emits
// ("Wed, 25 Apr 2018 11:08:04 GMT"). Offsets are ignored: the wall clock as
// written is what places a session on the slot grid.
inline std::optional<double> parse_timestamp(std::string_view text) {
  std::string s(text);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0;
  double second = 0.0;

  auto to_minutes = [&]() -> std::optional<double> {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                             std::chrono::day{unsigned(day)}};
    if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 ||
        second >= 61) {
      return std::nullopt;
    }
    const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days_since_epoch) * kMinutesPerDay + hour * 60.0 + minute +
           second / 60.0;
  };

  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d%n", &year, &month, &day, &hour, &minute,
                  &consumed) == 5) {
    std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest.front() == ':') {
      std::size_t i = 1;
      while (i < rest.size() && (std::isdigit(static_cast<unsigned char>(rest[i])) ||
                                 rest[i] == '.')) {
        ++i;
      }
      try {
        second = std::stod(std::string(rest.substr(1, i - 1)));
      } catch (const std::exception&) {
        return std::nullopt;
      }
      rest.remove_prefix(i);
    }
    // Remaining text may only be a zone designator.
    if (!rest.empty() && rest != "Z" && rest.front() != '+' && rest.front() != '-') {
      return std::nullopt;
    }
    return to_minutes();
  }

  std::istringstream in(s);
  in.imbue(std::locale::classic());
  std::tm tm{};
  in >> std::get_time(&tm, "%a, %d %b %Y %H:%M:%S");
  if (!in.fail()) {
    year = tm.tm_year + 1900;
    month = tm.tm_mon + 1;
    day = tm.tm_mday;
    hour = tm.tm_hour;
    minute = tm.tm_min;
    second = tm.tm_sec;
    return to_minutes();
  }
  return std::nullopt;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Raw, untyped view of one row before validation.
struct RawSession {
  std::optional<std::string> station, connect, disconnect;
  std::optional<double> energy;
};

inline std::optional<double> parse_number(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::vector<RawSession> raw_rows_from_json(const nlohmann::json& doc) {
  const nlohmann::json* items = &doc;
  if (doc.is_object() && doc.contains("_items")) items = &doc.at("_items");
  if (!items->is_array()) {
    throw InputError("session JSON must be an array (or an object with \"_items\")");
  }
  std::vector<RawSession> rows;
  for (const auto& item : *items) {
    RawSession r;
    if (item.is_object()) {
      if (auto it = item.find("stationID"); it != item.end() && it->is_string()) {
        r.station = it->get<std::string>();
      }
      if (auto it = item.find("connectionTime"); it != item.end() && it->is_string()) {
        r.connect = it->get<std::string>();
      }
      if (auto it = item.find("disconnectTime"); it != item.end() && it->is_string()) {
        r.disconnect = it->get<std::string>();
      }
      if (auto it = item.find("kWhDelivered"); it != item.end() && it->is_number()) {
        r.energy = it->get<double>();
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<RawSession> raw_rows_from_csv(std::istream& in) {
  std::string line;
  std::vector<RawSession> rows;
  if (!std::getline(in, line)) return rows;
  const auto header = split_csv_line(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto c_station = column("stationID");
  const auto c_connect = column("connectionTime");
  const auto c_disconnect = column("disconnectTime");
  const auto c_energy = column("kWhDelivered");
  if (!c_station || !c_connect || !c_disconnect || !c_energy) {
    throw InputError(
        "session CSV header must contain stationID, connectionTime, disconnectTime, "
        "kWhDelivered");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    RawSession r;
    auto cell = [&](std::size_t i) -> std::optional<std::string> {
      if (i < cells.size() && !cells[i].empty()) return cells[i];
      return std::nullopt;
    };
    r.station = cell(*c_station);
    r.connect = cell(*c_connect);
    r.disconnect = cell(*c_disconnect);
    if (auto e = cell(*c_energy)) r.energy = parse_number(*e);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

// Loads sessions in the ACN schema from JSON or CSV. Rows that fail
// validation are skipped and reported through SessionLoad::warnings.
inline SessionLoad load_sessions(const std::string& path, const SlotGrid& grid = {}) {
  grid.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read session file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  const bool is_csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  std::vector<detail::RawSession> rows;
  if (first == std::string::npos) {
    // empty file: falls through to the zero-rows error
  } else if (!is_csv && (text[first] == '[' || text[first] == '{')) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("session file '" + path + "' is not valid JSON: " + e.what());
    }
    rows = detail::raw_rows_from_json(doc);
  } else {
    std::istringstream csv(text);
    rows = detail::raw_rows_from_csv(csv);
  }

  SessionLoad out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto warn = [&](const std::string& why) {
      ++out.warning_count;
      out.warnings.push_back("row " + std::to_string(i + 1) + ": " + why);
    };
    if (!r.station || !r.connect || !r.disconnect || !r.energy) {
      warn("missing or mistyped field");
      continue;
    }
    const auto t0 = detail::parse_timestamp(*r.connect);
    const auto t1 = detail::parse_timestamp(*r.disconnect);
    if (!t0 || !t1) {
      warn("unparseable timestamp");
      continue;
    }
    if (!(*t1 > *t0)) {
      warn("disconnect does not follow connect");
      continue;
    }
    if (!(*r.energy >= 0.0) || !std::isfinite(*r.energy)) {
      warn("negative or non-finite energy");
      continue;
    }
    out.sessions.push_back({*r.station, *t0, *t1, *r.energy});
  }
  if (out.sessions.empty()) throw InputError("zero valid rows in '" + path + "'");
  return out;
}

// Spreads each session's energy over the slots it overlaps, proportional to
// overlap minutes, then averages each slot-of-day over the distinct days on
// which any session was connected.
inline DemandProfile slot_demand(std::span<const SessionRecord> sessions, const SlotGrid& grid,
                                 Aggregation mode = Aggregation::kPerStation) {
  grid.validate();
  if (sessions.empty()) throw InputError("slot_demand: no sessions");

  const std::size_t t_count = grid.size();
  const double width = grid.slot_minutes;
  std::map<std::string, std::vector<double>> sums;
  std::set<std::int64_t> days;

  for (const auto& s : sessions) {
    if (!(s.disconnect_minute > s.connect_minute) || !(s.energy_kwh >= 0.0)) {
      throw InputError("slot_demand: invalid session for station '" + s.station_id + "'");
    }
    const std::string& key = mode == Aggregation::kSiteWide ? std::string(kSiteStationId)
                                                            : s.station_id;
    auto& acc = sums.try_emplace(key, t_count, 0.0).first->second;
    const double rate = s.energy_kwh / (s.disconnect_minute - s.connect_minute);
    double t = s.connect_minute;
    while (t < s.disconnect_minute) {
      const auto abs_slot = static_cast<std::int64_t>(std::floor(t / width));
      const double slot_end = static_cast<double>(abs_slot + 1) * width;
      const double seg_end = std::min(slot_end, s.disconnect_minute);
      const auto day = abs_slot >= 0 ? abs_slot / grid.slots_per_day
                                     : (abs_slot - grid.slots_per_day + 1) / grid.slots_per_day;
      const auto slot = static_cast<std::size_t>(abs_slot - day * grid.slots_per_day);
      acc[slot] += rate * (seg_end - t);
      days.insert(day);
      t = seg_end;
    }
  }

  DemandProfile out;
  out.days = days.size();
  out.kwh = Matrix(sums.size(), t_count);
  std::size_t row = 0;
  for (const auto& [id, acc] : sums) {
    out.station_ids.push_back(id);
    for (std::size_t t = 0; t < t_count; ++t) {
      out.kwh(row, t) = acc[t] / static_cast<double>(out.days);
    }
    ++row;
  }
  return out;
}

// One observation per (station, slot) where both price and demand are
// positive. Row i of `prices` is paired with profile.station_ids[i].
inline std::vector<DemandObservation> pair_with_prices(const DemandProfile& profile,
                                                       const PriceSchedule& prices) {
  if (!profile.kwh.same_shape(prices.prices())) {
    throw InputError("pair_with_prices: price schedule is " + std::to_string(prices.n_stations()) +
                     " x " + std::to_string(prices.n_slots()) + " but demand profile is " +
                     std::to_string(profile.kwh.rows()) + " x " +
                     std::to_string(profile.kwh.cols()));
  }
  std::vector<DemandObservation> out;
  for (std::size_t cs = 0; cs < profile.kwh.rows(); ++cs) {
    for (std::size_t t = 0; t < profile.kwh.cols(); ++t) {
      const double p = prices(cs, t);
      const double d = profile.kwh(cs, t);
      if (p > 0.0 && d > 0.0) out.push_back({profile.station_ids[cs], t, p, d});
    }
  }
  if (out.empty()) throw InputError("pair_with_prices: no slot has positive price and demand");
  return out;
}

// Ground truth for one synthetic station: demand = a * P^c * exp(N(0, sigma^2)).
struct StationTruth {
  double a = 10.0;
  double c = -1.0;
  double sigma = 0.0;
};

// Draws one observation per price in `prices` (slot index = position) from
// the seeded generator.
inline std::vector<DemandObservation> synth_observations(const std::string& station_id,
                                                         const StationTruth& truth,
                                                         std::span<const double> prices,
                                                         std::mt19937_64& rng) {
  if (!(truth.a > 0.0) || !(truth.sigma >= 0.0)) {
    throw InputError("synthetic truth requires a > 0 and sigma >= 0");
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<DemandObservation> out;
  out.reserve(prices.size());
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0)) throw InputError("synthetic price history must be > 0");
    const double eps = truth.sigma * noise(rng);
    out.push_back({station_id, t, prices[t], truth.a * std::pow(prices[t], truth.c) * std::exp(eps)});
  }
  return out;
}

struct SynthOptions {
  std::size_t n_stations = 1;
  SlotGrid grid;
  std::vector<StationTruth> truth;  // one per station
  PriceSchedule price_history;      // n_stations x T, all > 0
  std::uint64_t seed = 0;
  double p_min = 0.01;
  double p_max = 1.0;
  double p_ref = 0.3;
  // Per-slot multiplier applied to the expected demand at p_ref to form the
  // base profile. Empty means flat.
  std::vector<double> traffic_shape;
  // Capacity per station = factor x that station's peak base demand.
  double capacity_factor = 1.0;
};

struct SyntheticData {
  Scenario scenario;
  std::vector<DemandObservation> observations;
};

inline std::string synth_station_id(std::size_t i) {
  std::string n = std::to_string(i + 1);
  if (n.size() < 2) n.insert(0, "0");
  return "CS-" + n;
}

// Builds a scenario whose models are the ground truth, together with noisy
// observations drawn at the historical prices.
inline SyntheticData synth_scenario(const SynthOptions& opt) {
  opt.grid.validate();
  const std::size_t n = opt.n_stations;
  const std::size_t t_count = opt.grid.size();
  if (n == 0) throw InputError("synth_scenario: need at least one station");
  if (opt.truth.size() != n) throw InputError("synth_scenario: need one truth per station");
  if (opt.price_history.n_stations() != n || opt.price_history.n_slots() != t_count) {
    throw InputError("synth_scenario: price history shape mismatch");
  }
  if (!opt.traffic_shape.empty() && opt.traffic_shape.size() != t_count) {
    throw InputError("synth_scenario: traffic shape must have one entry per slot");
  }

  std::mt19937_64 rng(opt.seed);
  SyntheticData out;
  Scenario& s = out.scenario;
  s.grid = opt.grid;
  s.p_min = opt.p_min;
  s.p_max = opt.p_max;
  s.p_ref = opt.p_ref;
  s.capacity = Matrix(n, t_count);
  s.base_profile = Matrix(n, t_count);

  for (std::size_t cs = 0; cs < n; ++cs) {
    const std::string id = synth_station_id(cs);
    const StationTruth& truth = opt.truth[cs];
    s.station_ids.push_back(id);

    DemandModelPosterior model;
    model.station_id = id;
    model.log_a_mean = std::log(truth.a);
    model.c_mean = truth.c;
    model.noise_variance = truth.sigma * truth.sigma;
    model.n_obs = t_count;
    s.models.push_back(model);

    const double at_ref = predict_demand(model, opt.p_ref);
    double peak = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      const double shape = opt.traffic_shape.empty() ? 1.0 : opt.traffic_shape[t];
      s.base_profile(cs, t) = at_ref * shape;
      peak = std::max(peak, s.base_profile(cs, t));
    }
    for (std::size_t t = 0; t < t_count; ++t) s.capacity(cs, t) = opt.capacity_factor * peak;

    auto obs = synth_observations(id, truth, opt.price_history.prices().row(cs), rng);
    out.observations.insert(out.observations.end(), std::make_move_iterator(obs.begin()),
                            std::make_move_iterator(obs.end()));
  }
  s.validate();
  return out;
}

}  // namespace evprice
