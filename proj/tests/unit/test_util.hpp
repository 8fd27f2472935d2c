#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "evprice/evprice.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("evprice_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline evprice::DemandModelPosterior model(double a, double c, double noise = 0.0) {
  evprice::DemandModelPosterior m;
  m.log_a_mean = std::log(a);
  m.c_mean = c;
  m.noise_variance = noise;
  m.n_obs = 2;
  return m;
}

// n stations x t slots, every station with elasticity c; base and capacity
// constant unless overwritten by the caller.
inline evprice::Scenario small_scenario(std::size_t n, std::size_t t, double c, double base = 4.0,
                                        double cap = 100.0) {
  evprice::Scenario s;
  for (std::size_t i = 0; i < n; ++i) {
    s.station_ids.push_back("S" + std::to_string(i));
    auto m = model(1.0, c);
    m.station_id = s.station_ids.back();
    s.models.push_back(m);
  }
  s.grid = evprice::SlotGrid{static_cast<int>(t), 1440 / static_cast<int>(t)};
  s.capacity = evprice::Matrix(n, t, cap);
  s.base_profile = evprice::Matrix(n, t, base);
  return s;
}

}  // namespace testutil

namespace testutil {

// 2 stations on a 24-slot day with binding peaks; small enough for fast GA runs.
inline evprice::SyntheticData tiny_synthetic() {
  evprice::SynthOptions o;
  o.n_stations = 2;
  o.grid = evprice::SlotGrid{24, 60};
  o.truth = {{6.0, -1.2, 0.05}, {9.0, -1.1, 0.05}};
  o.seed = 3;
  o.p_min = 0.05;
  o.p_max = 1.0;
  o.p_ref = 0.3;
  o.capacity_factor = 0.8;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lp(std::log(0.1), std::log(0.8));
  evprice::Matrix h(2, 24);
  for (double& p : h.flat()) p = std::exp(lp(rng));
  o.price_history = evprice::PriceSchedule(std::move(h));
  for (int t = 0; t < 24; ++t) {
    o.traffic_shape.push_back(0.1 + std::exp(-0.5 * (t - 8) * (t - 8) / 2.0) +
                              0.8 * std::exp(-0.5 * (t - 18) * (t - 18) / 2.0));
  }
  return evprice::synth_scenario(o);
}

// Writes the tiny scenario (observations only, no models) plus a fast config.
inline void write_tiny_inputs(const std::filesystem::path& scenario, const std::filesystem::path& config) {
  auto d = tiny_synthetic();
  d.scenario.models.clear();
  const auto tou = evprice::TouSchedule::defaults(d.scenario.grid);
  evprice::io::write_json_file(scenario,
                               evprice::io::to_json(d.scenario, &d.observations, &tou, 0.3));
  evprice::ExperimentConfig cfg;
  cfg.nsga2.population = 20;
  cfg.nsga2.generations = 15;
  cfg.nsga3.population = 20;
  cfg.nsga3.generations = 15;
  cfg.partitions = 4;
  cfg.runs = 2;
  evprice::io::write_json_file(config, evprice::to_json(cfg));
}

}  // namespace testutil
