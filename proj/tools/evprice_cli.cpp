// evprice: command-line front end for the dynamic pricing pipeline.
//
// Exit codes: 0 success, 2 user/input error, 1 internal error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evprice/evprice.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

std::vector<double> parse_csv_doubles(const std::string& text, std::size_t expected,
                                      const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw evprice::InputError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected) {
    throw evprice::InputError(std::string(flag) + " expects " + std::to_string(expected) +
                              " comma-separated values");
  }
  return out;
}

evprice::ImportanceVector parse_importance(const std::string& text) {
  const auto w = parse_csv_doubles(text, 3, "--importance");
  return {w[0], w[1], w[2]};
}

void emit(const std::optional<fs::path>& out, const json& doc) {
  if (out) {
    evprice::io::write_json_file(*out, doc);
  } else {
    std::cout << doc.dump(2) << '\n';
  }
}

// Models come from the scenario, or are fitted from its observations.
evprice::Scenario resolve_scenario(evprice::io::ScenarioFile file, const evprice::FitConfig& fit) {
  if (!file.observations.empty()) {
    evprice::io::attach_models(file.scenario, evprice::fit(file.observations, fit));
  }
  file.scenario.validate();
  return std::move(file.scenario);
}

struct IngestArgs {
  std::string sessions;
  int slots = 96;
  bool site_wide = false;
  std::optional<fs::path> out;
  std::optional<double> history_price;
  bool history_tou = false;
  std::optional<fs::path> observations_out;
};

int cmd_ingest(const IngestArgs& a) {
  const auto grid = evprice::SlotGrid::from_slots(a.slots);
  const auto load = evprice::load_sessions(a.sessions, grid);
  if (load.warning_count > 0) {
    std::cerr << "warning: skipped " << load.warning_count << " malformed row(s)\n";
    for (const auto& w : load.warnings) std::cerr << "  " << w << '\n';
  }
  const auto profile = evprice::slot_demand(
      load.sessions, grid,
      a.site_wide ? evprice::Aggregation::kSiteWide : evprice::Aggregation::kPerStation);
  emit(a.out, evprice::io::to_json(profile, grid));

  if (a.history_price || a.history_tou) {
    evprice::PriceSchedule history(profile.station_ids.size(), grid.size(),
                                   a.history_price.value_or(0.0));
    if (a.history_tou) {
      const auto tou = evprice::TouSchedule::defaults(grid);
      for (std::size_t t = 0; t < grid.size(); ++t) {
        for (std::size_t cs = 0; cs < history.n_stations(); ++cs) history(cs, t) = tou.price(t);
      }
    }
    const auto obs = evprice::pair_with_prices(profile, history);
    if (!a.observations_out) throw evprice::InputError("--observations-out is required with a price history");
    evprice::io::write_json_file(*a.observations_out, evprice::io::to_json(obs));
  }
  return kExitOk;
}

struct FitArgs {
  std::string observations;
  std::optional<fs::path> out;
  std::optional<double> prior_precision;
  std::optional<std::string> prior_mean;
  std::optional<std::size_t> min_obs;
};

int cmd_fit(const FitArgs& a) {
  evprice::FitConfig cfg;
  if (a.prior_precision) cfg.prior_precision = *a.prior_precision;
  if (a.prior_mean) {
    const auto pm = parse_csv_doubles(*a.prior_mean, 2, "--prior-mean");
    cfg.prior_log_a = pm[0];
    cfg.prior_c = pm[1];
  }
  if (a.min_obs) cfg.min_obs_per_station = *a.min_obs;
  const auto obs = evprice::io::observations_from_json(evprice::io::read_json_file(a.observations));
  emit(a.out, evprice::io::to_json(evprice::fit(obs, cfg)));
  return kExitOk;
}

struct OptimizeArgs {
  fs::path scenario;
  std::optional<fs::path> config;
  std::string engine = "nsga2";
  std::uint64_t seed = 0;
  std::optional<std::size_t> population;
  std::optional<std::size_t> generations;
  fs::path out = "out";
};

int cmd_optimize(const OptimizeArgs& a) {
  auto file = evprice::io::load_scenario(a.scenario);
  evprice::ExperimentConfig cfg;
  if (a.config) {
    cfg = evprice::experiment_config_from_json(evprice::io::read_json_file(*a.config),
                                               file.scenario.grid);
  }
  const auto engine = evprice::parse_engine(a.engine);
  const auto scenario = resolve_scenario(std::move(file), cfg.fit);
  auto ga = engine == evprice::Engine::kNsga2 ? cfg.nsga2 : cfg.nsga3;
  if (a.population) ga.population = *a.population;
  if (a.generations) ga.generations = *a.generations;
  ga.seed = a.seed;

  evprice::moo::RunLog log;
  auto front = evprice::optimize(scenario, engine, ga, &log, cfg.partitions);
  evprice::compute_pseudo_weights(front);
  evprice::io::write_json_file(a.out / "front.json", evprice::io::to_json(front));
  evprice::io::write_text_file(a.out / "runlog.csv", evprice::io::run_log_csv(log));
  for (const auto& note : log.notes) std::cerr << "note: " << note << '\n';
  std::cerr << "front size " << front.size() << " written to " << (a.out / "front.json").string()
            << '\n';
  return kExitOk;
}

struct SelectArgs {
  fs::path front;
  std::string importance = "1,1,1";
  std::optional<fs::path> out;
};

int cmd_select(const SelectArgs& a) {
  const auto front = evprice::io::pareto_set_from_json(evprice::io::read_json_file(a.front));
  if (front.empty()) throw evprice::InputError("front '" + a.front.string() + "' is empty");
  const auto importance = parse_importance(a.importance);
  const std::size_t chosen = evprice::select(front, importance);
  emit(a.out, evprice::io::selection_report(front, chosen, importance));
  return kExitOk;
}

struct BaselineArgs {
  fs::path scenario;
  std::string kind = "sp";
  std::optional<double> price;
  std::optional<fs::path> out;
};

int cmd_baseline(const BaselineArgs& a) {
  auto file = evprice::io::load_scenario(a.scenario);
  const auto tou_sched = file.tou ? *file.tou : evprice::TouSchedule::defaults(file.scenario.grid);
  const double sp_price = a.price ? *a.price : file.sp_price.value_or(file.scenario.p_ref);
  const auto scenario = resolve_scenario(std::move(file), {});
  const auto schedule =
      a.kind == "sp" ? evprice::stationary(scenario, sp_price) : evprice::tou(scenario, tou_sched);
  emit(a.out, {{"kind", a.kind},
               {"prices", evprice::io::to_json(schedule.prices())},
               {"objectives", evprice::io::to_json(evprice::evaluate(scenario, schedule))}});
  return kExitOk;
}

struct ReportArgs {
  fs::path scenario;
  std::optional<fs::path> config;
  std::uint64_t seed = 0;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> generations;
  fs::path out = "report";
};

int cmd_report(const ReportArgs& a) {
  auto inputs = evprice::prepare_inputs(a.scenario, a.config, a.seed);
  if (a.runs) {
    if (*a.runs < 1) throw evprice::InputError("--runs must be >= 1");
    inputs.config.runs = *a.runs;
  }
  if (a.generations) {
    inputs.config.nsga2.generations = *a.generations;
    inputs.config.nsga3.generations = *a.generations;
  }
  if (a.runs || a.generations) inputs.config_hash = evprice::config_hash(inputs.config);
  const auto result = evprice::run_experiment(std::move(inputs));
  evprice::write_report_dir(a.out, result);
  std::cerr << "report written to " << a.out.string() << '\n';
  return kExitOk;
}

int cmd_synth(const std::optional<fs::path>& out) {
  const auto data = evprice::synth_scenario(evprice::elastic_demo_options());
  auto scenario = data.scenario;
  scenario.models.clear();  // the pipeline fits them from the observations
  const auto tou = evprice::TouSchedule::defaults(scenario.grid);
  emit(out, evprice::io::to_json(scenario, &data.observations, &tou, scenario.p_ref));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic EV charging-station pricing: fit, optimize, select, report"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Aggregate charging sessions onto the slot grid");
  c_ingest->add_option("sessions", ingest.sessions, "Session file (ACN JSON or CSV)")->required();
  c_ingest->add_option("--slots", ingest.slots, "Slots per day")->capture_default_str();
  c_ingest->add_flag("--site-wide", ingest.site_wide, "Aggregate all stations into one site profile");
  c_ingest->add_option("--out", ingest.out, "Profile JSON (stdout if omitted)");
  auto* hp = c_ingest->add_option("--history-price", ingest.history_price,
                                  "Pair demand with this stationary historical price");
  c_ingest->add_flag("--history-tou", ingest.history_tou, "Pair demand with the default ToU tariff")
      ->excludes(hp);
  c_ingest->add_option("--observations-out", ingest.observations_out,
                       "Where to write the (price, demand) observations");

  FitArgs fit_args;
  auto* c_fit = app.add_subcommand("fit", "Fit per-station demand-price models");
  c_fit->add_option("observations", fit_args.observations, "Observations JSON")->required();
  c_fit->add_option("--out", fit_args.out, "Models JSON (stdout if omitted)");
  c_fit->add_option("--prior-precision", fit_args.prior_precision, "Isotropic prior precision");
  c_fit->add_option("--prior-mean", fit_args.prior_mean, "Prior mean 'log_a,c'");
  c_fit->add_option("--min-obs", fit_args.min_obs, "Minimum observations before pooling");

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "Evolve a Pareto front of price schedules");
  c_opt->add_option("--scenario", opt.scenario, "Scenario JSON")->required();
  c_opt->add_option("--config", opt.config, "Experiment config JSON");
  c_opt->add_option("--engine", opt.engine, "nsga2 or nsga3")
      ->check(CLI::IsMember({"nsga2", "nsga3"}))
      ->capture_default_str();
  c_opt->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  c_opt->add_option("--population", opt.population, "Population size override");
  c_opt->add_option("--generations", opt.generations, "Generation count override");
  c_opt->add_option("--out", opt.out, "Output directory")->capture_default_str();

  SelectArgs sel;
  auto* c_sel = app.add_subcommand("select", "Pick one schedule from a front by pseudo-weights");
  c_sel->add_option("front", sel.front, "Front JSON")->required();
  c_sel->add_option("--importance", sel.importance, "Importance 'revenue,qos,par'")
      ->capture_default_str();
  c_sel->add_option("--out", sel.out, "Selection JSON (stdout if omitted)");

  BaselineArgs base;
  auto* c_base = app.add_subcommand("baseline", "Evaluate a stationary or time-of-use schedule");
  c_base->add_option("--scenario", base.scenario, "Scenario JSON")->required();
  c_base->add_option("--kind", base.kind, "sp or tou")
      ->check(CLI::IsMember({"sp", "tou"}))
      ->capture_default_str();
  c_base->add_option("--price", base.price, "Stationary price (default: scenario sp_price or p_ref)");
  c_base->add_option("--out", base.out, "Output JSON (stdout if omitted)");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Run the full comparison and write the report directory");
  c_rep->add_option("--scenario", rep.scenario, "Scenario JSON")->required();
  c_rep->add_option("--config", rep.config, "Experiment config JSON");
  c_rep->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  c_rep->add_option("--runs", rep.runs, "Independent runs per engine");
  c_rep->add_option("--generations", rep.generations, "Generation count override for both engines");
  c_rep->add_option("--out", rep.out, "Output directory")->capture_default_str();

  std::optional<fs::path> synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write the bundled elastic synthetic scenario");
  c_synth->add_option("--out", synth_out, "Scenario JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest);
    if (c_fit->parsed()) return cmd_fit(fit_args);
    if (c_opt->parsed()) return cmd_optimize(opt);
    if (c_sel->parsed()) return cmd_select(sel);
    if (c_base->parsed()) return cmd_baseline(base);
    if (c_rep->parsed()) return cmd_report(rep);
    if (c_synth->parsed()) return cmd_synth(synth_out);
  } catch (const evprice::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
