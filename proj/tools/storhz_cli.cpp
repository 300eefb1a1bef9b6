// storhz: command-line front end.
//
// Exit codes: 0 success, 1 infeasible, 2 input error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "storhz/horizon.hpp"
#include "storhz/io.hpp"
#include "storhz/rolling.hpp"
#include "storhz/solver.hpp"

namespace fs = std::filesystem;
using namespace storhz;

namespace {

struct Options {
  std::vector<std::string> configs;
  std::string prices;
  std::string out;
  std::string format = "csv";
  std::string strategy;
  std::string plan_terminal;
  std::string sh_policy;
  std::size_t H = 0;
  std::size_t T = 0;
  std::size_t t_max = 0;
  std::optional<double> s_end;
  bool per_day = false;
};

class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  void emit(const std::string& file, const std::string& content) {
    if (dir_.empty()) {
      std::cout << content;
      return;
    }
    const fs::path path = fs::path(dir_) / file;
    fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path.string());
    os << content;
  }

 private:
  std::string dir_;
};

bool json(const Options& o) { return o.format == "json"; }

RunConfig config_at(const Options& o, std::size_t i = 0) {
  if (o.configs.size() <= i) throw InputError("--config is required");
  RunConfig cfg = load_config(o.configs[i]);
  if (o.H) cfg.H = o.H;
  if (o.t_max) cfg.t_max = o.t_max;
  if (!o.sh_policy.empty()) cfg.sh_policy = parse_sh_policy(o.sh_policy);
  if (!o.strategy.empty()) cfg.strategy = o.strategy;
  if (!o.plan_terminal.empty()) cfg.pin_plan_end = o.plan_terminal == "pinned";
  return cfg;
}

PriceSeries prices_for(const Options& o, const RunConfig& cfg) {
  if (o.prices.empty()) throw InputError("--prices is required");
  return load_prices(o.prices, cfg.price_unit, cfg.spec.dt, cfg.price_floor, cfg.price_cap).series;
}

template <class F>
std::string text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

void cmd_solve(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const PriceSeries prices = prices_for(o, cfg);
  const std::size_t T = o.T ? o.T : prices.size();
  const PriceSeries window = prices.window(1, T);
  ScheduleResult res;
  if (o.s_end) {
    res = solve_fixed_terminal(cfg.spec, window, T, *o.s_end);
  } else {
    const ValueProfile forward = forward_values(cfg.spec, window, T);
    const PwlFunction& last = forward.at(T);
    const ArgmaxResult best = argmax_set(last, last.domain());
    res.terminal_soe = best.argmax.min();
    res.profit = last(res.terminal_soe);
    res.schedule = recover_schedule(cfg.spec, window, forward, res.terminal_soe, T);
  }
  if (json(o)) {
    sink.emit("solve.json", schedule_json(res, window));
  } else {
    sink.emit("schedule.csv", text([&](std::ostream& os) { write_schedule_csv(os, window, res.schedule); }));
  }
}

void cmd_bounds(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const std::size_t T = o.T ? o.T : cfg.t_max;
  if (json(o)) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t t = 1; t <= T; ++t) {
      const ReachableBounds b = reachable_bounds(cfg.spec, t);
      arr.push_back({{"T", t},
                     {"s_low_kwh", std::stod(fmt(b.s_low_T))},
                     {"s_high_kwh", std::stod(fmt(b.s_high_T))}});
    }
    sink.emit("bounds.json", arr.dump(2) + "\n");
  } else {
    sink.emit("bounds.csv", text([&](std::ostream& os) { write_bounds_csv(os, cfg.spec, T); }));
  }
}

void cmd_tmin(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const TminResult r = tmin(cfg.spec, cfg.H);
  const TminTerms terms = tmin_terms(cfg.spec, cfg.H, r.t_min);
  if (json(o)) {
    nlohmann::ordered_json j;
    j["H"] = cfg.H;
    j["t_min"] = r.t_min;
    j["found"] = r.found;
    j["capacity_sweep"] = std::stod(fmt(terms.capacity_sweep));
    j["empty_from_init"] = std::stod(fmt(terms.empty_from_init));
    j["fill_from_init"] = std::stod(fmt(terms.fill_from_init));
    sink.emit("tmin.json", j.dump(2) + "\n");
  } else {
    sink.emit("tmin.csv", "H,t_min,found,capacity_sweep,empty_from_init,fill_from_init\n" +
                              std::to_string(cfg.H) + "," + std::to_string(r.t_min) + "," +
                              (r.found ? "1" : "0") + "," + fmt(terms.capacity_sweep) + "," +
                              fmt(terms.empty_from_init) + "," + fmt(terms.fill_from_init) + "\n");
  }
}

void emit_report(const Options& o, Sink& sink, const std::string& stem, const HorizonReport& rep,
                 bool with_trace) {
  if (json(o)) {
    sink.emit(stem + ".json", report_json(rep));
    return;
  }
  sink.emit(stem + ".csv", text([&](std::ostream& os) { write_report_csv(os, rep); }));
  if (with_trace) sink.emit(stem + "_trace.csv", text([&](std::ostream& os) { write_trace_csv(os, rep); }));
}

void cmd_check(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const PriceSeries prices = prices_for(o, cfg);
  const std::size_t T = o.T ? o.T : std::min(cfg.planning_horizon, prices.size());
  emit_report(o, sink, "check", check_forecast_horizon(cfg.spec, prices, cfg.H, T), false);
}

void cmd_minfh(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const PriceSeries prices = prices_for(o, cfg);
  MinHorizonOptions options;
  options.policy = cfg.sh_policy;
  if (!o.per_day) {
    const std::size_t T_max = std::min(cfg.t_max, prices.size());
    emit_report(o, sink, "minfh", min_forecast_horizon(cfg.spec, prices, cfg.H, T_max, options), true);
    return;
  }
  const SimulationResult res = run_strategy(
      cfg.spec, prices, Strategy::forecast_horizon(cfg.H, cfg.t_max, cfg.target(), cfg.sh_policy));
  if (json(o)) {
    sink.emit("minfh_days.json", simulation_json(res));
  } else {
    sink.emit("minfh_days.csv", text([&](std::ostream& os) { write_days_csv(os, res); }));
  }
}

void cmd_bound(const Options& o, Sink& sink) {
  const RunConfig cfg = config_at(o);
  const PriceSeries prices = prices_for(o, cfg);
  const std::size_t T = o.T ? o.T : std::min(cfg.planning_horizon, prices.size());
  const SuboptimalityReport rep = suboptimality_bound(cfg.spec, prices, cfg.H, T, cfg.sh_policy);
  if (json(o)) {
    sink.emit("bound.json", subopt_json(rep));
  } else {
    sink.emit("bound.csv", text([&](std::ostream& os) { write_subopt_csv(os, rep); }));
  }
}

std::vector<Strategy> strategies_for(const RunConfig& cfg) {
  std::vector<Strategy> out;
  const std::string& s = cfg.strategy;
  if (s == "all" || s == "fixed_level") out.push_back(Strategy::fixed_level(cfg.H, cfg.target()));
  if (s == "all" || s == "fixed_horizon") {
    out.push_back(Strategy::fixed_horizon(cfg.H, cfg.planning_horizon, cfg.target(), cfg.pin_plan_end));
  }
  if (s == "all" || s == "forecast_horizon") {
    out.push_back(Strategy::forecast_horizon(cfg.H, cfg.t_max, cfg.target(), cfg.sh_policy));
  }
  if (out.empty()) throw InputError("unknown strategy '" + s + "'");
  return out;
}

void cmd_roll(const Options& o, Sink& sink) {
  if (o.configs.empty()) throw InputError("--config is required");
  for (std::size_t i = 0; i < o.configs.size(); ++i) {
    const RunConfig cfg = config_at(o, i);
    const PriceSeries prices = prices_for(o, cfg);
    std::vector<SimulationResult> results;
    for (const Strategy& s : strategies_for(cfg)) results.push_back(run_strategy(cfg.spec, prices, s));
    const auto rows = compare(results);
    const std::string dir = cfg.name + "/";
    if (json(o)) {
      sink.emit(dir + "comparison.json", comparison_json(rows));
      for (const auto& r : results) sink.emit(dir + "days_" + r.strategy + ".json", simulation_json(r));
    } else {
      sink.emit(dir + "comparison.csv", text([&](std::ostream& os) { write_comparison_csv(os, rows); }));
      for (const auto& r : results) {
        sink.emit(dir + "days_" + r.strategy + ".csv",
                  text([&](std::ostream& os) { write_days_csv(os, r); }));
        sink.emit(dir + "trajectory_" + r.strategy + ".csv",
                  text([&](std::ostream& os) { write_schedule_csv(os, prices, r.schedule); }));
      }
    }
  }
}

void cmd_fleet(const Options& o, Sink& sink) {
  if (o.configs.empty()) throw InputError("--config is required");
  std::vector<std::string> names;
  std::vector<SimulationResult> runs;
  for (std::size_t i = 0; i < o.configs.size(); ++i) {
    const RunConfig cfg = config_at(o, i);
    const PriceSeries prices = prices_for(o, cfg);
    names.push_back(cfg.name);
    runs.push_back(run_strategy(
        cfg.spec, prices, Strategy::forecast_horizon(cfg.H, cfg.t_max, cfg.target(), cfg.sh_policy)));
  }
  const auto days = fleet_binding_sequence(runs);
  if (json(o)) {
    sink.emit("fleet.json", binding_json(names, days));
  } else {
    sink.emit("fleet.csv", text([&](std::ostream& os) { write_binding_csv(os, names, days); }));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact storage scheduling and forecast-horizon detection"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool prices, bool multi_config) {
    if (multi_config) {
      sub->add_option("--config", o.configs, "Storage config file (repeatable)")->required();
    } else {
      sub->add_option("--config", o.configs, "Storage config file")->required()->expected(1);
    }
    if (prices) sub->add_option("--prices", o.prices, "Price CSV")->required();
    sub->add_option("--out", o.out, "Output directory (stdout when absent)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* solve = app.add_subcommand("solve", "Optimal schedule, fixed or free terminal");
  add_common(solve, true, false);
  solve->add_option("--T", o.T, "Periods to schedule (default: all prices)");
  solve->add_option("--s-end", o.s_end, "Terminal state in kWh (free when absent)");

  auto* bounds = app.add_subcommand("bounds", "Reachable bounds for T = 1..T");
  add_common(bounds, false, false);
  bounds->add_option("--T", o.T, "Largest T (default: t_max_periods)");

  auto* tmin_cmd = app.add_subcommand("tmin", "Lower bound on the forecast horizon");
  add_common(tmin_cmd, false, false);
  tmin_cmd->add_option("-H", o.H, "Decision horizon");

  auto* check = app.add_subcommand("check", "Forecast-horizon test for one planning horizon");
  add_common(check, true, false);
  check->add_option("-H", o.H, "Decision horizon");
  check->add_option("--T", o.T, "Planning horizon (default: planning_horizon_periods)");

  auto* minfh = app.add_subcommand("minfh", "Minimum forecast horizon search");
  add_common(minfh, true, false);
  minfh->add_option("-H", o.H, "Decision horizon");
  minfh->add_option("--t-max", o.t_max, "Search cap");
  minfh->add_option("--sh-policy", o.sh_policy, "s_H policy when the cap is reached")
      ->check(CLI::IsMember({"max-profit", "min-bound"}));
  minfh->add_flag("--per-day", o.per_day, "Roll day by day and report each day's horizon");

  auto* bound = app.add_subcommand("bound", "Suboptimality bound at one planning horizon");
  add_common(bound, true, false);
  bound->add_option("-H", o.H, "Decision horizon");
  bound->add_option("--T", o.T, "Planning horizon (default: planning_horizon_periods)");
  bound->add_option("--sh-policy", o.sh_policy, "How s_H is chosen")
      ->check(CLI::IsMember({"max-profit", "min-bound"}));

  auto* roll = app.add_subcommand("roll", "Rolling-horizon strategy simulation");
  add_common(roll, true, true);
  roll->add_option("--strategy", o.strategy, "Strategy to run")
      ->check(CLI::IsMember({"all", "fixed_level", "fixed_horizon", "forecast_horizon"}));
  roll->add_option("--plan-terminal", o.plan_terminal, "fixed_horizon window end: free or pinned")
      ->check(CLI::IsMember({"free", "pinned"}));
  roll->add_option("-H", o.H, "Decision horizon");
  roll->add_option("--t-max", o.t_max, "Forecast-horizon search cap");
  roll->add_option("--sh-policy", o.sh_policy, "s_H policy when the cap is reached")
      ->check(CLI::IsMember({"max-profit", "min-bound"}));

  auto* fleet = app.add_subcommand("fleet", "Per-day binding system of a fleet");
  add_common(fleet, true, true);
  fleet->add_option("-H", o.H, "Decision horizon");
  fleet->add_option("--t-max", o.t_max, "Forecast-horizon search cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Sink sink(o.out);
    if (*solve) cmd_solve(o, sink);
    if (*bounds) cmd_bounds(o, sink);
    if (*tmin_cmd) cmd_tmin(o, sink);
    if (*check) cmd_check(o, sink);
    if (*minfh) cmd_minfh(o, sink);
    if (*bound) cmd_bound(o, sink);
    if (*roll) cmd_roll(o, sink);
    if (*fleet) cmd_fleet(o, sink);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
