#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "storhz/horizon.hpp"
#include "storhz/model.hpp"

namespace storhz {

enum class StrategyKind { fixed_level, fixed_horizon, forecast_horizon };

struct Strategy {
  StrategyKind kind = StrategyKind::fixed_level;
  std::size_t H = 24;
  std::size_t T_plan = 48;  // fixed_horizon
  // fixed_horizon: pin each planning window's end to its starting level instead of leaving it free
  bool pin_plan_end = false;
  std::size_t T_max = 96;   // forecast_horizon
  double final_target = 0.0;
  ShPolicy policy = ShPolicy::min_bound;

  static Strategy fixed_level(std::size_t H, double final_target);
  static Strategy fixed_horizon(std::size_t H, std::size_t T_plan, double final_target,
                                bool pin_plan_end = false);
  static Strategy forecast_horizon(std::size_t H, std::size_t T_max, double final_target,
                                   ShPolicy policy = ShPolicy::min_bound);

  std::string name() const;
  void validate() const;
};

struct DayRecord {
  std::size_t day = 0;  // 1-based
  double start_soe = 0.0;
  double end_soe = 0.0;
  double profit = 0.0;
  // forecast_horizon only: planning length reached and whether the test passed there
  std::optional<std::size_t> horizon;
  bool horizon_found = false;
  // window reached the end of the data and pinned final_target
  bool pinned_final = false;
};

struct SimulationResult {
  std::string strategy;
  Schedule schedule;
  double total_profit = 0.0;
  double storage_use = 0.0;
  std::vector<DayRecord> days;
};

/// Rolls decision windows of H periods over the whole series. The series
/// length must be a multiple of H; a window whose planning span reaches the
/// end of the data pins the terminal state to final_target.
SimulationResult run_strategy(const StorageSpec& spec, const PriceSeries& prices,
                              const Strategy& strategy);

struct ComparisonRow {
  std::string strategy;
  double profit = 0.0;
  // (best - profit) / |best| * 100; zero on the best row, empty when best is 0
  std::optional<double> loss_pct;
  double storage_use = 0.0;
  bool best = false;
};

/// Throws InputError when the results cover different numbers of periods.
std::vector<ComparisonRow> compare(const std::vector<SimulationResult>& results);

struct BindingDay {
  std::size_t day = 0;
  std::vector<std::optional<std::size_t>> horizons;  // per system; empty when not found
  std::size_t binding = 0;
};

/// Per-day binding system over forecast_horizon runs of several systems on
/// the same prices. A system without a horizon that day binds; ties go to the
/// lowest index.
std::vector<BindingDay> fleet_binding_sequence(const std::vector<SimulationResult>& runs);

}  // namespace storhz
