#include "storhz/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "storhz/solver.hpp"

namespace storhz {

namespace {

// First H periods of the optimal H-period schedule ending at s_H.
Schedule commit_to(const StorageSpec& spec, const PriceSeries& window, std::size_t H, double s_H) {
  const ValueProfile forward = forward_values(spec, window, H);
  return recover_schedule(spec, window, forward, s_H, H);
}

Schedule first_periods(const Schedule& sched, std::size_t H) {
  Schedule out;
  out.append(sched, H);
  return out;
}

}  // namespace

Strategy Strategy::fixed_level(std::size_t H, double final_target) {
  Strategy s;
  s.kind = StrategyKind::fixed_level;
  s.H = H;
  s.T_plan = H;
  s.final_target = final_target;
  return s;
}

Strategy Strategy::fixed_horizon(std::size_t H, std::size_t T_plan, double final_target,
                                 bool pin_plan_end) {
  Strategy s;
  s.kind = StrategyKind::fixed_horizon;
  s.H = H;
  s.T_plan = T_plan;
  s.pin_plan_end = pin_plan_end;
  s.final_target = final_target;
  return s;
}

Strategy Strategy::forecast_horizon(std::size_t H, std::size_t T_max, double final_target,
                                    ShPolicy policy) {
  Strategy s;
  s.kind = StrategyKind::forecast_horizon;
  s.H = H;
  s.T_max = T_max;
  s.final_target = final_target;
  s.policy = policy;
  return s;
}

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::fixed_level:
      return "fixed_level";
    case StrategyKind::fixed_horizon:
      return "fixed_horizon_" + std::to_string(T_plan) + (pin_plan_end ? "_pinned" : "");
    case StrategyKind::forecast_horizon:
      return "forecast_horizon";
  }
  return "unknown";
}

void Strategy::validate() const {
  if (H == 0) throw InputError("strategy: H must be at least 1");
  if (kind == StrategyKind::fixed_horizon && T_plan < H) {
    throw InputError("strategy: planning horizon shorter than the decision horizon");
  }
  if (kind == StrategyKind::forecast_horizon && T_max < H) {
    throw InputError("strategy: T_max shorter than the decision horizon");
  }
}

SimulationResult run_strategy(const StorageSpec& spec, const PriceSeries& prices,
                              const Strategy& strategy) {
  spec.validate();
  strategy.validate();
  const std::size_t H = strategy.H;
  const std::size_t N = prices.size();
  if (N == 0) throw InputError("rolling: empty price series");
  if (N % H != 0) {
    throw InputError("rolling: day " + std::to_string(N / H + 1) + " has only " +
                     std::to_string(N % H) + " of " + std::to_string(H) + " periods");
  }
  if (strategy.final_target < spec.s_min || strategy.final_target > spec.s_max) {
    throw InputError("rolling: final target outside [s_min, s_max]");
  }

  SimulationResult out;
  out.strategy = strategy.name();
  double s = spec.s_init;
  for (std::size_t day = 0; day * H < N; ++day) {
    const std::size_t first = day * H + 1;
    const std::size_t remaining = N - day * H;
    const StorageSpec local = spec.with_initial(s);
    DayRecord rec;
    rec.day = day + 1;
    rec.start_soe = s;

    auto pinned = [&](std::size_t T, double target) {
      const PriceSeries window = prices.window(first, T);
      return first_periods(solve_fixed_terminal(local, window, T, target).schedule, H);
    };

    Schedule committed;
    switch (strategy.kind) {
      case StrategyKind::fixed_level: {
        rec.pinned_final = remaining == H;
        committed = pinned(H, rec.pinned_final ? strategy.final_target : s);
        break;
      }
      case StrategyKind::fixed_horizon: {
        const std::size_t T = std::min(strategy.T_plan, remaining);
        if (T == remaining) {
          rec.pinned_final = true;
          committed = pinned(T, strategy.final_target);
        } else if (strategy.pin_plan_end) {
          committed = pinned(T, s);
        } else {
          const PriceSeries window = prices.window(first, T);
          const ValueProfile forward = forward_values(local, window, T);
          const PwlFunction& last = forward.at(T);
          const double s_T = argmax_set(last, last.domain()).argmax.min();
          committed = first_periods(recover_schedule(local, window, forward, s_T, T), H);
        }
        break;
      }
      case StrategyKind::forecast_horizon: {
        if (remaining == H) {
          rec.pinned_final = true;
          committed = pinned(H, strategy.final_target);
          break;
        }
        const std::size_t T_max = std::min(strategy.T_max, remaining);
        const PriceSeries window = prices.window(first, T_max);
        MinHorizonOptions options;
        options.policy = strategy.policy;
        const HorizonReport rep = min_forecast_horizon(local, window, H, T_max, options);
        rec.horizon = rep.T;
        rec.horizon_found = rep.is_forecast_horizon;
        if (rep.is_forecast_horizon) {
          committed = commit_to(local, window, H, rep.s_low_H);
        } else if (T_max == remaining) {
          rec.pinned_final = true;
          committed = pinned(remaining, strategy.final_target);
        } else {
          committed = commit_to(local, window, H, rep.subopt->s_H);
        }
        break;
      }
    }

    rec.profit = profit_of(local, prices.window(first, H), committed);
    rec.end_soe = committed.soe.back();
    s = rec.end_soe;
    out.schedule.append(committed, H);
    out.days.push_back(rec);
  }
  out.total_profit = profit_of(spec, prices, out.schedule);
  out.storage_use = storage_use(spec, out.schedule);
  return out;
}

std::vector<ComparisonRow> compare(const std::vector<SimulationResult>& results) {
  if (results.empty()) throw InputError("compare: no results");
  const std::size_t n = results.front().schedule.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].schedule.size() != n) throw InputError("compare: results cover different windows");
    if (results[i].total_profit > results[best].total_profit) best = i;
  }
  const double top = results[best].total_profit;
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    ComparisonRow row;
    row.strategy = results[i].strategy;
    row.profit = results[i].total_profit;
    row.storage_use = results[i].storage_use;
    row.best = i == best;
    if (row.best) {
      row.loss_pct = 0.0;
    } else if (top != 0.0) {
      row.loss_pct = (top - row.profit) / std::abs(top) * 100.0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BindingDay> fleet_binding_sequence(const std::vector<SimulationResult>& runs) {
  if (runs.empty()) throw InputError("fleet: no runs");
  const std::size_t days = runs.front().days.size();
  for (const auto& r : runs) {
    if (r.days.size() != days) throw InputError("fleet: runs cover different numbers of days");
  }
  std::vector<BindingDay> out;
  for (std::size_t d = 0; d < days; ++d) {
    BindingDay row;
    row.day = d + 1;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const DayRecord& rec = runs[i].days[d];
      std::optional<std::size_t> h;
      if (rec.horizon_found) h = rec.horizon;
      row.horizons.push_back(h);
      const std::size_t rank = h.value_or(std::numeric_limits<std::size_t>::max());
      if (rank > worst || i == 0) {
        worst = rank;
        row.binding = i;
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace storhz
