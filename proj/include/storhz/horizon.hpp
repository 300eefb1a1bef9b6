#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "storhz/model.hpp"
#include "storhz/pwl.hpp"

namespace storhz {

struct HorizonConfig {
  std::size_t H = 24;
  std::size_t T = 48;
  std::size_t T_max = 96;

  /// 1 <= H <= T <= T_max <= available; throws InputError otherwise.
  void validate(std::size_t available) const;
};

struct ReachableBounds {
  double s_low_T = 0.0;
  double s_high_T = 0.0;
};

/// Lowest and highest state reachable after T periods, in closed form.
ReachableBounds reachable_bounds(const StorageSpec& spec, std::size_t T);

/// The three expressions of the necessary condition for T to be a forecast
/// horizon. T qualifies once the smallest of them is <= 0.
struct TminTerms {
  double capacity_sweep = 0.0;
  double empty_from_init = 0.0;
  double fill_from_init = 0.0;

  double min() const;
};

TminTerms tmin_terms(const StorageSpec& spec, std::size_t H, std::size_t T);

struct TminResult {
  std::size_t t_min = 0;
  bool found = false;  // false: no T up to the cap qualifies, t_min holds the cap
};

/// First T >= H satisfying the necessary condition. The default cap is H + 100000.
TminResult tmin(const StorageSpec& spec, std::size_t H, std::optional<std::size_t> cap = std::nullopt);

enum class ShPolicy { max_profit, min_bound };

struct SuboptimalityReport {
  double bound = 0.0;
  double s_H = 0.0;
  double z_opt_dh = 0.0;
  double z_dh = 0.0;
  Interval interval;  // [s_low_H, s_high_H] the bound was computed on
  ShPolicy policy = ShPolicy::min_bound;
};

struct HorizonTraceRow {
  std::size_t T = 0;
  double gap = 0.0;
  bool is_forecast_horizon = false;
  double s_low_H = 0.0;
  double s_high_H = 0.0;
};

struct HorizonReport {
  std::size_t H = 0;
  std::size_t T = 0;
  bool is_forecast_horizon = false;
  // Distance between the two argmax sets; zero within 1e-7 * capacity is reported as 0.
  double gap = 0.0;
  // Forecast horizon: both equal the common optimal s_H nearest to both peaks
  // (smallest on ties). Otherwise
  // the hull of both argmax sets, which brackets every optimal s_H.
  double s_low_H = 0.0;
  double s_high_H = 0.0;
  IntervalSet argmax_low;
  IntervalSet argmax_high;
  ReachableBounds bounds;
  std::size_t t_min = 0;
  bool t_min_found = false;
  // Set when a search ended at T_max without a forecast horizon.
  bool cap_exhausted = false;
  std::optional<SuboptimalityReport> subopt;
  std::vector<HorizonTraceRow> trace;
};

/// Sets intersect when their distance is at most this.
double gap_tolerance(const StorageSpec& spec);

/// Forecast-horizon test for planning horizon T: compares the optimal s_H sets
/// of the problems pinned at the lowest and highest reachable terminal state.
HorizonReport check_forecast_horizon(const StorageSpec& spec, const PriceSeries& prices,
                                     std::size_t H, std::size_t T);

/// Bound value for a given s_H; pure arithmetic.
double suboptimality_formula(double z_opt_dh, double z_dh, double s_H, Interval interval,
                             double price_floor, double price_cap, double eta_ch, double eta_dis);

/// Bound on [s_low_H, s_high_H] = interval with s_H picked by policy.
/// max-profit: among maximisers of V_H on the interval, the one with the
/// smallest bound. min-bound: exact minimiser of the bound (smallest on ties).
SuboptimalityReport suboptimality_bound(const StorageSpec& spec, const PriceSeries& prices,
                                        std::size_t H, Interval interval, ShPolicy policy);

/// Bound with an explicit s_H; throws InputError when s_H is outside interval.
SuboptimalityReport suboptimality_bound_at(const StorageSpec& spec, const PriceSeries& prices,
                                           std::size_t H, Interval interval, double s_H);

/// Runs check_forecast_horizon at T and bounds the s_H interval it reports.
SuboptimalityReport suboptimality_bound(const StorageSpec& spec, const PriceSeries& prices,
                                        std::size_t H, std::size_t T, ShPolicy policy);

struct MinHorizonOptions {
  ShPolicy policy = ShPolicy::min_bound;
  // false: start at T = H instead of the necessary-condition lower bound
  bool start_at_tmin = true;
};

/// Increases T from max(H, t_min) until the test succeeds or T_max is reached.
/// The returned report is the one at the final T, with one trace row per T tried.
HorizonReport min_forecast_horizon(const StorageSpec& spec, const PriceSeries& prices,
                                   std::size_t H, std::size_t T_max,
                                   const MinHorizonOptions& options = {});

struct FleetReport {
  std::vector<HorizonReport> reports;
  // System with the longest horizon; a system without one is binding, ties go to the lowest index.
  std::size_t binding = 0;
  bool all_found = false;
};

FleetReport fleet_min_forecast_horizon(const std::vector<StorageSpec>& specs,
                                       const PriceSeries& prices, std::size_t H,
                                       std::size_t T_max, const MinHorizonOptions& options = {});

}  // namespace storhz
