#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "storhz/horizon.hpp"
#include "storhz/model.hpp"
#include "storhz/rolling.hpp"
#include "storhz/solver.hpp"

namespace storhz {

enum class PriceUnit { per_kwh, per_mwh };

PriceUnit parse_price_unit(const std::string& text);
std::string to_string(PriceUnit unit);
ShPolicy parse_sh_policy(const std::string& text);
std::string to_string(ShPolicy policy);

/// Flat key = value configuration. Prices bounds are stored per kWh.
struct RunConfig {
  std::string name = "storage";
  StorageSpec spec;
  std::size_t H = 24;
  std::size_t t_max = 96;
  std::size_t planning_horizon = 48;
  double price_floor = -0.5;  // -500 per MWh
  double price_cap = 4.0;     // 4000 per MWh
  PriceUnit price_unit = PriceUnit::per_mwh;
  std::optional<double> final_target;
  std::string strategy = "all";
  ShPolicy sh_policy = ShPolicy::min_bound;
  bool pin_plan_end = false;  // plan_terminal = pinned
  std::string output_dir;

  double target() const { return final_target.value_or(spec.s_init); }
};

/// Unknown keys, malformed lines and invalid values raise InputError with the
/// origin and line number.
RunConfig parse_config(std::istream& in, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);

struct LoadedPrices {
  PriceSeries series;
  std::vector<std::string> labels;  // first column as written
  std::size_t rows = 0;
};

/// CSV with a header row: period index or ISO-8601 timestamp, then price.
/// Values are converted to currency per kWh. A header naming the other unit,
/// a gap in the time column or a malformed row raise InputError.
LoadedPrices parse_prices(std::istream& in, const std::string& origin, PriceUnit unit, double dt_h,
                          double price_floor, double price_cap);
LoadedPrices load_prices(const std::filesystem::path& path, PriceUnit unit, double dt_h,
                         double price_floor, double price_cap);

/// Minutes since 1970-01-01T00:00Z; nullopt when the text is not a timestamp.
std::optional<long long> parse_timestamp(const std::string& text);

/// %.12g
std::string fmt(double v);

// CSV emitters; one header line each.
void write_schedule_csv(std::ostream& os, const PriceSeries& prices, const Schedule& sched,
                        std::size_t first_period = 1);
void write_bounds_csv(std::ostream& os, const StorageSpec& spec, std::size_t T_max);
void write_trace_csv(std::ostream& os, const HorizonReport& rep);
void write_report_csv(std::ostream& os, const HorizonReport& rep);
void write_subopt_csv(std::ostream& os, const SuboptimalityReport& rep);
void write_days_csv(std::ostream& os, const SimulationResult& res);
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);
void write_binding_csv(std::ostream& os, const std::vector<std::string>& names,
                       const std::vector<BindingDay>& days);

// JSON emitters; numbers keep 12 significant digits.
std::string report_json(const HorizonReport& rep);
std::string subopt_json(const SuboptimalityReport& rep);
std::string schedule_json(const ScheduleResult& res, const PriceSeries& prices);
std::string simulation_json(const SimulationResult& res);
std::string comparison_json(const std::vector<ComparisonRow>& rows);
std::string binding_json(const std::vector<std::string>& names, const std::vector<BindingDay>& days);

}  // namespace storhz
