#include "storhz/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace storhz {

namespace {

using ojson = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string where(const std::string& origin, std::size_t line) {
  return origin + ":" + std::to_string(line) + ": ";
}

// Rounds to the 12 significant digits used in every report.
double r12(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

ojson interval_set_json(const IntervalSet& set) {
  ojson arr = ojson::array();
  for (const auto& part : set.parts()) arr.push_back({r12(part.lo), r12(part.hi)});
  return arr;
}

// Bound as a percentage of the decision-horizon profit Z_DH; empty when Z_DH is 0.
std::optional<double> bound_pct(const SuboptimalityReport& rep) {
  if (rep.z_dh == 0.0) return std::nullopt;
  return rep.bound / std::abs(rep.z_dh) * 100.0;
}

ojson subopt_object(const SuboptimalityReport& rep) {
  ojson j;
  j["policy"] = to_string(rep.policy);
  j["s_H_kwh"] = r12(rep.s_H);
  j["bound"] = r12(rep.bound);
  const auto pct = bound_pct(rep);
  j["bound_pct_of_z_dh"] = pct ? ojson(r12(*pct)) : ojson(nullptr);
  j["z_opt_dh"] = r12(rep.z_opt_dh);
  j["z_dh"] = r12(rep.z_dh);
  j["s_low_H_kwh"] = r12(rep.interval.lo);
  j["s_high_H_kwh"] = r12(rep.interval.hi);
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string optional_size(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

PriceUnit parse_price_unit(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "eur_per_kwh" || t == "per_kwh" || t == "kwh") return PriceUnit::per_kwh;
  if (t == "eur_per_mwh" || t == "per_mwh" || t == "mwh") return PriceUnit::per_mwh;
  throw InputError("unknown price unit '" + text + "' (expected eur_per_kwh or eur_per_mwh)");
}

std::string to_string(PriceUnit unit) {
  return unit == PriceUnit::per_kwh ? "eur_per_kwh" : "eur_per_mwh";
}

ShPolicy parse_sh_policy(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "max-profit" || t == "max_profit") return ShPolicy::max_profit;
  if (t == "min-bound" || t == "min_bound") return ShPolicy::min_bound;
  throw InputError("unknown s_H policy '" + text + "' (expected max-profit or min-bound)");
}

std::string to_string(ShPolicy policy) {
  return policy == ShPolicy::max_profit ? "max-profit" : "min-bound";
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where(origin, line_no) + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key)) throw InputError(where(origin, line_no) + "duplicate key '" + key + "'");
    seen[key] = line_no;

    auto number = [&]() {
      const auto v = parse_double(value);
      if (!v) throw InputError(where(origin, line_no) + key + ": not a number: '" + value + "'");
      return *v;
    };
    auto count = [&]() {
      const auto v = parse_integer(value);
      if (!v || *v < 1) {
        throw InputError(where(origin, line_no) + key + ": expected a positive integer");
      }
      return static_cast<std::size_t>(*v);
    };

    if (key == "name") {
      cfg.name = value;
    } else if (key == "s_min_kwh") {
      cfg.spec.s_min = number();
    } else if (key == "s_max_kwh") {
      cfg.spec.s_max = number();
    } else if (key == "p_ch_max_kw") {
      cfg.spec.p_ch_max = number();
    } else if (key == "p_dis_max_kw") {
      cfg.spec.p_dis_max = number();
    } else if (key == "eta_ch") {
      cfg.spec.eta_ch = number();
    } else if (key == "eta_dis") {
      cfg.spec.eta_dis = number();
    } else if (key == "rho") {
      cfg.spec.rho = number();
    } else if (key == "s_init_kwh") {
      cfg.spec.s_init = number();
    } else if (key == "dt_h") {
      cfg.spec.dt = number();
    } else if (key == "H" || key == "decision_horizon_periods") {
      cfg.H = count();
    } else if (key == "t_max_periods") {
      cfg.t_max = count();
    } else if (key == "planning_horizon_periods") {
      cfg.planning_horizon = count();
    } else if (key == "price_floor_eur_per_mwh") {
      cfg.price_floor = number() / 1000.0;
    } else if (key == "price_cap_eur_per_mwh") {
      cfg.price_cap = number() / 1000.0;
    } else if (key == "price_floor_eur_per_kwh") {
      cfg.price_floor = number();
    } else if (key == "price_cap_eur_per_kwh") {
      cfg.price_cap = number();
    } else if (key == "price_unit") {
      cfg.price_unit = parse_price_unit(value);
    } else if (key == "final_target_kwh") {
      cfg.final_target = number();
    } else if (key == "strategy") {
      cfg.strategy = value;
    } else if (key == "sh_policy") {
      cfg.sh_policy = parse_sh_policy(value);
    } else if (key == "plan_terminal") {
      if (value != "free" && value != "pinned") {
        throw InputError(where(origin, line_no) + "plan_terminal must be free or pinned");
      }
      cfg.pin_plan_end = value == "pinned";
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw InputError(where(origin, line_no) + "unknown key '" + key + "'");
    }
  }

  try {
    cfg.spec.validate();
  } catch (const InputError& e) {
    throw InputError(origin + ": " + e.what());
  }
  if (cfg.planning_horizon < cfg.H) {
    throw InputError(origin + ": planning_horizon_periods must be at least H");
  }
  if (cfg.t_max < cfg.H) throw InputError(origin + ": t_max_periods must be at least H");
  if (!(cfg.price_floor <= 0.0)) throw InputError(origin + ": price floor must be <= 0");
  if (!(cfg.price_cap >= 0.0)) throw InputError(origin + ": price cap must be >= 0");
  if (cfg.final_target &&
      (*cfg.final_target < cfg.spec.s_min || *cfg.final_target > cfg.spec.s_max)) {
    throw InputError(origin + ": final_target_kwh outside [s_min_kwh, s_max_kwh]");
  }
  static const char* strategies[] = {"all", "fixed_level", "fixed_horizon", "forecast_horizon"};
  if (std::find(std::begin(strategies), std::end(strategies), cfg.strategy) == std::end(strategies)) {
    throw InputError(origin + ": unknown strategy '" + cfg.strategy + "'");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

std::optional<long long> parse_timestamp(const std::string& text) {
  const std::string t = trim(text);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  int consumed = 0;
  if (std::sscanf(t.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos < t.size()) {
    if (t[pos] != 'T' && t[pos] != ' ') return std::nullopt;
    ++pos;
    int n = 0;
    if (std::sscanf(t.c_str() + pos, "%2d:%2d%n", &h, &mi, &n) != 2 || n != 5) return std::nullopt;
    pos += 5;
    if (pos < t.size() && t[pos] == ':') {
      if (std::sscanf(t.c_str() + pos, ":%2d%n", &sec, &n) != 1 || n != 3) return std::nullopt;
      pos += 3;
    }
  }
  long long offset = 0;
  if (pos < t.size()) {
    if (t[pos] == 'Z' && pos + 1 == t.size()) {
      pos += 1;
    } else if ((t[pos] == '+' || t[pos] == '-') && t.size() - pos == 6 && t[pos + 3] == ':') {
      int oh = 0, om = 0, n = 0;
      if (std::sscanf(t.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n) != 2 || n != 5) {
        return std::nullopt;
      }
      offset = (t[pos] == '+' ? 1 : -1) * (oh * 60LL + om);
      pos = t.size();
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day date{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!date.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const long long days_since = sys_days(date).time_since_epoch().count();
  return days_since * 1440 + h * 60LL + mi - offset;
}

LoadedPrices parse_prices(std::istream& in, const std::string& origin, PriceUnit unit, double dt_h,
                          double price_floor, double price_cap) {
  if (!(dt_h > 0.0)) throw InputError("dt must be positive");
  std::string raw;
  std::size_t line_no = 0;
  // header
  while (std::getline(in, raw)) {
    ++line_no;
    if (!trim(raw).empty()) break;
  }
  const auto header = split_csv(trim(raw));
  if (header.size() < 2 || parse_double(header[1])) {
    throw InputError(where(origin, line_no) + "expected a header row with time and price columns");
  }
  const std::string hint = lower(header[1]);
  if (unit == PriceUnit::per_kwh && hint.find("mwh") != std::string::npos) {
    throw InputError(where(origin, line_no) + "price column '" + header[1] +
                     "' is per MWh but the declared unit is eur_per_kwh");
  }
  if (unit == PriceUnit::per_mwh && hint.find("kwh") != std::string::npos) {
    throw InputError(where(origin, line_no) + "price column '" + header[1] +
                     "' is per kWh but the declared unit is eur_per_mwh");
  }

  const double scale = unit == PriceUnit::per_mwh ? 1.0 / 1000.0 : 1.0;
  const double step_minutes = dt_h * 60.0;
  LoadedPrices out;
  std::vector<double> values;
  std::optional<long long> prev_key;
  std::optional<bool> timestamps;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 2) throw InputError(where(origin, line_no) + "expected time,price");
    const auto price = parse_double(cells[1]);
    if (!price) throw InputError(where(origin, line_no) + "malformed price '" + cells[1] + "'");

    std::optional<long long> key = parse_timestamp(cells[0]);
    const bool is_time = key.has_value();
    if (!is_time) key = parse_integer(cells[0]);
    if (!key) throw InputError(where(origin, line_no) + "malformed time column '" + cells[0] + "'");
    if (timestamps && *timestamps != is_time) {
      throw InputError(where(origin, line_no) + "time column mixes indices and timestamps");
    }
    timestamps = is_time;
    if (prev_key) {
      const double diff = double(*key - *prev_key);
      const double expect = is_time ? step_minutes : 1.0;
      if (diff <= 0.0) {
        throw InputError(where(origin, line_no) + "time column not increasing at '" + cells[0] + "'");
      }
      if (diff > expect + 1e-9) {
        throw InputError(where(origin, line_no) + "gap in time column: period(s) missing before '" +
                         cells[0] + "' (previous row '" + out.labels.back() + "')");
      }
      if (diff < expect - 1e-9) {
        throw InputError(where(origin, line_no) + "time step at '" + cells[0] +
                         "' does not match dt");
      }
    }
    prev_key = key;
    const double v = *price * scale;
    if (v < price_floor || v > price_cap) {
      throw InputError(where(origin, line_no) + "price " + cells[1] + " outside [floor, cap]");
    }
    values.push_back(v);
    out.labels.push_back(cells[0]);
  }
  if (values.empty()) throw InputError(origin + ": no price rows");
  out.rows = values.size();
  out.series = PriceSeries(std::move(values), price_floor, price_cap);
  return out;
}

LoadedPrices load_prices(const std::filesystem::path& path, PriceUnit unit, double dt_h,
                         double price_floor, double price_cap) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open price file " + path.string());
  return parse_prices(in, path.string(), unit, dt_h, price_floor, price_cap);
}

void write_schedule_csv(std::ostream& os, const PriceSeries& prices, const Schedule& sched,
                        std::size_t first_period) {
  os << "period,price,p_ch_kw,p_dis_kw,soe_kwh\n";
  for (std::size_t i = 0; i < sched.size(); ++i) {
    os << first_period + i << ',' << fmt(prices.values()[i]) << ',' << fmt(sched.p_ch[i]) << ','
       << fmt(sched.p_dis[i]) << ',' << fmt(sched.soe[i]) << '\n';
  }
}

void write_bounds_csv(std::ostream& os, const StorageSpec& spec, std::size_t T_max) {
  os << "T,s_low_kwh,s_high_kwh\n";
  for (std::size_t T = 1; T <= T_max; ++T) {
    const ReachableBounds b = reachable_bounds(spec, T);
    os << T << ',' << fmt(b.s_low_T) << ',' << fmt(b.s_high_T) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const HorizonReport& rep) {
  os << "T,gap_kwh,is_forecast_horizon,s_low_H_kwh,s_high_H_kwh\n";
  for (const auto& row : rep.trace) {
    os << row.T << ',' << fmt(row.gap) << ',' << (row.is_forecast_horizon ? 1 : 0) << ','
       << fmt(row.s_low_H) << ',' << fmt(row.s_high_H) << '\n';
  }
}

void write_report_csv(std::ostream& os, const HorizonReport& rep) {
  os << "H,T,is_forecast_horizon,gap_kwh,s_low_H_kwh,s_high_H_kwh,s_low_T_kwh,s_high_T_kwh,"
        "t_min,t_min_found,cap_exhausted,subopt_bound,subopt_s_H_kwh\n";
  os << rep.H << ',' << rep.T << ',' << (rep.is_forecast_horizon ? 1 : 0) << ',' << fmt(rep.gap)
     << ',' << fmt(rep.s_low_H) << ',' << fmt(rep.s_high_H) << ',' << fmt(rep.bounds.s_low_T)
     << ',' << fmt(rep.bounds.s_high_T) << ',' << rep.t_min << ',' << (rep.t_min_found ? 1 : 0)
     << ',' << (rep.cap_exhausted ? 1 : 0) << ',' << (rep.subopt ? fmt(rep.subopt->bound) : "")
     << ',' << (rep.subopt ? fmt(rep.subopt->s_H) : "") << '\n';
}

void write_subopt_csv(std::ostream& os, const SuboptimalityReport& rep) {
  os << "policy,s_H_kwh,bound,bound_pct_of_z_dh,z_opt_dh,z_dh,s_low_H_kwh,s_high_H_kwh\n";
  const auto pct = bound_pct(rep);
  os << to_string(rep.policy) << ',' << fmt(rep.s_H) << ',' << fmt(rep.bound) << ','
     << (pct ? fmt(*pct) : "") << ',' << fmt(rep.z_opt_dh) << ',' << fmt(rep.z_dh) << ',' << fmt(rep.interval.lo) << ','
     << fmt(rep.interval.hi) << '\n';
}

void write_days_csv(std::ostream& os, const SimulationResult& res) {
  os << "day,start_soe_kwh,end_soe_kwh,profit,horizon,horizon_found,pinned_final\n";
  for (const auto& d : res.days) {
    os << d.day << ',' << fmt(d.start_soe) << ',' << fmt(d.end_soe) << ',' << fmt(d.profit) << ','
       << optional_size(d.horizon) << ',' << (d.horizon_found ? 1 : 0) << ','
       << (d.pinned_final ? 1 : 0) << '\n';
  }
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "strategy,profit,loss_pct,storage_use_kwh,best\n";
  for (const auto& r : rows) {
    os << r.strategy << ',' << fmt(r.profit) << ',' << (r.loss_pct ? fmt(*r.loss_pct) : "") << ','
       << fmt(r.storage_use) << ',' << (r.best ? 1 : 0) << '\n';
  }
}

void write_binding_csv(std::ostream& os, const std::vector<std::string>& names,
                       const std::vector<BindingDay>& days) {
  os << "day";
  for (const auto& n : names) os << ',' << n << "_horizon";
  os << ",binding\n";
  for (const auto& d : days) {
    os << d.day;
    for (const auto& h : d.horizons) os << ',' << optional_size(h);
    os << ',' << names.at(d.binding) << '\n';
  }
}

std::string report_json(const HorizonReport& rep) {
  ojson j;
  j["H"] = rep.H;
  j["T"] = rep.T;
  j["is_forecast_horizon"] = rep.is_forecast_horizon;
  j["gap_kwh"] = r12(rep.gap);
  j["s_low_H_kwh"] = r12(rep.s_low_H);
  j["s_high_H_kwh"] = r12(rep.s_high_H);
  j["argmax_low"] = interval_set_json(rep.argmax_low);
  j["argmax_high"] = interval_set_json(rep.argmax_high);
  j["s_low_T_kwh"] = r12(rep.bounds.s_low_T);
  j["s_high_T_kwh"] = r12(rep.bounds.s_high_T);
  j["t_min"] = rep.t_min;
  j["t_min_found"] = rep.t_min_found;
  j["cap_exhausted"] = rep.cap_exhausted;
  j["subopt"] = rep.subopt ? subopt_object(*rep.subopt) : ojson(nullptr);
  ojson trace = ojson::array();
  for (const auto& row : rep.trace) {
    trace.push_back({{"T", row.T},
                     {"gap_kwh", r12(row.gap)},
                     {"is_forecast_horizon", row.is_forecast_horizon},
                     {"s_low_H_kwh", r12(row.s_low_H)},
                     {"s_high_H_kwh", r12(row.s_high_H)}});
  }
  j["trace"] = trace;
  return dump(j);
}

std::string subopt_json(const SuboptimalityReport& rep) { return dump(subopt_object(rep)); }

std::string schedule_json(const ScheduleResult& res, const PriceSeries& prices) {
  ojson j;
  j["profit"] = r12(res.profit);
  j["terminal_soe_kwh"] = r12(res.terminal_soe);
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < res.schedule.size(); ++i) {
    rows.push_back({{"period", i + 1},
                    {"price", r12(prices.values()[i])},
                    {"p_ch_kw", r12(res.schedule.p_ch[i])},
                    {"p_dis_kw", r12(res.schedule.p_dis[i])},
                    {"soe_kwh", r12(res.schedule.soe[i])}});
  }
  j["schedule"] = rows;
  return dump(j);
}

std::string simulation_json(const SimulationResult& res) {
  ojson j;
  j["strategy"] = res.strategy;
  j["total_profit"] = r12(res.total_profit);
  j["storage_use_kwh"] = r12(res.storage_use);
  ojson days = ojson::array();
  for (const auto& d : res.days) {
    days.push_back({{"day", d.day},
                    {"start_soe_kwh", r12(d.start_soe)},
                    {"end_soe_kwh", r12(d.end_soe)},
                    {"profit", r12(d.profit)},
                    {"horizon", d.horizon ? ojson(*d.horizon) : ojson(nullptr)},
                    {"horizon_found", d.horizon_found},
                    {"pinned_final", d.pinned_final}});
  }
  j["days"] = days;
  return dump(j);
}

std::string comparison_json(const std::vector<ComparisonRow>& rows) {
  ojson arr = ojson::array();
  for (const auto& r : rows) {
    arr.push_back({{"strategy", r.strategy},
                   {"profit", r12(r.profit)},
                   {"loss_pct", r.loss_pct ? ojson(r12(*r.loss_pct)) : ojson(nullptr)},
                   {"storage_use_kwh", r12(r.storage_use)},
                   {"best", r.best}});
  }
  return dump(arr);
}

std::string binding_json(const std::vector<std::string>& names, const std::vector<BindingDay>& days) {
  ojson arr = ojson::array();
  for (const auto& d : days) {
    ojson h = ojson::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
      h[names[i]] = d.horizons[i] ? ojson(*d.horizons[i]) : ojson(nullptr);
    }
    arr.push_back({{"day", d.day}, {"horizons", h}, {"binding", names.at(d.binding)}});
  }
  return dump(arr);
}

}  // namespace storhz
