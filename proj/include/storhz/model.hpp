#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace storhz {

// Error taxonomy shared by the library and the CLI exit codes.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Physical description of a price-taker storage device.
///
/// Units are fixed: kWh for energy, kW for power, hours for dt. Charging
/// stores eta_ch per unit drawn from the grid; discharging removes 1/eta_dis
/// per unit delivered. Stored energy is multiplied by rho between periods.
struct StorageSpec {
  double s_min = 0.0;
  double s_max = 1.0;
  double p_ch_max = 1.0;
  double p_dis_max = 1.0;
  double eta_ch = 1.0;
  double eta_dis = 1.0;
  double rho = 1.0;
  double s_init = 0.0;
  double dt = 1.0;

  /// Throws InputError naming the first offending field.
  void validate() const;

  double round_trip() const { return eta_ch * eta_dis; }
  double capacity() const { return s_max - s_min; }
  double duration_of_charge() const { return capacity() / (eta_ch * p_ch_max); }
  double duration_of_discharge() const { return eta_dis * capacity() / p_dis_max; }

  // Largest change of stored energy in one period.
  double charge_step() const { return dt * eta_ch * p_ch_max; }
  double discharge_step() const { return dt * p_dis_max / eta_dis; }

  StorageSpec with_initial(double s) const {
    StorageSpec copy = *this;
    copy.s_init = s;
    return copy;
  }
};

/// Prices C_1..C_T (currency per kWh) with the global bounds assumed for
/// unknown future periods. Period t lives at index t - 1.
class PriceSeries {
 public:
  PriceSeries() = default;
  PriceSeries(std::vector<double> prices, double price_floor, double price_cap);

  std::size_t size() const { return prices_.size(); }
  bool empty() const { return prices_.empty(); }
  /// 1-based period access.
  double at(std::size_t period) const;
  std::span<const double> values() const { return prices_; }
  double floor() const { return floor_; }
  double cap() const { return cap_; }

  /// Periods first..first+length-1 (1-based) as a new series with the same bounds.
  PriceSeries window(std::size_t first, std::size_t length) const;
  /// This series followed by `tail`; bounds are kept.
  PriceSeries extended(std::span<const double> tail) const;

 private:
  std::vector<double> prices_;
  double floor_ = 0.0;
  double cap_ = 0.0;
};

/// Periods 1..T stored at index 0..T-1; soe[t-1] is the state at the end of period t.
struct Schedule {
  std::vector<double> p_ch;
  std::vector<double> p_dis;
  std::vector<double> soe;

  std::size_t size() const { return soe.size(); }
  void append(const Schedule& other, std::size_t count);
};

struct ScheduleResult {
  Schedule schedule;
  double profit = 0.0;
  double terminal_soe = 0.0;
};

struct Tolerances {
  // p_ch * p_dis <= complementarity * p_ch_max * p_dis_max
  double complementarity = 1e-9;
  // state residuals and bound violations, scaled by max(1, capacity)
  double energy = 1e-7;
  // power bound violations, scaled by max(1, power limit)
  double power = 1e-9;
};

struct Violation {
  std::string constraint;
  std::size_t period = 0;  // 1-based
  double magnitude = 0.0;
};

/// Checks bounds, complementarity and the state update of every period.
/// Throws InputError when the sequence lengths disagree with each other or
/// with the price series.
std::vector<Violation> validate_schedule(const StorageSpec& spec, const PriceSeries& prices,
                                         const Schedule& sched, const Tolerances& tol = {});

/// Sum over t of dt * C_t * (p_dis - p_ch).
double profit_of(const StorageSpec& spec, const PriceSeries& prices, const Schedule& sched);

/// Grid-side energy throughput, sum of dt * (p_ch + p_dis).
double storage_use(const StorageSpec& spec, const Schedule& sched);

/// State at period to_t given the state s_from at period from_t (0 = initial state).
/// p_ch and p_dis are indexed by period (entry k-1 is period k).
double propagate_soe(const StorageSpec& spec, std::span<const double> p_ch,
                     std::span<const double> p_dis, std::size_t from_t, std::size_t to_t,
                     double s_from);

}  // namespace storhz
