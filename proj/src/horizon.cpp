#include "storhz/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "storhz/solver.hpp"

namespace storhz {

namespace {

// sum_{t=0}^{n-1} rho^t
double geometric(double rho, std::size_t n) {
  if (rho == 1.0) return double(n);
  return (1.0 - std::pow(rho, double(n))) / (1.0 - rho);
}

// V + W where the two domains may miss each other by rounding only.
PwlFunction add_touching(const PwlFunction& v, const PwlFunction& w, double tol) {
  const double lo = std::max(v.lo(), w.lo());
  const double hi = std::min(v.hi(), w.hi());
  if (lo <= hi) return add(v, w);
  if (lo - hi > tol) throw InternalError("forward and backward domains do not meet");
  const double x = 0.5 * (lo + hi);
  return PwlFunction::point(x, v(std::clamp(x, v.lo(), v.hi())) + w(std::clamp(x, w.lo(), w.hi())));
}

// Common optimal s_H. The argmax sets carry a value tolerance at their ends,
// so inside the overlap we take the point closest to both peaks, smallest on
// ties. Sets that only touch within tol fall back to the first touching point.
double shared_level(const IntervalSet& low, const IntervalSet& high, const PwlFunction& sum_low,
                    const PwlFunction& sum_high, double tol) {
  const IntervalSet exact = intersect(low, high, 0.0);
  if (exact.empty()) return intersect(low, high, tol).min();
  const double top_low = sum_low.max_value();
  const double top_high = sum_high.max_value();
  auto loss = [&](double x) {
    return (top_low - sum_low(std::clamp(x, sum_low.lo(), sum_low.hi()))) +
           (top_high - sum_high(std::clamp(x, sum_high.lo(), sum_high.hi())));
  };
  std::vector<double> xs;
  for (const auto& part : exact.parts()) {
    xs.push_back(part.lo);
    xs.push_back(part.hi);
    for (const auto* f : {&sum_low, &sum_high}) {
      for (const auto& p : f->breakpoints()) {
        if (p.x > part.lo && p.x < part.hi) xs.push_back(p.x);
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  double best = std::numeric_limits<double>::infinity();
  for (double x : xs) best = std::min(best, loss(x));
  const double slack = 1e-12 * (1.0 + std::abs(top_low) + std::abs(top_high));
  for (double x : xs) {
    if (loss(x) <= best + slack) return x;
  }
  return xs.front();
}

void require_window(const PriceSeries& prices, std::size_t H, std::size_t T) {
  if (H == 0 || H > T) throw InputError("need 1 <= H <= T");
  if (T > prices.size()) {
    throw InputError("planning horizon " + std::to_string(T) + " exceeds price length " +
                     std::to_string(prices.size()));
  }
}

SuboptimalityReport evaluate_choice(const PriceSeries& prices, const StorageSpec& spec,
                                    const PwlFunction& vh, double z_opt, Interval interval,
                                    double s) {
  SuboptimalityReport r;
  r.s_H = s;
  r.z_opt_dh = z_opt;
  r.z_dh = vh(s);
  r.interval = interval;
  r.bound = suboptimality_formula(z_opt, r.z_dh, s, interval, prices.floor(), prices.cap(),
                                  spec.eta_ch, spec.eta_dis);
  return r;
}

// Where the two linear arms of the bound cross, if anywhere.
std::optional<double> arm_crossing(const PriceSeries& prices, const StorageSpec& spec,
                                   Interval interval) {
  const double a = -prices.floor() / spec.eta_ch;
  const double b = prices.cap() * spec.eta_dis;
  if (a + b <= 0.0) return std::nullopt;
  return (a * interval.lo + b * interval.hi) / (a + b);
}

}  // namespace

void HorizonConfig::validate(std::size_t available) const {
  if (H < 1) throw InputError("horizon: H must be at least 1");
  if (T < H) throw InputError("horizon: T must be at least H");
  if (T_max < T) throw InputError("horizon: T_max must be at least T");
  if (T_max > available) {
    throw InputError("horizon: T_max " + std::to_string(T_max) + " exceeds available prices (" +
                     std::to_string(available) + ")");
  }
}

ReachableBounds reachable_bounds(const StorageSpec& spec, std::size_t T) {
  spec.validate();
  const double decay = std::pow(spec.rho, double(T)) * spec.s_init;
  const double g = geometric(spec.rho, T);
  return {std::max(spec.s_min, decay - spec.dt * g * spec.p_dis_max / spec.eta_dis),
          std::min(spec.s_max, decay + spec.dt * g * spec.eta_ch * spec.p_ch_max)};
}

double TminTerms::min() const { return std::min({capacity_sweep, empty_from_init, fill_from_init}); }

TminTerms tmin_terms(const StorageSpec& spec, std::size_t H, std::size_t T) {
  if (H == 0 || T < H) throw InputError("tmin_terms: need 1 <= H <= T");
  const double before = geometric(spec.rho, T - H);
  const double within = std::pow(spec.rho, double(T - H)) * geometric(spec.rho, H);
  const double ch = spec.dt * spec.eta_ch * spec.p_ch_max;
  const double dis = spec.dt / spec.eta_dis * spec.p_dis_max;
  const double decay = std::pow(spec.rho, double(T)) * spec.s_init;
  TminTerms t;
  t.capacity_sweep = spec.s_max - spec.s_min - before * (ch + dis);
  t.empty_from_init = decay - spec.s_min + ch * within - dis * before;
  t.fill_from_init = spec.s_max - decay - ch * before + dis * within;
  return t;
}

TminResult tmin(const StorageSpec& spec, std::size_t H, std::optional<std::size_t> cap) {
  spec.validate();
  if (H == 0) throw InputError("tmin: H must be at least 1");
  const std::size_t limit = cap.value_or(H + 100000);
  for (std::size_t T = H; T <= limit; ++T) {
    if (tmin_terms(spec, H, T).min() <= 0.0) return {T, true};
  }
  return {limit, false};
}

double gap_tolerance(const StorageSpec& spec) { return 1e-7 * spec.capacity(); }

HorizonReport check_forecast_horizon(const StorageSpec& spec, const PriceSeries& prices,
                                     std::size_t H, std::size_t T) {
  spec.validate();
  require_window(prices, H, T);
  HorizonReport rep;
  rep.H = H;
  rep.T = T;
  rep.bounds = reachable_bounds(spec, T);

  const PwlFunction vh = forward_values(spec, prices, H).at(H);
  std::optional<PwlFunction> w_low;
  std::optional<PwlFunction> w_high;
  std::exception_ptr failure;
  // The two terminal problems are independent.
#pragma omp parallel sections
  {
#pragma omp section
    {
      try {
        w_low = backward_values(spec, prices, T, rep.bounds.s_low_T, H).at(H);
      } catch (...) {
#pragma omp critical(storhz_check_error)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        w_high = backward_values(spec, prices, T, rep.bounds.s_high_T, H).at(H);
      } catch (...) {
#pragma omp critical(storhz_check_error)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  const double xtol = 1e-9 * std::max(1.0, spec.capacity());
  const PwlFunction sum_low = add_touching(vh, *w_low, xtol);
  const PwlFunction sum_high = add_touching(vh, *w_high, xtol);
  rep.argmax_low = argmax_set(sum_low, sum_low.domain()).argmax;
  rep.argmax_high = argmax_set(sum_high, sum_high.domain()).argmax;

  const double tol = gap_tolerance(spec);
  rep.gap = set_distance(rep.argmax_low, rep.argmax_high);
  if (rep.gap <= tol) {
    rep.gap = 0.0;
    rep.is_forecast_horizon = true;
    rep.s_low_H = rep.s_high_H = shared_level(rep.argmax_low, rep.argmax_high, sum_low, sum_high, tol);
  } else {
    rep.s_low_H = std::min(rep.argmax_low.min(), rep.argmax_high.min());
    rep.s_high_H = std::max(rep.argmax_low.max(), rep.argmax_high.max());
  }
  const TminResult tm = tmin(spec, H);
  rep.t_min = tm.t_min;
  rep.t_min_found = tm.found;
  rep.trace.push_back({T, rep.gap, rep.is_forecast_horizon, rep.s_low_H, rep.s_high_H});
  return rep;
}

double suboptimality_formula(double z_opt_dh, double z_dh, double s_H, Interval interval,
                             double price_floor, double price_cap, double eta_ch, double eta_dis) {
  const double below = -price_floor / eta_ch * (s_H - interval.lo);
  const double above = price_cap * eta_dis * (interval.hi - s_H);
  return z_opt_dh - z_dh + std::max(below, above);
}

SuboptimalityReport suboptimality_bound_at(const StorageSpec& spec, const PriceSeries& prices,
                                           std::size_t H, Interval interval, double s_H) {
  if (interval.lo > interval.hi) throw InputError("suboptimality bound: empty interval");
  if (s_H < interval.lo || s_H > interval.hi) {
    throw InputError("suboptimality bound: s_H outside [s_low_H, s_high_H]");
  }
  const PwlFunction vh = forward_values(spec, prices, H).at(H);
  if (interval.lo < vh.lo() || interval.hi > vh.hi()) {
    throw InputError("suboptimality bound: interval not reachable at H");
  }
  const double z_opt = argmax_set(vh, interval).max_value;
  return evaluate_choice(prices, spec, vh, z_opt, interval, s_H);
}

SuboptimalityReport suboptimality_bound(const StorageSpec& spec, const PriceSeries& prices,
                                        std::size_t H, Interval interval, ShPolicy policy) {
  if (interval.lo > interval.hi) throw InputError("suboptimality bound: empty interval");
  const PwlFunction vh = forward_values(spec, prices, H).at(H);
  const double xtol = 1e-9 * std::max(1.0, spec.capacity());
  interval.lo = snap_to(interval.lo, vh.domain(), xtol);
  interval.hi = snap_to(interval.hi, vh.domain(), xtol);
  if (interval.lo < vh.lo() || interval.hi > vh.hi()) {
    throw InputError("suboptimality bound: interval not reachable at H");
  }
  const ArgmaxResult best = argmax_set(vh, interval);
  const std::optional<double> cross = arm_crossing(prices, spec, interval);

  std::vector<double> candidates;
  if (policy == ShPolicy::min_bound) {
    // The bound is piecewise linear in s_H; its minimum sits on a breakpoint
    // of V_H, an interval end, or where the two arms cross.
    candidates = {interval.lo, interval.hi};
    for (const auto& p : vh.breakpoints()) {
      if (p.x > interval.lo && p.x < interval.hi) candidates.push_back(p.x);
    }
    if (cross) candidates.push_back(*cross);
  } else {
    // V_H is flat on each argmax part, so only the arms vary there.
    for (const auto& part : best.argmax.parts()) {
      candidates.push_back(part.lo);
      candidates.push_back(part.hi);
      if (cross) candidates.push_back(std::clamp(*cross, part.lo, part.hi));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::optional<SuboptimalityReport> pick;
  for (double s : candidates) {
    SuboptimalityReport r = evaluate_choice(prices, spec, vh, best.max_value, interval, s);
    if (!pick || r.bound < pick->bound) pick = r;
  }
  pick->policy = policy;
  return *pick;
}

SuboptimalityReport suboptimality_bound(const StorageSpec& spec, const PriceSeries& prices,
                                        std::size_t H, std::size_t T, ShPolicy policy) {
  const HorizonReport rep = check_forecast_horizon(spec, prices, H, T);
  return suboptimality_bound(spec, prices, H, Interval{rep.s_low_H, rep.s_high_H}, policy);
}

HorizonReport min_forecast_horizon(const StorageSpec& spec, const PriceSeries& prices,
                                   std::size_t H, std::size_t T_max,
                                   const MinHorizonOptions& options) {
  spec.validate();
  require_window(prices, H, T_max);
  const TminResult tm = tmin(spec, H);
  std::size_t T = options.start_at_tmin ? std::max(H, tm.t_min) : H;
  T = std::min(T, T_max);

  std::vector<HorizonTraceRow> trace;
  for (;; ++T) {
    HorizonReport rep = check_forecast_horizon(spec, prices, H, T);
    trace.push_back(rep.trace.front());
    if (rep.is_forecast_horizon || T == T_max) {
      rep.trace = std::move(trace);
      if (!rep.is_forecast_horizon) {
        rep.cap_exhausted = true;
        rep.subopt = suboptimality_bound(spec, prices, H, Interval{rep.s_low_H, rep.s_high_H},
                                         options.policy);
      }
      return rep;
    }
  }
}

FleetReport fleet_min_forecast_horizon(const std::vector<StorageSpec>& specs,
                                       const PriceSeries& prices, std::size_t H,
                                       std::size_t T_max, const MinHorizonOptions& options) {
  if (specs.empty()) throw InputError("fleet: no storage systems");
  FleetReport out;
  out.reports.resize(specs.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out.reports[i] = min_forecast_horizon(specs[i], prices, H, T_max, options);
    } catch (...) {
#pragma omp critical(storhz_fleet_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.all_found = true;
  auto rank = [&](const HorizonReport& r) {
    return r.is_forecast_horizon ? r.T : T_max + 1;
  };
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    out.all_found = out.all_found && out.reports[i].is_forecast_horizon;
    if (rank(out.reports[i]) > rank(out.reports[out.binding])) out.binding = i;
  }
  return out;
}

}  // namespace storhz
