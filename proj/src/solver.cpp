#include "storhz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace storhz {

namespace {

double energy_tol(const StorageSpec& spec) { return 1e-9 * std::max(1.0, spec.capacity()); }

void require_horizon(const PriceSeries& prices, std::size_t T) {
  if (T > prices.size()) {
    throw InputError("horizon " + std::to_string(T) + " exceeds price length " +
                     std::to_string(prices.size()));
  }
}

// Forward-reachable interval after T periods, computed with the same clipping
// as the DP recursion.
Interval reachable_interval(const StorageSpec& spec, std::size_t T) {
  double lo = spec.s_init;
  double hi = spec.s_init;
  for (std::size_t k = 0; k < T; ++k) {
    lo = std::max(spec.s_min, spec.rho * lo - spec.discharge_step());
    hi = std::min(spec.s_max, spec.rho * hi + spec.charge_step());
  }
  return {lo, hi};
}

struct Candidate {
  double s_prev;
  double value;
  double p_ch;
  double p_dis;
};

}  // namespace

double snap_to(double x, Interval domain, double tol) {
  if (x < domain.lo && x >= domain.lo - tol) return domain.lo;
  if (x > domain.hi && x <= domain.hi + tol) return domain.hi;
  return x;
}

ValueProfile::ValueProfile(Direction direction, std::size_t first, std::vector<PwlFunction> stages)
    : direction_(direction), first_(first), stages_(std::move(stages)) {
  if (stages_.empty()) throw InternalError("value profile without stages");
}

const PwlFunction& ValueProfile::at(std::size_t stage) const {
  if (stage < first_ || stage > last()) {
    throw InputError("value profile has no stage " + std::to_string(stage));
  }
  return stages_[stage - first_];
}

PwlFunction forward_stage(const StorageSpec& spec, const PwlFunction& previous, double price) {
  const PwlFunction leaked = scale_argument(previous, spec.rho);
  const PwlFunction charge =
      action_extend(leaked, spec.dt * spec.eta_ch, -spec.dt * price, spec.p_ch_max);
  const PwlFunction discharge =
      action_extend(leaked, -spec.dt / spec.eta_dis, spec.dt * price, spec.p_dis_max);
  try {
    return restrict_domain(pointwise_max(charge, discharge), spec.s_min, spec.s_max);
  } catch (const DomainError&) {
    throw InfeasibleError("no state within storage bounds is reachable");
  }
}

PwlFunction backward_stage(const StorageSpec& spec, const PwlFunction& next, double price) {
  const PwlFunction charge =
      action_extend(next, -spec.dt * spec.eta_ch, -spec.dt * price, spec.p_ch_max);
  const PwlFunction discharge =
      action_extend(next, spec.dt / spec.eta_dis, spec.dt * price, spec.p_dis_max);
  // W(s) = G(rho * s)
  const PwlFunction unleaked = rescale_argument(pointwise_max(charge, discharge), 1.0 / spec.rho);
  try {
    return restrict_domain(unleaked, spec.s_min, spec.s_max);
  } catch (const DomainError&) {
    throw InfeasibleError("terminal state cannot be reached within storage bounds");
  }
}

ValueProfile forward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t up_to) {
  spec.validate();
  require_horizon(prices, up_to);
  std::vector<PwlFunction> stages;
  stages.reserve(up_to + 1);
  stages.push_back(PwlFunction::point(spec.s_init, 0.0));
  for (std::size_t k = 1; k <= up_to; ++k) {
    stages.push_back(forward_stage(spec, stages.back(), prices.at(k)));
  }
  return ValueProfile(Direction::forward, 0, std::move(stages));
}

ValueProfile backward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                             double s_end, std::size_t stop_at) {
  spec.validate();
  require_horizon(prices, T);
  const Interval reach = reachable_interval(spec, T);
  const double target = snap_to(s_end, reach, energy_tol(spec));
  if (target < reach.lo || target > reach.hi) {
    throw InfeasibleError("terminal state " + std::to_string(s_end) + " unreachable in " +
                          std::to_string(T) + " periods");
  }
  return backward_values(spec, prices, T, PwlFunction::point(target, 0.0), stop_at);
}

ValueProfile backward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                             const PwlFunction& terminal_value, std::size_t stop_at) {
  spec.validate();
  require_horizon(prices, T);
  if (stop_at > T) throw InputError("backward_values: stop_at beyond horizon");
  std::vector<PwlFunction> stages;
  stages.reserve(T - stop_at + 1);
  stages.push_back(terminal_value);
  for (std::size_t k = T; k > stop_at; --k) {
    stages.push_back(backward_stage(spec, stages.back(), prices.at(k)));
  }
  std::reverse(stages.begin(), stages.end());
  return ValueProfile(Direction::backward, stop_at, std::move(stages));
}

ScheduleResult solve_fixed_terminal(const StorageSpec& spec, const PriceSeries& prices,
                                    std::size_t T, double s_end) {
  const ValueProfile forward = forward_values(spec, prices, T);
  const PwlFunction& last = forward.at(T);
  const double target = snap_to(s_end, last.domain(), energy_tol(spec));
  if (!last.contains(target)) {
    throw InfeasibleError("terminal state " + std::to_string(s_end) + " unreachable in " +
                          std::to_string(T) + " periods");
  }
  ScheduleResult result;
  result.profit = last(target);
  result.schedule = recover_schedule(spec, prices, forward, target, T);
  result.terminal_soe = target;
  return result;
}

FreeTerminalResult solve_free_terminal(const StorageSpec& spec, const PriceSeries& prices,
                                       std::size_t H, Interval terminal) {
  const ValueProfile forward = forward_values(spec, prices, H);
  const PwlFunction& last = forward.at(H);
  if (terminal.hi < last.lo() || terminal.lo > last.hi()) {
    throw InfeasibleError("terminal interval does not meet the reachable states");
  }
  ArgmaxResult best = argmax_set(last, terminal);
  return {best.max_value, std::move(best.argmax)};
}

Schedule recover_schedule(const StorageSpec& spec, const PriceSeries& prices,
                          const ValueProfile& forward, double target_s, std::size_t target_t) {
  if (forward.direction() != Direction::forward || forward.first() != 0 ||
      forward.last() < target_t) {
    throw InputError("recover_schedule needs a forward profile covering the target stage");
  }
  require_horizon(prices, target_t);
  const double xtol = energy_tol(spec);
  double s = snap_to(target_s, forward.at(target_t).domain(), xtol);
  if (!forward.at(target_t).contains(s)) {
    throw InputError("recover_schedule: target state outside the reachable domain");
  }

  Schedule out;
  out.p_ch.assign(target_t, 0.0);
  out.p_dis.assign(target_t, 0.0);
  out.soe.assign(target_t, 0.0);

  const double c = spec.dt * spec.eta_ch;
  const double d = spec.dt / spec.eta_dis;
  std::vector<Candidate> charge;
  std::vector<Candidate> discharge;

  for (std::size_t k = target_t; k >= 1; --k) {
    const PwlFunction& prev = forward.at(k - 1);
    const double price = prices.at(k);
    const double want = forward.at(k)(s);

    auto collect = [&](double wlo, double whi, bool is_charge, std::vector<Candidate>& cands) {
      cands.clear();
      double lo = std::max(wlo, prev.lo());
      double hi = std::min(whi, prev.hi());
      if (lo > hi + xtol) return;
      if (lo > hi) lo = hi = std::clamp(0.5 * (lo + hi), prev.lo(), prev.hi());
      std::vector<double> ys = {lo, hi};
      for (const auto& p : prev.breakpoints()) {
        if (p.x > lo && p.x < hi) ys.push_back(p.x);
      }
      for (double y : ys) {
        Candidate cand{y, prev(y), 0.0, 0.0};
        if (is_charge) {
          cand.p_ch = std::clamp((s - spec.rho * y) / c, 0.0, spec.p_ch_max);
          cand.value -= spec.dt * price * cand.p_ch;
        } else {
          cand.p_dis = std::clamp((spec.rho * y - s) / d, 0.0, spec.p_dis_max);
          cand.value += spec.dt * price * cand.p_dis;
        }
        cands.push_back(cand);
      }
    };
    collect((s - c * spec.p_ch_max) / spec.rho, s / spec.rho, true, charge);
    collect(s / spec.rho, (s + d * spec.p_dis_max) / spec.rho, false, discharge);

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& cand : charge) best = std::max(best, cand.value);
    for (const auto& cand : discharge) best = std::max(best, cand.value);
    const double tol = 1e-9 * (1.0 + std::abs(want));
    if (!(best >= want - 1e3 * tol)) {
      throw InternalError("recover_schedule: no consistent predecessor at stage " +
                          std::to_string(k));
    }
    const double threshold = best - tol;
    const Candidate* pick = nullptr;
    for (const auto* branch : {&charge, &discharge}) {
      for (const auto& cand : *branch) {
        if (cand.value >= threshold && (pick == nullptr || cand.s_prev < pick->s_prev)) pick = &cand;
      }
      if (pick != nullptr) break;
    }
    out.p_ch[k - 1] = pick->p_ch;
    out.p_dis[k - 1] = pick->p_dis;
    out.soe[k - 1] = s;
    s = pick->s_prev;
  }
  return out;
}

}  // namespace storhz
