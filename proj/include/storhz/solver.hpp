#pragma once

#include <cstddef>
#include <vector>

#include "storhz/model.hpp"
#include "storhz/pwl.hpp"

namespace storhz {

enum class Direction { forward, backward };

/// Stage value functions of the fixed-terminal problem.
///
/// Forward: stage k holds V_k(s), the best profit over periods 1..k ending at
/// state s. Backward: stage k holds W_k(s), the best profit over periods
/// k+1..T starting at s and meeting the terminal condition. Only stages
/// first()..last() are stored.
class ValueProfile {
 public:
  ValueProfile(Direction direction, std::size_t first, std::vector<PwlFunction> stages);

  Direction direction() const { return direction_; }
  std::size_t first() const { return first_; }
  std::size_t last() const { return first_ + stages_.size() - 1; }
  const PwlFunction& at(std::size_t stage) const;

 private:
  Direction direction_;
  std::size_t first_;
  std::vector<PwlFunction> stages_;
};

/// One forward DP stage: leakage, then the better of a charge and a discharge
/// action, clipped to [s_min, s_max].
PwlFunction forward_stage(const StorageSpec& spec, const PwlFunction& previous, double price);

/// One backward DP stage, the mirror of forward_stage.
PwlFunction backward_stage(const StorageSpec& spec, const PwlFunction& next, double price);

ValueProfile forward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t up_to);

/// W_k for k = T down to stop_at with W_T the single point (s_end, 0).
/// Throws InfeasibleError when s_end cannot be reached from s_init.
ValueProfile backward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                             double s_end, std::size_t stop_at = 0);

/// Same recursion from an arbitrary terminal value function.
ValueProfile backward_values(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                             const PwlFunction& terminal_value, std::size_t stop_at = 0);

/// Optimal schedule over periods 1..T with s_T pinned to s_end.
ScheduleResult solve_fixed_terminal(const StorageSpec& spec, const PriceSeries& prices,
                                    std::size_t T, double s_end);

struct FreeTerminalResult {
  double profit = 0.0;
  IntervalSet argmax;
};

/// Best profit over periods 1..H with s_H free inside `terminal`.
FreeTerminalResult solve_free_terminal(const StorageSpec& spec, const PriceSeries& prices,
                                       std::size_t H, Interval terminal);

/// Walks a forward profile back from (target_t, target_s).
///
/// Ties prefer the charge branch, then the smallest predecessor state. Throws
/// InternalError naming the stage when no predecessor reproduces the value.
Schedule recover_schedule(const StorageSpec& spec, const PriceSeries& prices,
                          const ValueProfile& forward, double target_s, std::size_t target_t);

/// Snaps x onto [lo, hi] when it lies within tol outside; otherwise unchanged.
double snap_to(double x, Interval domain, double tol);

}  // namespace storhz
