#pragma once

// Brute-force reference solvers. Test support only; nothing in horizon or
// rolling calls into this header.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "storhz/model.hpp"
#include "storhz/pwl.hpp"

namespace storhz {

struct SizeLimitError : std::length_error {
  using std::length_error::length_error;
};

struct GridSpec {
  std::size_t state_points = 101;
  std::size_t action_points = 11;

  void validate() const;
};

/// Grid whose action levels are spaced no wider than the state step, so a
/// single period can land on any grid point in its reach. The error bound of
/// grid_dp_solve is stated for grids of this kind.
GridSpec matched_grid(const StorageSpec& spec, std::size_t state_points);

/// Inclusive range of grid indices accepted as terminal states.
struct IndexWindow {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct GridResult {
  double profit = 0.0;
  // |grid profit - exact profit| is expected below this.
  double error_bound = 0.0;
  std::size_t terminal_index = 0;
};

double grid_step(const StorageSpec& spec, const GridSpec& grid);
double grid_state(const StorageSpec& spec, const GridSpec& grid, std::size_t index);
std::size_t nearest_index(const StorageSpec& spec, const GridSpec& grid, double s);

/// Window of +-radius grid points around the point nearest to s.
IndexWindow window_around(const StorageSpec& spec, const GridSpec& grid, double s,
                          std::size_t radius);

/// (max |C_t| / eta_ch) * (state step + largest action energy step) * T.
double grid_error_bound(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                        const GridSpec& grid);

/// Grid DP over periods 1..T. Period 1 starts from the exact s_init; every
/// post-action state is rounded to the nearest grid point. Actions are the
/// levels A*j/(action_points-1) of each branch. Parallel over source states.
GridResult grid_dp_solve(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                         IndexWindow terminal, const GridSpec& grid);

/// Single-threaded reference for grid_dp_solve; results are bit-identical.
GridResult grid_dp_solve_serial(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                                IndexWindow terminal, const GridSpec& grid);

/// Every grid path s_1..s_T (state values) ending at the grid point nearest to
/// s_end whose profit is within tol of the grid optimum. Paths are listed in
/// lexicographic order of their index sequences.
std::vector<std::vector<double>> enumerate_optimal_trajectories(
    const StorageSpec& spec, const PriceSeries& prices, std::size_t T, double s_end,
    const GridSpec& grid, double tol, std::size_t max_paths = 100000);

struct FalsifierVerdict {
  bool change_found = false;
  std::size_t samples = 0;
  // s_H values optimal for every continuation examined so far.
  IntervalSet common;
  // First continuation that emptied the common set.
  std::optional<std::vector<double>> witness;
  IntervalSet witness_argmax;
};

/// Appends sampled price continuations to prices_T, solves each extended
/// problem exactly with a free terminal, and intersects the optimal s_H sets.
/// Samples 0 and 1 are all-floor and all-cap; the rest alternate between
/// uniform draws and floor/cap block mixtures. Without continuation_len the
/// length is long enough to sweep the whole capacity; a zero length means no
/// continuation and therefore no change.
FalsifierVerdict continuation_falsifier(const StorageSpec& spec, const PriceSeries& prices_T,
                                        std::size_t H, std::size_t n_samples,
                                        std::optional<std::size_t> continuation_len = std::nullopt,
                                        std::uint64_t seed = 20240101, double tol = 1e-6);

}  // namespace storhz
