#include "storhz/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>

#include "storhz/solver.hpp"

namespace storhz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Source {
  double s;
  double value;
};

// Relaxes every action of one period from one source into `best`.
void relax(const StorageSpec& spec, const GridSpec& grid, double price, const Source& src,
           std::vector<double>& best) {
  const double h = grid_step(spec, grid);
  const double eps = 1e-12 * std::max(1.0, spec.capacity());
  const std::size_t n = grid.action_points;
  const double base = spec.rho * src.s;
  auto land = [&](double s_next, double value) {
    if (s_next < spec.s_min - eps || s_next > spec.s_max + eps) return;
    const double pos = std::round((s_next - spec.s_min) / h);
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, double(grid.state_points - 1)));
    if (value > best[idx]) best[idx] = value;
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double a = spec.p_ch_max * double(j) / double(n - 1);
    land(base + spec.dt * spec.eta_ch * a, src.value - spec.dt * price * a);
  }
  for (std::size_t j = 1; j < n; ++j) {
    const double a = spec.p_dis_max * double(j) / double(n - 1);
    land(base - spec.dt * a / spec.eta_dis, src.value + spec.dt * price * a);
  }
}

std::vector<Source> grid_sources(const StorageSpec& spec, const GridSpec& grid,
                                 const std::vector<double>& values) {
  std::vector<Source> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > kNegInf) out.push_back({grid_state(spec, grid, i), values[i]});
  }
  return out;
}

void check_inputs(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                  IndexWindow terminal, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  if (T == 0 || T > prices.size()) throw InputError("grid oracle: bad horizon");
  if (terminal.first > terminal.last || terminal.last >= grid.state_points) {
    throw InputError("grid oracle: terminal window outside the grid");
  }
}

GridResult pick_terminal(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                         IndexWindow terminal, const GridSpec& grid,
                         const std::vector<double>& values) {
  GridResult r;
  r.profit = kNegInf;
  for (std::size_t i = terminal.first; i <= terminal.last; ++i) {
    if (values[i] > r.profit) {
      r.profit = values[i];
      r.terminal_index = i;
    }
  }
  if (r.profit == kNegInf) throw InfeasibleError("grid oracle: terminal window unreachable");
  r.error_bound = grid_error_bound(spec, prices, T, grid);
  return r;
}

// Best reward of any action moving grid index i to j in one period, or -inf.
// Row 0 of stage 1 is the exact initial state.
std::vector<std::vector<double>> transition_table(const StorageSpec& spec, const GridSpec& grid,
                                                  double price, const std::vector<Source>& from) {
  std::vector<std::vector<double>> table(from.size(),
                                         std::vector<double>(grid.state_points, kNegInf));
  for (std::size_t i = 0; i < from.size(); ++i) relax(spec, grid, price, {from[i].s, 0.0}, table[i]);
  return table;
}

}  // namespace

void GridSpec::validate() const {
  if (state_points < 3) throw InputError("grid: state_points must be at least 3");
  if (action_points < 2) throw InputError("grid: action_points must be at least 2");
}

GridSpec matched_grid(const StorageSpec& spec, std::size_t state_points) {
  GridSpec g{state_points, 2};
  g.validate();
  const double widest = std::max(spec.charge_step(), spec.discharge_step());
  g.action_points = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(widest / grid_step(spec, g) - 1e-9)) + 1);
  return g;
}

double grid_step(const StorageSpec& spec, const GridSpec& grid) {
  return spec.capacity() / double(grid.state_points - 1);
}

double grid_state(const StorageSpec& spec, const GridSpec& grid, std::size_t index) {
  if (index + 1 == grid.state_points) return spec.s_max;
  return spec.s_min + double(index) * grid_step(spec, grid);
}

std::size_t nearest_index(const StorageSpec& spec, const GridSpec& grid, double s) {
  const double pos = std::round((s - spec.s_min) / grid_step(spec, grid));
  return static_cast<std::size_t>(std::clamp(pos, 0.0, double(grid.state_points - 1)));
}

IndexWindow window_around(const StorageSpec& spec, const GridSpec& grid, double s,
                          std::size_t radius) {
  const std::size_t c = nearest_index(spec, grid, s);
  return {c >= radius ? c - radius : 0, std::min(c + radius, grid.state_points - 1)};
}

double grid_error_bound(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                        const GridSpec& grid) {
  double cmax = 0.0;
  for (std::size_t t = 1; t <= T; ++t) cmax = std::max(cmax, std::abs(prices.at(t)));
  const double lipschitz = cmax / spec.eta_ch;
  const double action_step =
      std::max(spec.charge_step(), spec.discharge_step()) / double(grid.action_points - 1);
  return lipschitz * (grid_step(spec, grid) + action_step) * double(T);
}

GridResult grid_dp_solve(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                         IndexWindow terminal, const GridSpec& grid) {
  check_inputs(spec, prices, T, terminal, grid);
  const std::size_t N = grid.state_points;
  std::vector<Source> sources{{spec.s_init, 0.0}};
  std::vector<double> next(N);
  for (std::size_t t = 1; t <= T; ++t) {
    std::fill(next.begin(), next.end(), kNegInf);
    const double price = prices.at(t);
    const auto count = static_cast<std::ptrdiff_t>(sources.size());
#pragma omp parallel
    {
      std::vector<double> local(N, kNegInf);
#pragma omp for schedule(static) nowait
      for (std::ptrdiff_t i = 0; i < count; ++i) relax(spec, grid, price, sources[i], local);
      // max is exact and order free, so the merge order cannot change the result
#pragma omp critical(storhz_grid_merge)
      for (std::size_t k = 0; k < N; ++k) next[k] = std::max(next[k], local[k]);
    }
    sources = grid_sources(spec, grid, next);
  }
  return pick_terminal(spec, prices, T, terminal, grid, next);
}

GridResult grid_dp_solve_serial(const StorageSpec& spec, const PriceSeries& prices, std::size_t T,
                                IndexWindow terminal, const GridSpec& grid) {
  check_inputs(spec, prices, T, terminal, grid);
  std::vector<Source> sources{{spec.s_init, 0.0}};
  std::vector<double> next(grid.state_points);
  for (std::size_t t = 1; t <= T; ++t) {
    std::fill(next.begin(), next.end(), kNegInf);
    for (const auto& src : sources) relax(spec, grid, prices.at(t), src, next);
    sources = grid_sources(spec, grid, next);
  }
  return pick_terminal(spec, prices, T, terminal, grid, next);
}

std::vector<std::vector<double>> enumerate_optimal_trajectories(
    const StorageSpec& spec, const PriceSeries& prices, std::size_t T, double s_end,
    const GridSpec& grid, double tol, std::size_t max_paths) {
  spec.validate();
  grid.validate();
  if (T == 0 || T > prices.size()) throw InputError("enumerate: bad horizon");
  if (grid.state_points > 41 || T > 12) {
    throw SizeLimitError("enumerate: grid too large for exhaustive enumeration");
  }
  const std::size_t N = grid.state_points;
  std::vector<Source> all_states;
  for (std::size_t i = 0; i < N; ++i) all_states.push_back({grid_state(spec, grid, i), 0.0});

  // tables[t-1][i][j]: reward of period t from source i to grid index j
  std::vector<std::vector<std::vector<double>>> tables;
  tables.push_back(transition_table(spec, grid, prices.at(1), {{spec.s_init, 0.0}}));
  for (std::size_t t = 2; t <= T; ++t) {
    tables.push_back(transition_table(spec, grid, prices.at(t), all_states));
  }

  const std::size_t goal = nearest_index(spec, grid, s_end);
  // back[t][i]: best reward of periods t+1..T from grid index i to goal
  std::vector<std::vector<double>> back(T + 1, std::vector<double>(N, kNegInf));
  back[T][goal] = 0.0;
  for (std::size_t t = T - 1; t >= 1; --t) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        const double r = tables[t][i][j];
        if (r > kNegInf && back[t + 1][j] > kNegInf) back[t][i] = std::max(back[t][i], r + back[t + 1][j]);
      }
    }
  }
  double opt = kNegInf;
  for (std::size_t j = 0; j < N; ++j) {
    const double r = tables[0][0][j];
    if (r > kNegInf && back[1][j] > kNegInf) opt = std::max(opt, r + back[1][j]);
  }
  if (opt == kNegInf) throw InfeasibleError("enumerate: terminal state unreachable on the grid");

  std::vector<std::vector<double>> paths;
  std::vector<std::size_t> stack;
  // Depth-first over edges that still admit a completion within tol.
  auto dfs = [&](auto&& self, std::size_t t, std::size_t from, double prefix) -> void {
    if (t > T) {
      if (paths.size() >= max_paths) throw SizeLimitError("enumerate: too many optimal paths");
      std::vector<double> states;
      for (std::size_t idx : stack) states.push_back(grid_state(spec, grid, idx));
      paths.push_back(std::move(states));
      return;
    }
    const auto& row = tables[t - 1][t == 1 ? 0 : from];
    for (std::size_t j = 0; j < N; ++j) {
      if (row[j] == kNegInf || back[t][j] == kNegInf) continue;
      if (prefix + row[j] + back[t][j] < opt - tol) continue;
      stack.push_back(j);
      self(self, t + 1, j, prefix + row[j]);
      stack.pop_back();
    }
  };
  dfs(dfs, 1, 0, 0.0);
  return paths;
}

FalsifierVerdict continuation_falsifier(const StorageSpec& spec, const PriceSeries& prices_T,
                                        std::size_t H, std::size_t n_samples,
                                        std::optional<std::size_t> continuation_len,
                                        std::uint64_t seed, double tol) {
  spec.validate();
  const std::size_t T = prices_T.size();
  if (H == 0 || H > T) throw InputError("falsifier: need 1 <= H <= T");
  const std::size_t L = continuation_len.value_or(
      static_cast<std::size_t>(
          std::ceil(spec.capacity() / std::min(spec.charge_step(), spec.discharge_step()))) +
      2);

  FalsifierVerdict verdict;
  const PwlFunction terminal = PwlFunction::constant(spec.s_min, spec.s_max, 0.0);
  const PwlFunction vh = forward_values(spec, prices_T, H).at(H);
  auto optimal_sH = [&](const PriceSeries& ext) {
    const PwlFunction wh = backward_values(spec, ext, ext.size(), terminal, H).at(H);
    return argmax_set(add(vh, wh), vh.domain()).argmax;
  };
  if (L == 0) {
    verdict.common = optimal_sH(prices_T);
    return verdict;
  }

  const double lo = prices_T.floor();
  const double hi = prices_T.cap();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::size_t> block(1, std::max<std::size_t>(1, L / 4));
  std::vector<std::vector<double>> tails(std::max<std::size_t>(n_samples, 2));
  for (std::size_t k = 0; k < tails.size(); ++k) {
    auto& tail = tails[k];
    if (k == 0) {
      tail.assign(L, lo);
    } else if (k == 1) {
      tail.assign(L, hi);
    } else if (k % 2 == 0) {
      for (std::size_t i = 0; i < L; ++i) tail.push_back(uniform(rng));
    } else {
      while (tail.size() < L) {
        const double level = coin(rng) ? hi : lo;
        tail.insert(tail.end(), std::min(block(rng), L - tail.size()), level);
      }
    }
  }

  std::vector<IntervalSet> sets(tails.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(tails.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      sets[k] = optimal_sH(prices_T.extended(tails[k]));
    } catch (...) {
#pragma omp critical(storhz_falsifier_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  verdict.common = sets[0];
  verdict.samples = sets.size();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    IntervalSet next = intersect(verdict.common, sets[k], tol);
    if (next.empty()) {
      verdict.change_found = true;
      verdict.witness = tails[k];
      verdict.witness_argmax = sets[k];
      break;
    }
    verdict.common = std::move(next);
  }
  return verdict;
}

}  // namespace storhz
