#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace storhz {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct Breakpoint {
  double x = 0.0;
  double y = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Continuous piecewise-linear function on a closed interval [lo, hi].
///
/// Values outside the domain are minus infinity. The breakpoint list is kept
/// canonical: strictly increasing x, no interior point colinear with its
/// neighbours (relative slope tolerance 1e-12). A single breakpoint is a
/// function defined at one point.
class PwlFunction {
 public:
  explicit PwlFunction(std::vector<Breakpoint> points);

  static PwlFunction point(double x, double y);
  static PwlFunction constant(double lo, double hi, double value);
  static PwlFunction line(double lo, double hi, double y_at_lo, double slope);

  double lo() const { return pts_.front().x; }
  double hi() const { return pts_.back().x; }
  Interval domain() const { return {lo(), hi()}; }
  bool contains(double x) const { return x >= lo() && x <= hi(); }
  std::size_t size() const { return pts_.size(); }
  std::span<const Breakpoint> breakpoints() const { return pts_; }

  /// Throws DomainError outside [lo, hi].
  double operator()(double x) const;
  double max_value() const;

 private:
  std::vector<Breakpoint> pts_;
};

/// Sorted, disjoint closed intervals; single points are intervals with lo == hi.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  bool empty() const { return parts_.empty(); }
  std::span<const Interval> parts() const { return parts_; }
  double min() const;
  double max() const;
  bool contains(double x, double tol = 0.0) const;

 private:
  std::vector<Interval> parts_;
};

double evaluate(const PwlFunction& f, double x);

/// max(f, g) on the union of domains. Throws DomainError when the domains are
/// separated by a gap or when the maximum would jump at a domain edge.
PwlFunction pointwise_max(const PwlFunction& f, const PwlFunction& g);

/// f + g on the intersection of domains.
PwlFunction add(const PwlFunction& f, const PwlFunction& g);

/// h(x) = f(x / rho) for 0 < rho <= 1.
PwlFunction scale_argument(const PwlFunction& f, double rho);

/// h(x) = f(x / factor) for any factor > 0.
PwlFunction rescale_argument(const PwlFunction& f, double factor);

/// f restricted to [lo, hi] ∩ domain(f).
PwlFunction restrict_domain(const PwlFunction& f, double lo, double hi);

/// h(x) = max over a in [0, max_action] of f(x - shift_per_unit * a) + reward_per_unit * a.
///
/// Exact sup-convolution of f with a bounded linear action. The maximisers are
/// either breakpoints of f inside the action window or the window edges, so
/// the result is computed with a single sweep and a monotone deque.
PwlFunction action_extend(const PwlFunction& f, double shift_per_unit, double reward_per_unit,
                          double max_action);

struct ArgmaxResult {
  double max_value = 0.0;
  IntervalSet argmax;
};

/// Default flat-segment tolerance: 1e-9 * (1 + |max|).
double default_argmax_tol(double max_value);

/// Maximum of f over sub_domain ∩ domain(f) and every x reaching it within tol.
ArgmaxResult argmax_set(const PwlFunction& f, Interval sub_domain,
                        std::optional<double> tol = std::nullopt);

/// Smallest |x - y| over x in a, y in b.
double set_distance(const IntervalSet& a, const IntervalSet& b);

/// Points of a lying within tol of b.
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b, double tol = 0.0);

/// "x,y" lines with a header, for plotting.
void write_csv(std::ostream& os, const PwlFunction& f);

}  // namespace storhz
