#include "storhz/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <string>

#include "storhz/model.hpp"

namespace storhz {

namespace {

constexpr double kSlopeTol = 1e-12;
constexpr double kAbscissaTol = 1e-12;
// Short segments carry slope noise far above kSlopeTol, so a middle point
// within this relative vertical distance of its neighbours' chord also goes.
constexpr double kChordTol = 1e-13;

double interp(const Breakpoint& a, const Breakpoint& b, double x) {
  if (x == a.x) return a.y;
  if (x == b.x) return b.y;
  return a.y + (b.y - a.y) * ((x - a.x) / (b.x - a.x));
}

bool colinear(const Breakpoint& a, const Breakpoint& b, const Breakpoint& c) {
  const double s1 = (b.y - a.y) / (b.x - a.x);
  const double s2 = (c.y - b.y) / (c.x - b.x);
  if (std::abs(s1 - s2) <= kSlopeTol * std::max({1.0, std::abs(s1), std::abs(s2)})) return true;
  const double scale = std::max({1.0, std::abs(a.y), std::abs(b.y), std::abs(c.y)});
  return std::abs(b.y - interp(a, c, b.x)) <= kChordTol * scale;
}

// Sorted input; abscissae closer than the tolerance are merged keeping the
// larger ordinate, then colinear interior points are dropped.
std::vector<Breakpoint> canonical(std::vector<Breakpoint> pts) {
  if (pts.empty()) throw DomainError("piecewise-linear function with empty domain");
  const double scale = 1.0 + std::max(std::abs(pts.front().x), std::abs(pts.back().x));
  const double eps = kAbscissaTol * scale;
  std::vector<Breakpoint> merged;
  merged.reserve(pts.size());
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DomainError("non-finite breakpoint in piecewise-linear function");
    }
    if (!merged.empty() && p.x - merged.back().x <= eps) {
      merged.back().y = std::max(merged.back().y, p.y);
      continue;
    }
    merged.push_back(p);
  }
  std::vector<Breakpoint> out;
  out.reserve(merged.size());
  for (const auto& p : merged) {
    while (out.size() >= 2 && colinear(out[out.size() - 2], out.back(), p)) out.pop_back();
    out.push_back(p);
  }
  return out;
}

PwlFunction make(std::vector<Breakpoint> pts) { return PwlFunction(canonical(std::move(pts))); }

std::vector<Breakpoint> reflected(const PwlFunction& f) {
  std::vector<Breakpoint> pts;
  pts.reserve(f.size());
  for (auto it = f.breakpoints().rbegin(); it != f.breakpoints().rend(); ++it) {
    pts.push_back({-it->x, it->y});
  }
  return pts;
}

// Upper envelope on [a, b] of linear pieces given by their values at a and b.
void append_envelope(double a, double b, const std::vector<std::pair<double, double>>& lines,
                     std::vector<Breakpoint>& out) {
  std::vector<double> ts = {0.0, 1.0};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double da = lines[i].first - lines[j].first;
      const double db = lines[i].second - lines[j].second;
      if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) ts.push_back(da / (da - db));
    }
  }
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& [va, vb] : lines) {
      v = std::max(v, t == 1.0 ? vb : va + t * (vb - va));
    }
    const double x = t == 1.0 ? b : a + t * (b - a);
    if (!out.empty() && out.back().x == x) {
      out.back().y = std::max(out.back().y, v);
    } else {
      out.push_back({x, v});
    }
  }
}

// h(x) = max over y in [x - w, x] ∩ dom(f) of f(y) + r * (x - y), w > 0.
PwlFunction sliding_extend(const PwlFunction& f, double w, double r) {
  const auto pts = f.breakpoints();
  const std::size_t n = pts.size();
  std::vector<double> xs(n), gs(n), ends(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pts[i].x;
    gs[i] = pts[i].y - r * pts[i].x;
    ends[i] = xs[i] + w;
  }
  std::vector<double> events;
  events.reserve(2 * n);
  std::merge(xs.begin(), xs.end(), ends.begin(), ends.end(), std::back_inserter(events));
  events.erase(std::unique(events.begin(), events.end()), events.end());

  const double lo = xs.front();
  const double hi = xs.back();
  auto seg_value = [&](std::size_t j, double x) {
    return interp({xs[j], gs[j]}, {xs[j + 1], gs[j + 1]}, x);
  };

  std::deque<std::size_t> window;
  std::size_t next_in = 0;
  std::size_t right_seg = 0;
  std::size_t left_seg = 0;
  std::vector<Breakpoint> out;
  out.reserve(2 * events.size());
  std::vector<std::pair<double, double>> lines;

  for (std::size_t e = 0; e + 1 < events.size(); ++e) {
    const double a = events[e];
    const double b = events[e + 1];
    while (next_in < n && xs[next_in] <= a) {
      while (!window.empty() && gs[window.back()] <= gs[next_in]) window.pop_back();
      window.push_back(next_in++);
    }
    while (!window.empty() && ends[window.front()] <= a) window.pop_front();

    const double mid = 0.5 * (a + b);
    lines.clear();
    if (!window.empty()) lines.emplace_back(gs[window.front()], gs[window.front()]);
    if (mid > lo && mid < hi) {
      while (xs[right_seg + 1] < mid) ++right_seg;
      lines.emplace_back(seg_value(right_seg, a), seg_value(right_seg, b));
    }
    const double lmid = mid - w;
    if (lmid > lo && lmid < hi) {
      while (xs[left_seg + 1] < lmid) ++left_seg;
      lines.emplace_back(seg_value(left_seg, a - w), seg_value(left_seg, b - w));
    }
    if (lines.empty()) throw InternalError("action_extend: uncovered interval in sweep");
    append_envelope(a, b, lines, out);
  }
  for (auto& p : out) p.y += r * p.x;
  return make(std::move(out));
}

}  // namespace

PwlFunction::PwlFunction(std::vector<Breakpoint> points) {
  if (points.empty()) throw DomainError("piecewise-linear function needs at least one breakpoint");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].x > points[i - 1].x)) {
      throw DomainError("breakpoint abscissae must be strictly increasing");
    }
  }
  pts_ = canonical(std::move(points));
}

PwlFunction PwlFunction::point(double x, double y) { return PwlFunction({{x, y}}); }

PwlFunction PwlFunction::constant(double lo, double hi, double value) {
  if (lo == hi) return point(lo, value);
  return PwlFunction({{lo, value}, {hi, value}});
}

PwlFunction PwlFunction::line(double lo, double hi, double y_at_lo, double slope) {
  if (lo == hi) return point(lo, y_at_lo);
  return PwlFunction({{lo, y_at_lo}, {hi, y_at_lo + slope * (hi - lo)}});
}

double PwlFunction::operator()(double x) const {
  if (!(x >= lo() && x <= hi())) {
    throw DomainError("evaluation at " + std::to_string(x) + " outside [" + std::to_string(lo()) +
                      ", " + std::to_string(hi()) + "]");
  }
  if (pts_.size() == 1) return pts_.front().y;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                             [](double v, const Breakpoint& p) { return v < p.x; });
  if (it == pts_.end()) return pts_.back().y;
  return interp(*(it - 1), *it, x);
}

double PwlFunction::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts_) m = std::max(m, p.y);
  return m;
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (!(iv.lo <= iv.hi)) throw InputError("interval with lo > hi");
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (!parts_.empty() && iv.lo <= parts_.back().hi) {
      parts_.back().hi = std::max(parts_.back().hi, iv.hi);
    } else {
      parts_.push_back(iv);
    }
  }
}

double IntervalSet::min() const {
  if (parts_.empty()) throw InputError("empty interval set");
  return parts_.front().lo;
}

double IntervalSet::max() const {
  if (parts_.empty()) throw InputError("empty interval set");
  return parts_.back().hi;
}

bool IntervalSet::contains(double x, double tol) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Interval& iv) { return x >= iv.lo - tol && x <= iv.hi + tol; });
}

double evaluate(const PwlFunction& f, double x) { return f(x); }

PwlFunction pointwise_max(const PwlFunction& f, const PwlFunction& g) {
  if (f.hi() < g.lo() || g.hi() < f.lo()) {
    throw DomainError("pointwise_max: domains separated by a gap");
  }
  std::vector<double> xs;
  xs.reserve(f.size() + g.size());
  for (const auto& p : f.breakpoints()) xs.push_back(p.x);
  for (const auto& p : g.breakpoints()) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto value_at = [&](double x) {
    double v = -std::numeric_limits<double>::infinity();
    if (f.contains(x)) v = f(x);
    if (g.contains(x)) v = std::max(v, g(x));
    return v;
  };
  auto check_edge = [&](double piece_value, double point_value, double x) {
    if (point_value - piece_value > 1e-9 * (1.0 + std::abs(point_value))) {
      throw DomainError("pointwise_max: result jumps at x = " + std::to_string(x));
    }
  };

  std::vector<Breakpoint> out;
  out.reserve(xs.size() * 2);
  out.push_back({xs.front(), value_at(xs.front())});
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    const bool has_f = f.lo() <= x0 && x1 <= f.hi();
    const bool has_g = g.lo() <= x0 && x1 <= g.hi();
    const double v1 = value_at(x1);
    double piece0 = -std::numeric_limits<double>::infinity();
    double piece1 = piece0;
    if (has_f) {
      piece0 = f(x0);
      piece1 = f(x1);
    }
    if (has_g) {
      const double g0 = g(x0);
      const double g1 = g(x1);
      if (has_f) {
        const double d0 = piece0 - g0;
        const double d1 = piece1 - g1;
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
          const double t = d0 / (d0 - d1);
          const double xc = x0 + t * (x1 - x0);
          const double fc = piece0 + t * (piece1 - piece0);
          const double gc = g0 + t * (g1 - g0);
          out.push_back({xc, std::max(fc, gc)});
        }
      }
      piece0 = std::max(piece0, g0);
      piece1 = std::max(piece1, g1);
    }
    check_edge(piece0, value_at(x0), x0);
    check_edge(piece1, v1, x1);
    out.push_back({x1, v1});
  }
  return make(std::move(out));
}

PwlFunction add(const PwlFunction& f, const PwlFunction& g) {
  const double lo = std::max(f.lo(), g.lo());
  const double hi = std::min(f.hi(), g.hi());
  if (lo > hi) throw DomainError("add: domains do not intersect");
  std::vector<double> xs = {lo, hi};
  for (const auto& p : f.breakpoints()) {
    if (p.x > lo && p.x < hi) xs.push_back(p.x);
  }
  for (const auto& p : g.breakpoints()) {
    if (p.x > lo && p.x < hi) xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Breakpoint> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back({x, f(x) + g(x)});
  return make(std::move(out));
}

PwlFunction rescale_argument(const PwlFunction& f, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InputError("rescale_argument: factor must be positive");
  }
  if (factor == 1.0) return f;
  std::vector<Breakpoint> pts(f.breakpoints().begin(), f.breakpoints().end());
  for (auto& p : pts) p.x *= factor;
  return make(std::move(pts));
}

PwlFunction scale_argument(const PwlFunction& f, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw InputError("scale_argument: rho must lie in (0, 1]");
  return rescale_argument(f, rho);
}

PwlFunction restrict_domain(const PwlFunction& f, double lo, double hi) {
  const double a = std::max(lo, f.lo());
  const double b = std::min(hi, f.hi());
  if (a > b) throw DomainError("restrict_domain: empty intersection");
  if (a == f.lo() && b == f.hi()) return f;
  std::vector<Breakpoint> out;
  out.push_back({a, f(a)});
  for (const auto& p : f.breakpoints()) {
    if (p.x > a && p.x < b) out.push_back(p);
  }
  if (b > a) out.push_back({b, f(b)});
  return make(std::move(out));
}

PwlFunction action_extend(const PwlFunction& f, double shift_per_unit, double reward_per_unit,
                          double max_action) {
  if (shift_per_unit == 0.0 || !std::isfinite(shift_per_unit)) {
    throw InputError("action_extend: shift per unit must be non-zero");
  }
  if (!(max_action >= 0.0) || !std::isfinite(max_action) || !std::isfinite(reward_per_unit)) {
    throw InputError("action_extend: invalid action bound or reward");
  }
  const double width = std::abs(shift_per_unit) * max_action;
  if (width == 0.0) return f;
  const double rate = reward_per_unit / shift_per_unit;
  if (shift_per_unit > 0.0) return sliding_extend(f, width, rate);
  // Mirror x -> -x turns a negative shift into a positive one.
  const PwlFunction mirrored = sliding_extend(PwlFunction(reflected(f)), width, -rate);
  return PwlFunction(reflected(mirrored));
}

double default_argmax_tol(double max_value) { return 1e-9 * (1.0 + std::abs(max_value)); }

ArgmaxResult argmax_set(const PwlFunction& f, Interval sub_domain, std::optional<double> tol) {
  const PwlFunction r = restrict_domain(f, sub_domain.lo, sub_domain.hi);
  const double m = r.max_value();
  const double threshold = m - tol.value_or(default_argmax_tol(m));
  const auto pts = r.breakpoints();
  std::vector<Interval> parts;
  if (pts.size() == 1) {
    parts.push_back({pts[0].x, pts[0].x});
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[i + 1];
    const bool ip = p.y >= threshold;
    const bool iq = q.y >= threshold;
    if (ip && iq) {
      parts.push_back({p.x, q.x});
    } else if (ip) {
      const double t = (p.y - threshold) / (p.y - q.y);
      parts.push_back({p.x, p.x + t * (q.x - p.x)});
    } else if (iq) {
      const double t = (q.y - threshold) / (q.y - p.y);
      parts.push_back({q.x - t * (q.x - p.x), q.x});
    }
  }
  return {m, IntervalSet(std::move(parts))};
}

double set_distance(const IntervalSet& a, const IntervalSet& b) {
  if (a.empty() || b.empty()) throw InputError("set_distance: empty interval set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ia : a.parts()) {
    for (const auto& ib : b.parts()) {
      double d = 0.0;
      if (ia.hi < ib.lo) {
        d = ib.lo - ia.hi;
      } else if (ib.hi < ia.lo) {
        d = ia.lo - ib.hi;
      }
      best = std::min(best, d);
    }
  }
  return best;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b, double tol) {
  std::vector<Interval> out;
  for (const auto& ia : a.parts()) {
    for (const auto& ib : b.parts()) {
      const double lo = std::max(ia.lo, ib.lo - tol);
      const double hi = std::min(ia.hi, ib.hi + tol);
      if (lo <= hi) out.push_back({lo, hi});
    }
  }
  return IntervalSet(std::move(out));
}

void write_csv(std::ostream& os, const PwlFunction& f) {
  char buf[64];
  os << "x,y\n";
  for (const auto& p : f.breakpoints()) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.x, p.y);
    os << buf;
  }
}

}  // namespace storhz
