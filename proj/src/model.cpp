#include "storhz/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace storhz {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InputError("storage spec: " + field + " " + what);
}

}  // namespace

void StorageSpec::validate() const {
  const double fields[] = {s_min, s_max, p_ch_max, p_dis_max, eta_ch, eta_dis, rho, s_init, dt};
  for (double v : fields) {
    if (!std::isfinite(v)) throw InputError("storage spec: non-finite parameter");
  }
  require(s_min >= 0.0, "s_min", "must be non-negative");
  require(s_min < s_max, "s_max", "must exceed s_min");
  require(s_init >= s_min && s_init <= s_max, "s_init", "must lie in [s_min, s_max]");
  require(eta_ch > 0.0 && eta_ch <= 1.0, "eta_ch", "must lie in (0, 1]");
  require(eta_dis > 0.0 && eta_dis <= 1.0, "eta_dis", "must lie in (0, 1]");
  require(rho > 0.0 && rho <= 1.0, "rho", "must lie in (0, 1]");
  require(p_ch_max > 0.0, "p_ch_max", "must be positive");
  require(p_dis_max > 0.0, "p_dis_max", "must be positive");
  require(dt > 0.0, "dt", "must be positive");
}

PriceSeries::PriceSeries(std::vector<double> prices, double price_floor, double price_cap)
    : prices_(std::move(prices)), floor_(price_floor), cap_(price_cap) {
  if (!(floor_ <= 0.0)) throw InputError("price floor must be <= 0");
  if (!(cap_ >= 0.0)) throw InputError("price cap must be >= 0");
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    const double c = prices_[i];
    if (!std::isfinite(c) || c < floor_ || c > cap_) {
      throw InputError("price at period " + std::to_string(i + 1) + " outside [floor, cap]");
    }
  }
}

double PriceSeries::at(std::size_t period) const {
  if (period == 0 || period > prices_.size()) {
    throw InputError("price period " + std::to_string(period) + " out of range");
  }
  return prices_[period - 1];
}

PriceSeries PriceSeries::window(std::size_t first, std::size_t length) const {
  if (first == 0 || first - 1 + length > prices_.size()) {
    throw InputError("price window [" + std::to_string(first) + ", " +
                     std::to_string(first + length - 1) + "] exceeds available data (" +
                     std::to_string(prices_.size()) + " periods)");
  }
  auto begin = prices_.begin() + static_cast<std::ptrdiff_t>(first - 1);
  return PriceSeries(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(length)),
                     floor_, cap_);
}

PriceSeries PriceSeries::extended(std::span<const double> tail) const {
  std::vector<double> all = prices_;
  all.insert(all.end(), tail.begin(), tail.end());
  return PriceSeries(std::move(all), floor_, cap_);
}

void Schedule::append(const Schedule& other, std::size_t count) {
  count = std::min(count, other.size());
  p_ch.insert(p_ch.end(), other.p_ch.begin(), other.p_ch.begin() + static_cast<std::ptrdiff_t>(count));
  p_dis.insert(p_dis.end(), other.p_dis.begin(),
               other.p_dis.begin() + static_cast<std::ptrdiff_t>(count));
  soe.insert(soe.end(), other.soe.begin(), other.soe.begin() + static_cast<std::ptrdiff_t>(count));
}

std::vector<Violation> validate_schedule(const StorageSpec& spec, const PriceSeries& prices,
                                         const Schedule& sched, const Tolerances& tol) {
  const std::size_t n = sched.soe.size();
  if (sched.p_ch.size() != n || sched.p_dis.size() != n) {
    throw InputError("schedule sequences have different lengths");
  }
  if (prices.size() != n) {
    throw InputError("schedule length " + std::to_string(n) + " differs from price length " +
                     std::to_string(prices.size()));
  }
  const double e_tol = tol.energy * std::max(1.0, spec.capacity());
  const double pc_tol = tol.power * std::max(1.0, spec.p_ch_max);
  const double pd_tol = tol.power * std::max(1.0, spec.p_dis_max);
  const double cc_tol = tol.complementarity * spec.p_ch_max * spec.p_dis_max;

  std::vector<Violation> out;
  double prev = spec.s_init;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = i + 1;
    const double pc = sched.p_ch[i];
    const double pd = sched.p_dis[i];
    const double s = sched.soe[i];
    if (pc < -pc_tol) out.push_back({"charge_lower", t, -pc});
    if (pc > spec.p_ch_max + pc_tol) out.push_back({"charge_upper", t, pc - spec.p_ch_max});
    if (pd < -pd_tol) out.push_back({"discharge_lower", t, -pd});
    if (pd > spec.p_dis_max + pd_tol) out.push_back({"discharge_upper", t, pd - spec.p_dis_max});
    if (std::abs(pc * pd) > cc_tol) out.push_back({"complementarity", t, std::abs(pc * pd)});
    if (s < spec.s_min - e_tol) out.push_back({"soe_lower", t, spec.s_min - s});
    if (s > spec.s_max + e_tol) out.push_back({"soe_upper", t, s - spec.s_max});
    const double expected = spec.rho * prev + spec.dt * (spec.eta_ch * pc - pd / spec.eta_dis);
    const double residual = std::abs(s - expected);
    if (residual > e_tol) out.push_back({"soe_update", t, residual});
    prev = s;
  }
  return out;
}

double profit_of(const StorageSpec& spec, const PriceSeries& prices, const Schedule& sched) {
  if (sched.p_ch.size() != sched.p_dis.size() || sched.p_ch.size() > prices.size()) {
    throw InputError("schedule does not match price series");
  }
  double z = 0.0;
  for (std::size_t i = 0; i < sched.p_ch.size(); ++i) {
    z += spec.dt * prices.values()[i] * (sched.p_dis[i] - sched.p_ch[i]);
  }
  return z;
}

double storage_use(const StorageSpec& spec, const Schedule& sched) {
  double use = 0.0;
  for (std::size_t i = 0; i < sched.p_ch.size(); ++i) use += spec.dt * (sched.p_ch[i] + sched.p_dis[i]);
  return use;
}

double propagate_soe(const StorageSpec& spec, std::span<const double> p_ch,
                     std::span<const double> p_dis, std::size_t from_t, std::size_t to_t,
                     double s_from) {
  if (from_t > to_t) throw InputError("propagate_soe: from_t > to_t");
  if (to_t > p_ch.size() || to_t > p_dis.size()) {
    throw InputError("propagate_soe: period " + std::to_string(to_t) + " out of range");
  }
  double s = s_from;
  for (std::size_t k = from_t + 1; k <= to_t; ++k) {
    s = spec.rho * s + spec.dt * (spec.eta_ch * p_ch[k - 1] - p_dis[k - 1] / spec.eta_dis);
  }
  return s;
}

}  // namespace storhz
