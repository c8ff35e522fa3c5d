#include "sensched/dutycycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sensched/errors.hpp"

namespace sensched {

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

// ⌊1/z⌋, snapping to the nearest integer when 1/z is within rounding of it.
long reciprocal_floor(double z) {
  const double r = 1.0 / z;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * r) return static_cast<long>(nearest);
  return static_cast<long>(std::floor(r));
}

}  // namespace

double phi_slope(const SystemModel& sys, long beta) {
  if (beta < 1) throw DomainError("segment index must be >= 1");
  return sys.trace_prefix_sum(beta) - static_cast<double>(beta) * sys.trace_of_power(beta);
}

double phi(const SystemModel& sys, double z) {
  if (!(z > 0.0 && z <= 1.0 + 1e-12)) {
    throw DomainError("duty cycle must lie in (0, 1], got " + std::to_string(z));
  }
  const long beta = std::max(1L, reciprocal_floor(std::min(z, 1.0)));
  return phi_slope(sys, beta) * z + sys.trace_of_power(beta);
}

PiecewiseCost piecewise_cost(const SystemModel& sys, long max_alpha) {
  if (max_alpha < 1) throw DomainError("max_alpha must be >= 1");
  PiecewiseCost pc;
  pc.sensor = sys.id();
  for (long a = max_alpha; a >= 1; --a) pc.breakpoints.push_back(1.0 / static_cast<double>(a));
  for (long a = max_alpha; a >= 2; --a) pc.slopes.push_back(phi_slope(sys, a - 1));
  return pc;
}

std::size_t DutyCycleProfile::off_grid_count() const {
  return static_cast<std::size_t>(std::count(reciprocals.begin(), reciprocals.end(), 0L));
}

std::vector<Rational> DutyCycleProfile::exact() const {
  __extension__ typedef __int128 i128;
  std::vector<Rational> out(fractions.size());
  i128 num = 0;
  i128 den = 1;
  long missing = -1;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (reciprocals[i] == 0) {
      if (missing >= 0) throw DomainError("more than one fraction off the reciprocal grid");
      missing = static_cast<long>(i);
      continue;
    }
    out[i] = Rational{1, reciprocals[i]};
    // num/den += 1/α
    const i128 a = reciprocals[i];
    num = num * a + den;
    den = den * a;
    i128 x = num, y = den;
    while (y != 0) {
      const i128 r = x % y;
      x = y;
      y = r;
    }
    num /= x;
    den /= x;
    if (den > std::numeric_limits<std::int64_t>::max()) {
      throw OverflowError("duty-cycle denominators exceed 64 bits");
    }
  }
  if (missing >= 0) {
    out[static_cast<std::size_t>(missing)] =
        Rational::make(static_cast<std::int64_t>(den - num), static_cast<std::int64_t>(den));
  }
  return out;
}

DutyCycleProfile solve_lower_bound(std::span<const SystemModel> systems, const OffDutyBounds& bounds) {
  const std::size_t n = systems.size();
  if (n == 0) throw DimensionError("no sensors");
  if (bounds.per_sensor.size() != n) throw DimensionError("bounds/systems size mismatch");

  std::vector<long> alpha(bounds.per_sensor);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = 1.0 / static_cast<double>(alpha[i]);

  auto remaining = [&] {
    long double s = 0.0L;
    for (double x : f) s += x;
    return static_cast<double>(1.0L - s);
  };
  if (remaining() < -1e-12) {
    throw InfeasibleError("sum of 1/Delta_i exceeds 1; no duty-cycle allocation is feasible");
  }

  long off_grid = -1;
  for (;;) {
    const double budget = remaining();
    if (budget <= 1e-14) break;
    long pick = -1;
    double steepest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] <= 1) continue;
      const double s = phi_slope(systems[i], alpha[i] - 1);
      if (s < steepest) {
        steepest = s;
        pick = static_cast<long>(i);
      }
    }
    if (pick < 0) break;
    const auto i = static_cast<std::size_t>(pick);
    const double next = 1.0 / static_cast<double>(alpha[i] - 1);
    if (budget >= next - f[i] - 1e-15) {
      f[i] = next;
      --alpha[i];
    } else {
      f[i] += budget;
      off_grid = pick;
      break;
    }
  }

  DutyCycleProfile out;
  out.fractions = f;
  out.reciprocals = alpha;
  if (off_grid >= 0) out.reciprocals[static_cast<std::size_t>(off_grid)] = 0;
  for (std::size_t k = 0; k < n; ++k) out.value += phi(systems[k], f[k]);
  return out;
}

namespace {

struct Search {
  long L;
  std::size_t n;
  std::vector<long> need;  // remaining transmissions
  std::vector<long> lo, hi;
  std::vector<long> first, last;
  std::vector<std::size_t> order;  // static preference: descending fraction
  std::vector<int> slots;
  long nodes = 0;
  long node_cap;

  long deadline(std::size_t i) const {
    if (need[i] == 0) return std::numeric_limits<long>::max();
    return last[i] < 0 ? hi[i] - 1 : last[i] + hi[i];
  }

  bool wrap_ok() const {
    for (std::size_t i = 0; i < n; ++i) {
      const long g = L - last[i] + first[i];
      if (g < lo[i] || g > hi[i]) return false;
    }
    return true;
  }

  bool run(long k) {
    if (++nodes > node_cap) {
      throw OverflowError("construction search exceeded " + std::to_string(node_cap) + " nodes");
    }
    if (k == L) return wrap_ok();
    for (std::size_t i = 0; i < n; ++i) {
      if (deadline(i) < k) return false;
    }
    std::vector<std::size_t> cand;
    for (std::size_t i : order) {
      if (need[i] == 0) continue;
      if (last[i] >= 0 && (k - last[i] < lo[i] || k - last[i] > hi[i])) continue;
      cand.push_back(i);
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t a, std::size_t b) { return deadline(a) < deadline(b); });
    for (std::size_t i : cand) {
      const long prev_first = first[i], prev_last = last[i];
      if (first[i] < 0) first[i] = k;
      last[i] = k;
      --need[i];
      slots[static_cast<std::size_t>(k)] = static_cast<int>(i);
      if (run(k + 1)) return true;
      ++need[i];
      first[i] = prev_first;
      last[i] = prev_last;
    }
    return false;
  }
};

}  // namespace

std::optional<Schedule> construct_from_duty_cycles(std::span<const Rational> fractions,
                                                   const ConstructionOptions& opts) {
  const std::size_t n = fractions.size();
  if (n == 0) throw DomainError("no duty cycles");
  std::int64_t L = 1;
  for (const auto& r : fractions) {
    if (r.den <= 0 || r.num <= 0 || r.num > r.den) {
      throw DomainError("duty cycle " + r.to_string() + " outside (0, 1]");
    }
    const auto red = Rational::make(r.num, r.den);
    L = std::lcm(L, red.den);
    if (L > opts.period_cap) {
      throw DomainError("common denominator exceeds the construction cap " +
                        std::to_string(opts.period_cap));
    }
  }
  Search s{L, n, {}, {}, {}, {}, {}, {}, std::vector<int>(static_cast<std::size_t>(L), 0), 0,
           opts.node_cap};
  long total = 0;
  for (const auto& r : fractions) {
    const auto red = Rational::make(r.num, r.den);
    const long k = static_cast<long>(red.num * (L / red.den));
    s.need.push_back(k);
    s.lo.push_back(L / k);
    s.hi.push_back((L + k - 1) / k);
    total += k;
  }
  if (total != L) throw DomainError("duty cycles do not sum to 1");
  s.first.assign(n, -1);
  s.last.assign(n, -1);
  s.order.resize(n);
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return s.need[a] > s.need[b]; });

  // Fix the rotation: the largest share transmits in slot 0.
  const std::size_t lead = s.order.front();
  s.first[lead] = s.last[lead] = 0;
  --s.need[lead];
  s.slots[0] = static_cast<int>(lead);
  if (!s.run(1)) return std::nullopt;
  return Schedule(std::move(s.slots));
}

std::optional<Schedule> construct_from_duty_cycles(const DutyCycleProfile& profile,
                                                   const ConstructionOptions& opts) {
  const auto exact = profile.exact();
  return construct_from_duty_cycles(std::span<const Rational>(exact), opts);
}

}  // namespace sensched
