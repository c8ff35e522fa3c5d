#include "sensched/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sensched/errors.hpp"

namespace sensched {

std::string_view to_string(BoundMode mode) {
  return mode == BoundMode::kLiteral ? "literal" : "linear";
}

BoundMode parse_bound_mode(std::string_view text) {
  if (text == "literal") return BoundMode::kLiteral;
  if (text == "linear") return BoundMode::kLinear;
  throw ValidationError("unknown bound mode '" + std::string(text) + "' (literal|linear)");
}

double bound_lhs(const SystemModel& sys, long ell, long l3, BoundMode mode) {
  // Tr h^l(h^ell P̄ - P̄) = t[ell+l] - t[l] (+ Tr h^l(0) in literal mode).
  double v = (sys.trace_prefix_sum(ell + l3) - sys.trace_prefix_sum(ell)) -
             sys.trace_prefix_sum(l3);
  if (mode == BoundMode::kLiteral) v += sys.noise_prefix_sum(l3);
  return v;
}

namespace {

// Local copy of the prefix tables; the scan is the hot loop of the whole
// bound computation.
class LhsTable {
 public:
  LhsTable(const SystemModel& sys, BoundMode mode) : sys_(sys), mode_(mode) { grow(64); }

  double operator()(long ell, long l3) {
    if (ell + l3 >= static_cast<long>(prefix_.size())) grow(2 * (ell + l3 + 1));
    double v = (prefix_[ell + l3] - prefix_[ell]) - prefix_[l3];
    if (mode_ == BoundMode::kLiteral) v += noise_[l3];
    return v;
  }

 private:
  void grow(long count) {
    prefix_.resize(static_cast<std::size_t>(count) + 1);
    noise_.resize(static_cast<std::size_t>(count) + 1);
    for (long k = 0; k <= count; ++k) {
      prefix_[k] = sys_.trace_prefix_sum(k);
      noise_[k] = sys_.noise_prefix_sum(k);
    }
  }

  const SystemModel& sys_;
  BoundMode mode_;
  std::vector<double> prefix_;
  std::vector<double> noise_;
};

long floor_value(std::size_t n) { return 3 * static_cast<long>(n) - 2; }

void check_pair(std::span<const SystemModel> systems, std::size_t j, std::size_t i) {
  if (i >= systems.size() || j >= systems.size()) throw DimensionError("sensor index out of range");
  if (i == j) throw DimensionError("pair bound needs two distinct sensors");
  if (systems[i].spectral_radius() <= 1.0) {
    throw UnstableAssumptionViolated("off-duty bound for sensor " + std::to_string(i + 1) +
                                     " requires an unstable A (rho = " +
                                     std::to_string(systems[i].spectral_radius()) + ")");
  }
}

long raw_scan(LhsTable& lhs_i, LhsTable& lhs_j, std::size_t n, long scan_cap, std::size_t i) {
  const long top = std::max(1L, 3 * static_cast<long>(n) - 4);
  long best = -1;
  for (long l2 = 1; l2 <= top; ++l2) {
    for (long l3 = 1; l3 <= top; ++l3) {
      const double rhs = lhs_j(l2, l3);
      long l1 = 0;
      while (lhs_i(l1 + 1 + l2, l3) <= rhs) {
        ++l1;
        if (l1 > scan_cap) {
          throw BoundSearchOverflow("l1 scan for sensor " + std::to_string(i + 1) +
                                    " exceeded cap " + std::to_string(scan_cap));
        }
      }
      if (l1 >= 1) best = std::max(best, l1 + l2 + l3);
    }
  }
  return best;
}

long finish(long raw, std::size_t n, const BoundOptions& opts) {
  const long floored = floor_value(n);
  if (raw < 0) return floored;
  return std::max(floored, raw + opts.slack);
}

}  // namespace

long pair_bound_raw(std::span<const SystemModel> systems, std::size_t j, std::size_t i,
                    const BoundOptions& opts) {
  check_pair(systems, j, i);
  LhsTable lhs_i(systems[i], opts.mode);
  LhsTable lhs_j(systems[j], opts.mode);
  return raw_scan(lhs_i, lhs_j, systems.size(), opts.scan_cap, i);
}

long pair_bound(std::span<const SystemModel> systems, std::size_t j, std::size_t i,
                const BoundOptions& opts) {
  return finish(pair_bound_raw(systems, j, i, opts), systems.size(), opts);
}

OffDutyBounds all_bounds(std::span<const SystemModel> systems, const BoundOptions& opts) {
  const std::size_t n = systems.size();
  if (n < 2) throw DimensionError("bounds need at least two sensors");
  for (std::size_t i = 0; i < n; ++i) check_pair(systems, (i + 1) % n, i);

  std::vector<LhsTable> tables;
  tables.reserve(n);
  for (const auto& s : systems) tables.emplace_back(s, opts.mode);

  OffDutyBounds out;
  out.options = opts;
  out.per_pair.assign(n, std::vector<long>(n, 0));
  out.per_sensor.assign(n, floor_value(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      out.per_pair[j][i] = finish(raw_scan(tables[i], tables[j], n, opts.scan_cap, i), n, opts);
      out.per_sensor[i] = std::max(out.per_sensor[i], out.per_pair[j][i]);
    }
  }
  return out;
}

OffDutyBounds explicit_bounds(std::vector<long> per_sensor, const BoundOptions& opts) {
  for (long d : per_sensor) {
    if (d < 1) throw ValidationError("off-duty bounds must be positive");
  }
  OffDutyBounds out;
  out.options = opts;
  out.per_pair.assign(per_sensor.size(), std::vector<long>(per_sensor.size(), 0));
  out.per_sensor = std::move(per_sensor);
  return out;
}

std::vector<BoundMode> matching_bound_modes(std::span<const CalibrationCase> cases, int slack) {
  std::vector<BoundMode> out;
  for (BoundMode mode : {BoundMode::kLiteral, BoundMode::kLinear}) {
    BoundOptions opts;
    opts.mode = mode;
    opts.slack = slack;
    const bool all_match = std::all_of(cases.begin(), cases.end(), [&](const CalibrationCase& c) {
      return all_bounds(c.systems, opts).per_sensor == c.expected;
    });
    if (all_match) out.push_back(mode);
  }
  return out;
}

}  // namespace sensched
