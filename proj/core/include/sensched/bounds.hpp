#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensched/model.hpp"

namespace sensched {

/// How h^l acts on the covariance difference in the off-duty inequality.
///   kLiteral: the affine map, h^l(X) = A^l X A^lT + sum_{k<l} A^k Q A^kT
///   kLinear:  the linear part only, A^l X A^lT
enum class BoundMode { kLiteral, kLinear };

std::string_view to_string(BoundMode mode);
BoundMode parse_bound_mode(std::string_view text);

struct BoundOptions {
  BoundMode mode = BoundMode::kLiteral;
  // Added to the largest feasible l1+l2+l3. The textbook formula uses 1.
  int slack = 2;
  long scan_cap = 100'000;
};

struct OffDutyBounds {
  // per_pair[j][i] = bound on sensor i's off-duty time imposed by sensor j
  // (0 on the diagonal).
  std::vector<std::vector<long>> per_pair;
  std::vector<long> per_sensor;
  BoundOptions options;
};

/// Tr[sum_{l<l3} h^l(h^ell(P̄) - P̄)] under the given mode.
double bound_lhs(const SystemModel& sys, long ell, long l3, BoundMode mode);

/// Largest feasible l1+l2+l3 for the pair, or -1 when no (l1,l2,l3) is feasible.
long pair_bound_raw(std::span<const SystemModel> systems, std::size_t j, std::size_t i,
                    const BoundOptions& opts = {});

/// Delta_{j,i}: raw + slack, floored at 3n-2.
long pair_bound(std::span<const SystemModel> systems, std::size_t j, std::size_t i,
                const BoundOptions& opts = {});

OffDutyBounds all_bounds(std::span<const SystemModel> systems, const BoundOptions& opts = {});

/// Bounds supplied by the caller, bypassing the search (e.g. fixed by config).
OffDutyBounds explicit_bounds(std::vector<long> per_sensor, const BoundOptions& opts = {});

struct CalibrationCase {
  std::span<const SystemModel> systems;
  std::vector<long> expected;
};

/// Modes whose all_bounds(...) equals the expected vector on every case, for
/// the given slack.
std::vector<BoundMode> matching_bound_modes(std::span<const CalibrationCase> cases, int slack);

}  // namespace sensched
