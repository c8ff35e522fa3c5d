#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensched/errors.hpp"
#include "sensched/model.hpp"

namespace sensched {

// Counter vector ν: ν[i] = slots since sensor i last transmitted (1 = just now).
using Counters = std::vector<int>;

/// One period of a periodic schedule. Slots hold 0-based sensor indices;
/// the text form ("3,1,2") is 1-based.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<int> slots);

  static Schedule parse(std::string_view text);

  std::size_t period() const { return slots_.size(); }
  const std::vector<int>& slots() const { return slots_; }
  int operator[](std::size_t k) const { return slots_[k]; }
  bool empty() const { return slots_.empty(); }

  /// Number of slots assigned to `sensor` in one period.
  std::size_t count(int sensor) const;
  bool contains(int sensor) const { return count(sensor) > 0; }
  int max_sensor() const;

  std::string to_string() const;

  Schedule rotated(std::size_t k) const;
  Schedule repeated(std::size_t times) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<int> slots_;
};

/// True when `a` is a cyclic rotation of `b`.
bool equal_up_to_rotation(const Schedule& a, const Schedule& b);

/// Rotation that makes the slot sequence lexicographically smallest.
Schedule canonical_rotation(const Schedule& s);

/// Cyclic off-duty durations of `sensor`, wraparound gap first.
/// Throws AbsentSensor when the sensor never transmits.
std::vector<long> gap_vector(const Schedule& sched, int sensor);

struct CostBreakdown {
  std::vector<double> per_sensor;
  double total = 0.0;
};

/// Exact long-run average of sum_i Tr[P_k^i] under the periodic schedule.
/// A stable sensor that never transmits contributes Tr[P^Lyn]; an unstable one
/// raises InfiniteCost.
CostBreakdown evaluate_cost(std::span<const SystemModel> systems, const Schedule& sched);

/// Per-sensor cost of a gap vector with period L.
double gap_cost(const SystemModel& sys, std::span<const long> gaps, std::size_t period);

/// b ≺ a: every sorted-descending prefix sum of b is at most that of a and the totals agree.
template <typename T>
bool majorizes(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw DimensionError("majorizes: length mismatch");
  std::vector<T> sa(a.begin(), a.end());
  std::vector<T> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end(), std::greater<>());
  std::sort(sb.begin(), sb.end(), std::greater<>());
  T pa{};
  T pb{};
  for (std::size_t k = 0; k < sa.size(); ++k) {
    pa += sa[k];
    pb += sb[k];
    if (pb > pa) return false;
  }
  return pa == pb;
}

template <typename T>
bool majorizes(const std::vector<T>& a, const std::vector<T>& b) {
  return majorizes(std::span<const T>(a), std::span<const T>(b));
}

struct RefineStats {
  std::size_t passes = 0;
  std::size_t accepted_swaps = 0;
};

/// Pairwise slot-swap hill climbing. A swap is taken only when every sensor's
/// new gap vector is majorized by its old one and at least one sorted gap
/// vector changes; each accepted swap must lower the cost (checked, throws
/// ModelError otherwise).
Schedule refine_uniformity(std::span<const SystemModel> systems, const Schedule& sched,
                           std::size_t max_passes = 50, RefineStats* stats = nullptr);

}  // namespace sensched
