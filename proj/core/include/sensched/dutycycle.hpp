#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensched/bounds.hpp"
#include "sensched/model.hpp"
#include "sensched/schedule.hpp"

namespace sensched {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Slope of φ on the segment z ∈ [1/(β+1), 1/β]:
/// Σ_{j<β} Tr[h^j(P̄)] - β Tr[h^β(P̄)]. Always negative.
double phi_slope(const SystemModel& sys, long beta);

/// Cost per slot of a sensor transmitting with duty cycle z when the
/// off-duty times are as even as possible. Throws DomainError unless 0 < z <= 1.
double phi(const SystemModel& sys, double z);

struct PiecewiseCost {
  int sensor = 0;
  std::vector<double> breakpoints;  // 1/α for α = max_alpha, ..., 1 (increasing z)
  std::vector<double> slopes;       // slopes[k] on [breakpoints[k], breakpoints[k+1]]
};

PiecewiseCost piecewise_cost(const SystemModel& sys, long max_alpha);

struct DutyCycleProfile {
  std::vector<double> fractions;
  std::vector<long> reciprocals;  // α with f = 1/α, or 0 when off the grid
  double value = 0.0;             // Σ_i φ_i(f_i)

  std::size_t off_grid_count() const;
  /// Exact fractions; the off-grid one is 1 minus the others.
  /// Throws OverflowError if the denominators do not fit in 64 bits.
  std::vector<Rational> exact() const;
};

/// Minimises Σ φ_i(f_i) subject to Σ f_i = 1 and 1/Δ_i <= f_i by filling the
/// steepest segment first. Throws InfeasibleError when Σ 1/Δ_i > 1.
DutyCycleProfile solve_lower_bound(std::span<const SystemModel> systems, const OffDutyBounds& bounds);

struct ConstructionOptions {
  long period_cap = 1000;
  long node_cap = 50'000'000;
};

/// Schedule of period L = lcm(denominators) in which sensor i gets f_i·L slots
/// and all of its cyclic gaps lie in {⌊1/f_i⌋, ⌈1/f_i⌉}; nullopt when none exists.
/// DomainError when the fractions do not sum to 1 or L exceeds the cap.
std::optional<Schedule> construct_from_duty_cycles(std::span<const Rational> fractions,
                                                   const ConstructionOptions& opts = {});
std::optional<Schedule> construct_from_duty_cycles(const DutyCycleProfile& profile,
                                                   const ConstructionOptions& opts = {});

}  // namespace sensched
