#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sensched/bounds.hpp"
#include "sensched/model.hpp"
#include "sensched/schedule.hpp"

namespace sensched {

/// Deterministic average-cost MDP over counter vectors. Taking action i resets
/// ν[i] to 1 and advances every other counter; actions that push a counter past
/// its off-duty bound are not allowed. States are kept in DFS discovery order
/// from the start state (1, 2, ..., n).
struct MdpModel {
  int n = 0;
  std::vector<long> bounds;
  std::vector<std::uint16_t> counters;  // n entries per state
  std::vector<double> cost;             // Σ_i Tr[h_i^{ν_i - 1}(P̄_i)], reward is its negative
  std::vector<std::int32_t> successor;  // n entries per state, -1 when not allowed
  std::int32_t start = 0;
  std::size_t dead_ends_removed = 0;

  std::size_t size() const { return cost.size(); }
  Counters state(std::size_t s) const;
  double reward(std::size_t s) const { return -cost[s]; }
  std::int32_t next(std::size_t s, int action) const {
    return successor[s * static_cast<std::size_t>(n) + static_cast<std::size_t>(action)];
  }
  /// Index of a counter vector, or -1 when it is not a state.
  std::int32_t find(const Counters& v) const;
};

struct MdpBuildOptions {
  std::size_t state_cap = 5'000'000;
};

/// Throws StateSpaceOverflow past the cap and ModelError when the pruned state
/// graph is not strongly connected.
MdpModel build_mdp(std::span<const SystemModel> systems, const OffDutyBounds& bounds,
                   const MdpBuildOptions& opts = {});

struct MdpSolution {
  double gain = 0.0;  // optimal average reward g* (negative of the optimal cost)
  std::vector<int> policy;
  std::vector<double> bias;
  std::vector<std::int32_t> cycle_states;
  Schedule schedule;
  std::size_t iterations = 0;
};

struct MdpSolveOptions {
  std::size_t iteration_cap = 10'000;
};

/// Howard policy iteration specialised to deterministic transitions.
MdpSolution solve_average_reward(const MdpModel& model, const MdpSolveOptions& opts = {});

/// Follows the policy from the start state until a state repeats and returns
/// the actions around the cycle.
Schedule extract_schedule(const MdpModel& model, const MdpSolution& solution);

/// max over states of |max_a {r(ν) - g + h(ν_a)} - h(ν)|.
double optimality_residual(const MdpModel& model, const MdpSolution& solution);

}  // namespace sensched
