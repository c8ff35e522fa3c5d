#pragma once

#include <span>
#include <string_view>

#include "sensched/model.hpp"
#include "sensched/schedule.hpp"

namespace sensched {

// Which per-sensor score MEF maximises at counter value v:
//   kIncrement: Tr[h^v(P̄)] - Tr[h^{v-1}(P̄)], the one-step growth of the error
//   kAbsence:   Tr[h^v(P̄)] - Tr[P̄], the error removed by transmitting now
// kAbsence is the one-step receding-horizon rule.
enum class MefRule { kIncrement, kAbsence };

std::string_view to_string(MefRule rule);
MefRule parse_mef_rule(std::string_view text);

struct MefOptions {
  MefRule rule = MefRule::kIncrement;
  long max_steps = 100'000;
};

struct HeuristicResult {
  Schedule schedule;  // the cycle the counter trajectory settles into
  long transient = 0; // steps before the cycle is entered
};

/// Greedy scheduler; lowest index wins ties. Starts from counters (1, 2, ..., n).
HeuristicResult mef_schedule(std::span<const SystemModel> systems, const MefOptions& opts = {});

/// Receding horizon over all n^window action sequences, scoring the summed
/// error trace over the window; the lexicographically first best sequence wins.
HeuristicResult rh_schedule(std::span<const SystemModel> systems, int window,
                            long max_steps = 100'000);

struct BruteForceResult {
  Schedule schedule;
  double cost = 0.0;
};

/// Cheapest periodic schedule of period <= max_period that uses every sensor.
/// Throws OverflowError when n^max_period > 1e8.
BruteForceResult brute_force_optimal(std::span<const SystemModel> systems, int max_period);

}  // namespace sensched
