#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sensched/bounds.hpp"
#include "sensched/schedule.hpp"

namespace sensched::cli {

struct SolveReport {
  std::string method;
  double cost = 0.0;
  std::optional<Schedule> schedule;
  std::optional<OffDutyBounds> bounds;
  std::size_t state_count = 0;
  double wall_time = 0.0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitInfeasible = 4;

std::string csv_header();
std::string csv_row(const SolveReport& r);

/// Entry point shared by main() and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sensched::cli
