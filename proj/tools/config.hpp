#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensched/bounds.hpp"
#include "sensched/heuristics.hpp"
#include "sensched/model.hpp"

namespace sensched::cli {

struct ProblemOptions {
  BoundOptions bounds;
  std::optional<std::vector<long>> fixed_bounds;  // skips the bound search when present
  int rh_window = 2;
  int max_period = 8;
  long construction_cap = 1000;
  MefRule mef_rule = MefRule::kIncrement;
  ModelChecks checks;
};

struct ProblemConfig {
  std::string source;
  std::vector<SystemModel> systems;
  ProblemOptions options;
};

/// Parses the JSON problem description. Syntax errors are reported as
/// ValidationError with "source:line:col"; model failures name the system.
ProblemConfig parse_config(std::string_view text, const std::string& source = "<config>");
ProblemConfig load_config(const std::string& path);

}  // namespace sensched::cli
