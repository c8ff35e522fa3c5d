#include "app.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "sensched/sensched.hpp"

namespace sensched::cli {

namespace {

std::string fmt_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string join(const std::vector<long>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(v[k]);
  }
  return s;
}

struct Flags {
  std::string config;
  std::string csv;
  std::string bound_mode;
  int bound_slack = -1;
  int window = 0;
  int max_period = 0;
  std::string mef_rule;
  std::string method = "mdp";
  std::string schedule;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

ProblemConfig load(const Flags& f) {
  ProblemConfig cfg = load_config(f.config);
  auto& o = cfg.options;
  if (!f.bound_mode.empty()) o.bounds.mode = parse_bound_mode(f.bound_mode);
  if (f.bound_slack >= 0) o.bounds.slack = f.bound_slack;
  if (f.window > 0) o.rh_window = f.window;
  if (f.max_period > 0) o.max_period = f.max_period;
  if (!f.mef_rule.empty()) o.mef_rule = parse_mef_rule(f.mef_rule);
  return cfg;
}

OffDutyBounds bounds_for(const ProblemConfig& cfg) {
  if (cfg.options.fixed_bounds) return explicit_bounds(*cfg.options.fixed_bounds, cfg.options.bounds);
  return all_bounds(cfg.systems, cfg.options.bounds);
}

void print_report(std::ostream& out, const SolveReport& r) {
  out << std::left << std::setw(13) << "method" << std::setw(16) << "cost" << std::setw(8)
      << "period" << std::setw(13) << "state_count" << "wall_time_s\n";
  out << std::setw(13) << r.method << std::setw(16) << fmt_double(r.cost, 10) << std::setw(8)
      << (r.schedule ? std::to_string(r.schedule->period()) : "-") << std::setw(13)
      << (r.state_count ? std::to_string(r.state_count) : "-") << fmt_double(r.wall_time, 4)
      << "\n";
  if (r.schedule) out << "schedule: " << r.schedule->to_string() << "\n";
  if (r.bounds) {
    out << "off-duty bounds (" << to_string(r.bounds->options.mode) << ", slack "
        << r.bounds->options.slack << "): " << join(r.bounds->per_sensor) << "\n";
  }
}

void emit(std::ostream& out, const Flags& f, const SolveReport& r) {
  print_report(out, r);
  if (!f.csv.empty()) {
    std::ofstream csv(f.csv);
    if (!csv) throw ValidationError(f.csv + ": cannot write CSV");
    csv << csv_header() << "\n" << csv_row(r) << "\n";
  }
}

int cmd_steady(std::ostream& out, const Flags& f) {
  const auto cfg = load(f);
  out << std::left << std::setw(8) << "sensor" << std::setw(16) << "trace" << "spectral_radius\n";
  for (const auto& s : cfg.systems) {
    out << std::setw(8) << s.id() << std::setw(16) << fmt_double(s.steady().trace(), 10)
        << fmt_double(s.spectral_radius(), 6) << "\n";
  }
  for (const auto& s : cfg.systems) {
    Eigen::IOFormat fmt(10, 0, " ", "\n", "  ", "");
    out << "P" << s.id() << " =\n" << s.steady().format(fmt) << "\n";
  }
  return kExitOk;
}

int cmd_bounds(std::ostream& out, const Flags& f) {
  const auto cfg = load(f);
  const auto b = bounds_for(cfg);
  out << "mode " << to_string(b.options.mode) << ", slack " << b.options.slack << "\n";
  out << "per sensor: " << join(b.per_sensor) << "\n";
  if (!cfg.options.fixed_bounds) {
    for (std::size_t j = 0; j < b.per_pair.size(); ++j) out << "pair row " << j + 1 << ": " << join(b.per_pair[j]) << "\n";
  }
  return kExitOk;
}

int cmd_solve(std::ostream& out, const Flags& f) {
  const auto cfg = load(f);
  const auto& sys = cfg.systems;
  Timer timer;
  SolveReport r;
  if (f.method == "mdp") {
    r.bounds = bounds_for(cfg);
    const auto model = build_mdp(sys, *r.bounds);
    const auto sol = solve_average_reward(model);
    r.schedule = sol.schedule;
    r.state_count = model.size();
  } else if (f.method == "mef") {
    MefOptions mo;
    mo.rule = cfg.options.mef_rule;
    r.schedule = mef_schedule(sys, mo).schedule;
  } else if (f.method == "rh") {
    r.schedule = rh_schedule(sys, cfg.options.rh_window).schedule;
  } else if (f.method == "brute") {
    r.schedule = brute_force_optimal(sys, cfg.options.max_period).schedule;
  } else {
    throw ValidationError("unknown method '" + f.method + "' (mdp|mef|rh|brute)");
  }
  r.method = f.method == "rh" ? "rh-" + std::to_string(cfg.options.rh_window) : f.method;
  r.cost = evaluate_cost(sys, *r.schedule).total;
  r.wall_time = timer.seconds();
  emit(out, f, r);
  return kExitOk;
}

int cmd_lower_bound(std::ostream& out, const Flags& f) {
  const auto cfg = load(f);
  Timer timer;
  SolveReport r;
  r.method = "lower-bound";
  r.bounds = bounds_for(cfg);
  const auto prof = solve_lower_bound(cfg.systems, *r.bounds);
  r.cost = prof.value;
  r.wall_time = timer.seconds();
  emit(out, f, r);
  out << "duty cycles:";
  for (const auto& q : prof.exact()) out << " " << q.to_string();
  out << "\n";
  return kExitOk;
}

int cmd_construct(std::ostream& out, std::ostream& err, const Flags& f) {
  const auto cfg = load(f);
  Timer timer;
  SolveReport r;
  r.method = "construct";
  r.bounds = bounds_for(cfg);
  const auto prof = solve_lower_bound(cfg.systems, *r.bounds);
  ConstructionOptions co;
  co.period_cap = cfg.options.construction_cap;
  const auto sched = construct_from_duty_cycles(prof, co);
  if (!sched) {
    err << "no schedule realises the optimal duty cycles";
    for (const auto& q : prof.exact()) err << " " << q.to_string();
    err << "\n";
    return kExitInfeasible;
  }
  r.schedule = *sched;
  r.cost = evaluate_cost(cfg.systems, *sched).total;
  r.wall_time = timer.seconds();
  emit(out, f, r);
  out << "lower bound: " << fmt_double(prof.value, 10) << "\n";
  return kExitOk;
}

int cmd_evaluate(std::ostream& out, const Flags& f) {
  const auto cfg = load(f);
  Timer timer;
  SolveReport r;
  r.method = "evaluate";
  r.schedule = Schedule::parse(f.schedule);
  const auto cb = evaluate_cost(cfg.systems, *r.schedule);
  r.cost = cb.total;
  r.wall_time = timer.seconds();
  emit(out, f, r);
  for (std::size_t i = 0; i < cb.per_sensor.size(); ++i) {
    out << "sensor " << i + 1 << ": " << fmt_double(cb.per_sensor[i], 10) << "\n";
  }
  return kExitOk;
}

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::kConfig: return kExitConfig;
    case ErrorClass::kSolver: return kExitSolver;
    case ErrorClass::kInfeasible: return kExitInfeasible;
  }
  return kExitSolver;
}

}  // namespace

std::string csv_header() { return "method,cost,period,schedule,state_count,wall_time_s"; }

std::string csv_row(const SolveReport& r) {
  std::ostringstream os;
  os << r.method << "," << fmt_double(r.cost, 15) << ","
     << (r.schedule ? std::to_string(r.schedule->period()) : "") << ",\""
     << (r.schedule ? r.schedule->to_string() : "") << "\"," << r.state_count << ","
     << fmt_double(r.wall_time, 6);
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensor scheduling solver for Kalman-filtered systems on a shared channel", "sensched"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", f.config, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--bound-mode", f.bound_mode, "Off-duty bound interpretation")
        ->check(CLI::IsMember({"literal", "linear"}));
    sub->add_option("--bound-slack", f.bound_slack, "Offset added to the largest feasible l1+l2+l3")
        ->check(CLI::Range(0, 100));
    sub->add_option("--csv", f.csv, "Write a one-row CSV report to this path");
  };

  auto* steady = app.add_subcommand("steady", "Steady-state covariances");
  common(steady);
  auto* bounds = app.add_subcommand("bounds", "Off-duty bounds");
  common(bounds);
  auto* solve = app.add_subcommand("solve", "Compute a schedule");
  common(solve);
  solve->add_option("--method", f.method, "mdp | mef | rh | brute")
      ->check(CLI::IsMember({"mdp", "mef", "rh", "brute"}));
  solve->add_option("--window", f.window, "Receding-horizon window")->check(CLI::PositiveNumber);
  solve->add_option("--max-period", f.max_period, "Brute-force period limit")->check(CLI::PositiveNumber);
  solve->add_option("--mef-rule", f.mef_rule, "increment | absence")
      ->check(CLI::IsMember({"increment", "absence"}));
  auto* lower = app.add_subcommand("lower-bound", "Duty-cycle lower bound");
  common(lower);
  auto* construct = app.add_subcommand("construct", "Schedule from the optimal duty cycles");
  common(construct);
  auto* evaluate = app.add_subcommand("evaluate", "Cost of a given schedule");
  common(evaluate);
  evaluate->add_option("--schedule", f.schedule, "Comma-separated 1-based slots, e.g. 3,1,2")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (steady->parsed()) return cmd_steady(out, f);
    if (bounds->parsed()) return cmd_bounds(out, f);
    if (solve->parsed()) return cmd_solve(out, f);
    if (lower->parsed()) return cmd_lower_bound(out, f);
    if (construct->parsed()) return cmd_construct(out, err, f);
    if (evaluate->parsed()) return cmd_evaluate(out, f);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.error_class());
  }
  return kExitConfig;
}

}  // namespace sensched::cli
