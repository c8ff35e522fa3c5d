#include "sensched/heuristics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sensched/errors.hpp"

namespace sensched {

std::string_view to_string(MefRule rule) {
  return rule == MefRule::kIncrement ? "increment" : "absence";
}

MefRule parse_mef_rule(std::string_view text) {
  if (text == "increment") return MefRule::kIncrement;
  if (text == "absence") return MefRule::kAbsence;
  throw ValidationError("unknown MEF rule '" + std::string(text) + "' (increment|absence)");
}

namespace {

// Lock-free view of the trace sequences for the simulation loops.
class Traces {
 public:
  explicit Traces(std::span<const SystemModel> systems) : systems_(systems), t_(systems.size()) {}

  double operator()(std::size_t i, long ell) {
    auto& v = t_[i];
    if (ell >= static_cast<long>(v.size())) {
      v = systems_[i].traces(std::max<long>(2 * ell + 2, 64));
    }
    return v[static_cast<std::size_t>(ell)];
  }

 private:
  std::span<const SystemModel> systems_;
  std::vector<std::vector<double>> t_;
};

template <typename Choose>
HeuristicResult simulate(std::size_t n, long max_steps, Choose&& choose) {
  Counters v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i + 1);
  std::map<Counters, long> seen;
  std::vector<int> actions;
  for (long k = 0; k < max_steps; ++k) {
    auto [it, fresh] = seen.emplace(v, k);
    if (!fresh) {
      HeuristicResult r;
      r.transient = it->second;
      r.schedule = Schedule(std::vector<int>(actions.begin() + it->second, actions.end()));
      return r;
    }
    const int a = choose(v);
    actions.push_back(a);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i) == a ? 1 : v[i] + 1;
  }
  throw NoCycleError("no repeated counter vector within " + std::to_string(max_steps) + " steps");
}

double finite_or_inf(double x) {
  return std::isnan(x) ? std::numeric_limits<double>::infinity() : x;
}

}  // namespace

HeuristicResult mef_schedule(std::span<const SystemModel> systems, const MefOptions& opts) {
  const std::size_t n = systems.size();
  if (n < 2) throw DimensionError("MEF needs at least two sensors");
  Traces t(systems);
  return simulate(n, opts.max_steps, [&](const Counters& v) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const long c = v[i];
      const double base = opts.rule == MefRule::kIncrement ? t(i, c - 1) : t(i, 0);
      const double score = finite_or_inf(t(i, c) - base);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    return best;
  });
}

HeuristicResult rh_schedule(std::span<const SystemModel> systems, int window, long max_steps) {
  const std::size_t n = systems.size();
  if (n < 2) throw DimensionError("receding horizon needs at least two sensors");
  if (window < 1) throw ValidationError("window must be at least 1");
  if (std::pow(static_cast<double>(n), window) > 1e8) {
    throw WindowOverflow("n^window = " + std::to_string(n) + "^" + std::to_string(window) +
                         " exceeds 1e8");
  }
  Traces t(systems);
  std::vector<Counters> stack(static_cast<std::size_t>(window) + 1, Counters(n));

  return simulate(n, max_steps, [&](const Counters& v) {
    stack[0] = v;
    double best = std::numeric_limits<double>::infinity();
    int best_first = 0;
    // Depth-first over sequences in lexicographic order.
    auto dfs = [&](auto&& self, int depth, double acc, int first) -> void {
      if (depth == window) {
        if (best == std::numeric_limits<double>::infinity() ||
            acc < best - 1e-12 * std::abs(best)) {
          best = acc;
          best_first = first;
        }
        return;
      }
      const Counters& cur = stack[static_cast<std::size_t>(depth)];
      Counters& nxt = stack[static_cast<std::size_t>(depth) + 1];
      for (std::size_t a = 0; a < n; ++a) {
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          nxt[i] = i == a ? 1 : cur[i] + 1;
          step += t(i, nxt[i] - 1);
        }
        self(self, depth + 1, finite_or_inf(acc + step), depth == 0 ? static_cast<int>(a) : first);
      }
    };
    dfs(dfs, 0, 0.0, 0);
    return best_first;
  });
}

BruteForceResult brute_force_optimal(std::span<const SystemModel> systems, int max_period) {
  const std::size_t n = systems.size();
  if (n == 0) throw DimensionError("no sensors");
  if (max_period < 1) throw ValidationError("max_period must be at least 1");
  if (std::pow(static_cast<double>(n), max_period) > 1e8) {
    throw OverflowError("n^max_period = " + std::to_string(n) + "^" + std::to_string(max_period) +
                        " exceeds 1e8");
  }
  std::vector<std::vector<double>> prefix(n);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i].resize(static_cast<std::size_t>(max_period) + 1);
    for (int d = 0; d <= max_period; ++d) prefix[i][static_cast<std::size_t>(d)] = systems[i].trace_prefix_sum(d);
  }

  BruteForceResult out;
  out.cost = std::numeric_limits<double>::infinity();
  std::vector<int> slots;
  std::vector<long> first(n), last(n);
  std::vector<double> acc(n);

  for (int L = static_cast<int>(n); L <= max_period; ++L) {
    slots.assign(static_cast<std::size_t>(L), 0);
    // Slot 0 is sensor 0 (rotation invariance); odometer over the rest.
    for (;;) {
      std::fill(first.begin(), first.end(), -1);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int k = 0; k < L; ++k) {
        const auto s = static_cast<std::size_t>(slots[static_cast<std::size_t>(k)]);
        if (first[s] < 0) {
          first[s] = k;
        } else {
          acc[s] += prefix[s][static_cast<std::size_t>(k - last[s])];
        }
        last[s] = k;
      }
      bool all = true;
      double cost = 0.0;
      for (std::size_t i = 0; i < n && all; ++i) {
        if (first[i] < 0) {
          all = false;
        } else {
          cost += (acc[i] + prefix[i][static_cast<std::size_t>(L - last[i] + first[i])]) / L;
        }
      }
      if (all && (cost < out.cost - 1e-12 * std::abs(out.cost) || !std::isfinite(out.cost))) {
        out.cost = cost;
        out.schedule = Schedule(slots);
      }
      int k = L - 1;
      while (k >= 1 && slots[static_cast<std::size_t>(k)] == static_cast<int>(n) - 1) {
        slots[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 1) break;
      ++slots[static_cast<std::size_t>(k)];
    }
  }
  if (!std::isfinite(out.cost)) {
    throw InfeasibleError("no schedule of period <= " + std::to_string(max_period) +
                          " covers all sensors");
  }
  out.cost = evaluate_cost(systems, out.schedule).total;
  return out;
}

}  // namespace sensched
