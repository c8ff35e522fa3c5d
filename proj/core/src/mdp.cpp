#include "sensched/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_set>

#include "sensched/errors.hpp"

namespace sensched {

Counters MdpModel::state(std::size_t s) const {
  const auto base = counters.begin() + static_cast<std::ptrdiff_t>(s * static_cast<std::size_t>(n));
  return Counters(base, base + n);
}

std::int32_t MdpModel::find(const Counters& v) const {
  if (static_cast<int>(v.size()) != n) return -1;
  for (std::size_t s = 0; s < size(); ++s) {
    bool eq = true;
    for (int i = 0; i < n && eq; ++i) eq = counters[s * n + i] == v[static_cast<std::size_t>(i)];
    if (eq) return static_cast<std::int32_t>(s);
  }
  return -1;
}

namespace {

// Hash set of state ids keyed by the counter vectors stored in a flat array.
// A candidate is appended to the array before lookup and removed if found.
struct StateIndex {
  const std::vector<std::uint16_t>* flat;
  int n;

  std::size_t hash(std::int32_t id) const {
    std::size_t h = 1469598103934665603ull;
    const auto* p = flat->data() + static_cast<std::size_t>(id) * n;
    for (int i = 0; i < n; ++i) h = (h ^ p[i]) * 1099511628211ull;
    return h;
  }
  bool equal(std::int32_t a, std::int32_t b) const {
    return std::equal(flat->begin() + static_cast<std::ptrdiff_t>(a) * n,
                      flat->begin() + static_cast<std::ptrdiff_t>(a + 1) * n,
                      flat->begin() + static_cast<std::ptrdiff_t>(b) * n);
  }
};

struct IdHash {
  const StateIndex* idx;
  std::size_t operator()(std::int32_t id) const { return idx->hash(id); }
};
struct IdEq {
  const StateIndex* idx;
  bool operator()(std::int32_t a, std::int32_t b) const { return idx->equal(a, b); }
};

bool strongly_connected(const MdpModel& m) {
  const std::size_t N = m.size();
  std::vector<std::vector<std::int32_t>> rev(N);
  for (std::size_t s = 0; s < N; ++s) {
    for (int a = 0; a < m.n; ++a) {
      const auto t = m.next(s, a);
      if (t >= 0) rev[static_cast<std::size_t>(t)].push_back(static_cast<std::int32_t>(s));
    }
  }
  auto reach = [&](bool forward) {
    std::vector<char> seen(N, 0);
    std::vector<std::int32_t> stack{m.start};
    seen[static_cast<std::size_t>(m.start)] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto s = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      auto visit = [&](std::int32_t t) {
        if (!seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          ++count;
          stack.push_back(t);
        }
      };
      if (forward) {
        for (int a = 0; a < m.n; ++a) {
          if (m.next(s, a) >= 0) visit(m.next(s, a));
        }
      } else {
        for (auto t : rev[s]) visit(t);
      }
    }
    return count;
  };
  return reach(true) == N && reach(false) == N;
}

}  // namespace

MdpModel build_mdp(std::span<const SystemModel> systems, const OffDutyBounds& bounds,
                   const MdpBuildOptions& opts) {
  const int n = static_cast<int>(systems.size());
  if (n < 2) throw DimensionError("the MDP needs at least two sensors");
  if (bounds.per_sensor.size() != systems.size()) {
    throw DimensionError("bounds/systems size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    const long d = bounds.per_sensor[static_cast<std::size_t>(i)];
    if (d > std::numeric_limits<std::uint16_t>::max()) {
      throw StateSpaceOverflow("off-duty bound " + std::to_string(d) + " too large");
    }
    if (d < n) throw ModelError("off-duty bound of sensor " + std::to_string(i + 1) + " below n");
  }

  std::vector<std::uint16_t> flat;
  StateIndex idx{&flat, n};
  std::unordered_set<std::int32_t, IdHash, IdEq> index(1024, IdHash{&idx}, IdEq{&idx});

  std::vector<std::int32_t> succ;
  auto intern = [&]() -> std::pair<std::int32_t, bool> {
    const auto id = static_cast<std::int32_t>(flat.size() / n - 1);
    auto it = index.find(id);
    if (it != index.end()) {
      flat.resize(flat.size() - static_cast<std::size_t>(n));
      return {*it, false};
    }
    if (static_cast<std::size_t>(id) >= opts.state_cap) {
      throw StateSpaceOverflow("MDP state count exceeds cap " + std::to_string(opts.state_cap));
    }
    index.insert(id);
    succ.resize(succ.size() + static_cast<std::size_t>(n), -1);
    return {id, true};
  };

  for (int i = 0; i < n; ++i) flat.push_back(static_cast<std::uint16_t>(i + 1));
  intern();

  std::vector<std::int32_t> stack{0};
  std::vector<std::uint16_t> cur(static_cast<std::size_t>(n));
  while (!stack.empty()) {
    const auto s = stack.back();
    stack.pop_back();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(s) * n, n, cur.begin());
    for (int a = 0; a < n; ++a) {
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        if (i != a) ok = cur[i] + 1 <= bounds.per_sensor[static_cast<std::size_t>(i)];
      }
      if (!ok) continue;
      for (int i = 0; i < n; ++i) flat.push_back(i == a ? 1 : static_cast<std::uint16_t>(cur[i] + 1));
      const auto [t, fresh] = intern();
      succ[static_cast<std::size_t>(s) * n + a] = t;
      if (fresh) stack.push_back(t);
    }
  }

  // Drop states with no allowed successor, repeatedly.
  const std::size_t N = flat.size() / static_cast<std::size_t>(n);
  std::vector<std::vector<std::int32_t>> preds(N);
  std::vector<int> outdeg(N, 0);
  for (std::size_t s = 0; s < N; ++s) {
    for (int a = 0; a < n; ++a) {
      const auto t = succ[s * n + a];
      if (t >= 0) {
        ++outdeg[s];
        preds[static_cast<std::size_t>(t)].push_back(static_cast<std::int32_t>(s));
      }
    }
  }
  std::vector<char> alive(N, 1);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < N; ++s) {
    if (outdeg[s] == 0) queue.push_back(s);
  }
  std::size_t removed = 0;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    if (!alive[s]) continue;
    alive[s] = 0;
    ++removed;
    for (auto p : preds[s]) {
      if (alive[static_cast<std::size_t>(p)] && --outdeg[static_cast<std::size_t>(p)] == 0) {
        queue.push_back(static_cast<std::size_t>(p));
      }
    }
  }
  if (!alive[0]) throw ModelError("start state has no infinite continuation under the bounds");

  std::vector<std::int32_t> remap(N, -1);
  std::int32_t next_id = 0;
  for (std::size_t s = 0; s < N; ++s) {
    if (alive[s]) remap[s] = next_id++;
  }

  MdpModel m;
  m.n = n;
  m.bounds = bounds.per_sensor;
  m.start = 0;
  m.dead_ends_removed = removed;
  m.counters.reserve(static_cast<std::size_t>(next_id) * n);
  m.cost.reserve(static_cast<std::size_t>(next_id));
  m.successor.reserve(static_cast<std::size_t>(next_id) * n);
  for (std::size_t s = 0; s < N; ++s) {
    if (!alive[s]) continue;
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto v = flat[s * n + i];
      m.counters.push_back(v);
      c += systems[static_cast<std::size_t>(i)].trace_of_power(v - 1);
    }
    m.cost.push_back(c);
    for (int a = 0; a < n; ++a) {
      const auto t = succ[s * n + a];
      m.successor.push_back(t >= 0 ? remap[static_cast<std::size_t>(t)] : -1);
    }
  }
  if (!strongly_connected(m)) throw ModelError("MDP state graph is not communicating");
  return m;
}

namespace {

struct Evaluation {
  std::vector<double> mean;  // cycle-mean cost reached from each state
  std::vector<double> w;     // relative cost-to-go
};

Evaluation evaluate_policy(const MdpModel& m, const std::vector<int>& policy) {
  const std::size_t N = m.size();
  Evaluation ev{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  std::vector<char> state(N, 0);  // 0 new, 1 on current path, 2 done
  std::vector<std::int32_t> path;
  for (std::size_t root = 0; root < N; ++root) {
    if (state[root]) continue;
    path.clear();
    auto s = static_cast<std::int32_t>(root);
    while (state[static_cast<std::size_t>(s)] == 0) {
      state[static_cast<std::size_t>(s)] = 1;
      path.push_back(s);
      s = m.next(static_cast<std::size_t>(s), policy[static_cast<std::size_t>(s)]);
    }
    std::size_t tail_end = path.size();
    if (state[static_cast<std::size_t>(s)] == 1) {
      // New cycle: path[pos..] closes on s.
      const auto pos = static_cast<std::size_t>(std::find(path.begin(), path.end(), s) - path.begin());
      const std::size_t len = path.size() - pos;
      double sum = 0.0;
      for (std::size_t k = pos; k < path.size(); ++k) sum += m.cost[static_cast<std::size_t>(path[k])];
      const double mean = sum / static_cast<double>(len);
      const auto ref_it = std::min_element(path.begin() + static_cast<std::ptrdiff_t>(pos), path.end());
      const std::size_t ref = static_cast<std::size_t>(ref_it - path.begin()) - pos;
      // Walk backwards around the cycle starting just before the reference.
      ev.w[static_cast<std::size_t>(*ref_it)] = 0.0;
      for (std::size_t step = 1; step < len; ++step) {
        const std::size_t k = pos + (ref + len - step) % len;
        const auto u = static_cast<std::size_t>(path[k]);
        const auto v = static_cast<std::size_t>(m.next(u, policy[u]));
        ev.w[u] = m.cost[u] - mean + ev.w[v];
      }
      for (std::size_t k = pos; k < path.size(); ++k) {
        const auto u = static_cast<std::size_t>(path[k]);
        ev.mean[u] = mean;
        state[u] = 2;
      }
      tail_end = pos;
    }
    for (std::size_t k = tail_end; k-- > 0;) {
      const auto u = static_cast<std::size_t>(path[k]);
      const auto v = static_cast<std::size_t>(m.next(u, policy[u]));
      ev.mean[u] = ev.mean[v];
      ev.w[u] = m.cost[u] - ev.mean[u] + ev.w[v];
      state[u] = 2;
    }
  }
  return ev;
}

double scale_of(const MdpModel& m, const Evaluation& ev) {
  double s = 1.0;
  for (double c : m.cost) s = std::max(s, std::abs(c));
  for (double w : ev.w) s = std::max(s, std::abs(w));
  return s;
}

}  // namespace

MdpSolution solve_average_reward(const MdpModel& m, const MdpSolveOptions& opts) {
  const std::size_t N = m.size();
  if (N == 0) throw ModelError("empty MDP");
  std::vector<int> policy(N, -1);
  for (std::size_t s = 0; s < N; ++s) {
    for (int a = 0; a < m.n && policy[s] < 0; ++a) {
      if (m.next(s, a) >= 0) policy[s] = a;
    }
    if (policy[s] < 0) throw ModelError("state without allowed action");
  }

  Evaluation ev;
  std::size_t iterations = 0;
  for (;;) {
    if (iterations >= opts.iteration_cap) {
      throw NoConvergence("policy iteration exceeded " + std::to_string(opts.iteration_cap) +
                          " iterations");
    }
    ++iterations;
    ev = evaluate_policy(m, policy);
    const double scale = scale_of(m, ev);
    const double eps = 1e-12 * scale;

    bool changed = false;
    for (std::size_t s = 0; s < N; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < m.n; ++a) {
        const auto t = m.next(s, a);
        if (t >= 0) best = std::min(best, ev.mean[static_cast<std::size_t>(t)]);
      }
      if (best < ev.mean[s] - eps) {
        for (int a = 0; a < m.n; ++a) {
          const auto t = m.next(s, a);
          if (t >= 0 && ev.mean[static_cast<std::size_t>(t)] <= best + eps) {
            policy[s] = a;
            break;
          }
        }
        changed = true;
      }
    }
    if (changed) continue;

    for (std::size_t s = 0; s < N; ++s) {
      auto value = [&](int a) {
        const auto t = static_cast<std::size_t>(m.next(s, a));
        return m.cost[s] - ev.mean[s] + ev.w[t];
      };
      const double current = value(policy[s]);
      double best = current;
      int best_a = policy[s];
      for (int a = 0; a < m.n; ++a) {
        const auto t = m.next(s, a);
        if (t < 0 || std::abs(ev.mean[static_cast<std::size_t>(t)] - ev.mean[s]) > eps) continue;
        const double v = value(a);
        if (v < best - eps) {
          best = v;
          best_a = a;
        }
      }
      if (best_a != policy[s]) {
        policy[s] = best_a;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Lowest-index action among the minimisers, for a reproducible schedule.
  const double eps = 1e-12 * scale_of(m, ev);
  for (std::size_t s = 0; s < N; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.n; ++a) {
      const auto t = m.next(s, a);
      if (t >= 0) best = std::min(best, ev.w[static_cast<std::size_t>(t)]);
    }
    for (int a = 0; a < m.n; ++a) {
      const auto t = m.next(s, a);
      if (t >= 0 && ev.w[static_cast<std::size_t>(t)] <= best + eps) {
        policy[s] = a;
        break;
      }
    }
  }

  MdpSolution sol;
  sol.gain = -ev.mean[static_cast<std::size_t>(m.start)];
  sol.policy = std::move(policy);
  sol.bias.resize(N);
  for (std::size_t s = 0; s < N; ++s) sol.bias[s] = -ev.w[s];
  sol.iterations = iterations;

  std::vector<std::int32_t> seen_at(N, -1);
  std::vector<std::int32_t> walk;
  auto s = m.start;
  while (seen_at[static_cast<std::size_t>(s)] < 0) {
    seen_at[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(walk.size());
    walk.push_back(s);
    s = m.next(static_cast<std::size_t>(s), sol.policy[static_cast<std::size_t>(s)]);
  }
  sol.cycle_states.assign(walk.begin() + seen_at[static_cast<std::size_t>(s)], walk.end());
  std::vector<int> slots;
  slots.reserve(sol.cycle_states.size());
  for (auto u : sol.cycle_states) slots.push_back(sol.policy[static_cast<std::size_t>(u)]);
  sol.schedule = Schedule(std::move(slots));
  return sol;
}

Schedule extract_schedule(const MdpModel& m, const MdpSolution& solution) {
  std::vector<std::int32_t> seen_at(m.size(), -1);
  std::vector<int> actions;
  auto s = m.start;
  while (seen_at[static_cast<std::size_t>(s)] < 0) {
    seen_at[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(actions.size());
    const int a = solution.policy[static_cast<std::size_t>(s)];
    actions.push_back(a);
    s = m.next(static_cast<std::size_t>(s), a);
  }
  return Schedule(std::vector<int>(actions.begin() + seen_at[static_cast<std::size_t>(s)], actions.end()));
}

double optimality_residual(const MdpModel& m, const MdpSolution& sol) {
  double worst = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.n; ++a) {
      const auto t = m.next(s, a);
      if (t >= 0) best = std::max(best, m.reward(s) - sol.gain + sol.bias[static_cast<std::size_t>(t)]);
    }
    worst = std::max(worst, std::abs(best - sol.bias[s]));
  }
  return worst;
}

}  // namespace sensched
