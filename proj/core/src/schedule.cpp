#include "sensched/schedule.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace sensched {

Schedule::Schedule(std::vector<int> slots) : slots_(std::move(slots)) {
  for (int s : slots_) {
    if (s < 0) throw ValidationError("schedule slots must be non-negative sensor indices");
  }
}

Schedule Schedule::parse(std::string_view text) {
  std::vector<int> slots;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || value < 1) {
      throw ValidationError("bad schedule entry '" + std::string(tok) +
                            "' (expected 1-based sensor index)");
    }
    slots.push_back(value - 1);
    pos = end + 1;
  }
  return Schedule(std::move(slots));
}

std::size_t Schedule::count(int sensor) const {
  return static_cast<std::size_t>(std::count(slots_.begin(), slots_.end(), sensor));
}

int Schedule::max_sensor() const {
  return slots_.empty() ? -1 : *std::max_element(slots_.begin(), slots_.end());
}

std::string Schedule::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (k) os << ',';
    os << slots_[k] + 1;
  }
  return os.str();
}

Schedule Schedule::rotated(std::size_t k) const {
  if (slots_.empty()) return *this;
  std::vector<int> out(slots_);
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k % out.size()), out.end());
  return Schedule(std::move(out));
}

Schedule Schedule::repeated(std::size_t times) const {
  std::vector<int> out;
  out.reserve(slots_.size() * times);
  for (std::size_t r = 0; r < times; ++r) out.insert(out.end(), slots_.begin(), slots_.end());
  return Schedule(std::move(out));
}

bool equal_up_to_rotation(const Schedule& a, const Schedule& b) {
  if (a.period() != b.period()) return false;
  for (std::size_t k = 0; k < a.period(); ++k) {
    if (a.rotated(k) == b) return true;
  }
  return a.period() == 0;
}

Schedule canonical_rotation(const Schedule& s) {
  Schedule best = s;
  for (std::size_t k = 1; k < s.period(); ++k) {
    Schedule r = s.rotated(k);
    if (r.slots() < best.slots()) best = std::move(r);
  }
  return best;
}

std::vector<long> gap_vector(const Schedule& sched, int sensor) {
  std::vector<long> pos;
  for (std::size_t k = 0; k < sched.period(); ++k) {
    if (sched[k] == sensor) pos.push_back(static_cast<long>(k));
  }
  if (pos.empty()) {
    throw AbsentSensor("sensor " + std::to_string(sensor + 1) + " never transmits");
  }
  const long L = static_cast<long>(sched.period());
  std::vector<long> gaps;
  gaps.reserve(pos.size());
  gaps.push_back(L - pos.back() + pos.front());
  for (std::size_t k = 1; k < pos.size(); ++k) gaps.push_back(pos[k] - pos[k - 1]);
  return gaps;
}

double gap_cost(const SystemModel& sys, std::span<const long> gaps, std::size_t period) {
  // Histogram first, so the sum is independent of gap order.
  std::map<long, long> hist;
  for (long d : gaps) ++hist[d];
  double total = 0.0;
  for (const auto& [d, c] : hist) total += static_cast<double>(c) * sys.trace_prefix_sum(d);
  return total / static_cast<double>(period);
}

CostBreakdown evaluate_cost(std::span<const SystemModel> systems, const Schedule& sched) {
  if (sched.empty()) throw ValidationError("empty schedule");
  if (sched.max_sensor() >= static_cast<int>(systems.size())) {
    throw ValidationError("schedule references sensor " + std::to_string(sched.max_sensor() + 1) +
                          " but only " + std::to_string(systems.size()) + " are defined");
  }
  CostBreakdown out;
  out.per_sensor.reserve(systems.size());
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const int s = static_cast<int>(i);
    if (!sched.contains(s)) {
      if (!systems[i].is_stable()) {
        throw InfiniteCost("unstable sensor " + std::to_string(i + 1) + " never transmits");
      }
      out.per_sensor.push_back(lyapunov_solution(systems[i]).trace());
    } else {
      const auto gaps = gap_vector(sched, s);
      out.per_sensor.push_back(gap_cost(systems[i], gaps, sched.period()));
    }
    out.total += out.per_sensor.back();
  }
  return out;
}

namespace {

std::vector<long> sorted_gaps(const Schedule& s, int sensor) {
  auto g = gap_vector(s, sensor);
  std::sort(g.begin(), g.end(), std::greater<>());
  return g;
}

}  // namespace

Schedule refine_uniformity(std::span<const SystemModel> systems, const Schedule& sched,
                           std::size_t max_passes, RefineStats* stats) {
  Schedule cur = sched;
  RefineStats local;
  const std::size_t L = cur.period();
  double cur_cost = evaluate_cost(systems, cur).total;

  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    ++local.passes;
    bool changed = false;
    for (std::size_t p = 0; p < L; ++p) {
      for (std::size_t q = p + 1; q < L; ++q) {
        if (cur[p] == cur[q]) continue;
        std::vector<int> slots = cur.slots();
        std::swap(slots[p], slots[q]);
        Schedule cand(std::move(slots));

        bool ok = true;
        bool strict = false;
        for (int i : {cur[p], cur[q]}) {
          const auto old_g = sorted_gaps(cur, i);
          const auto new_g = sorted_gaps(cand, i);
          if (!majorizes(old_g, new_g)) {
            ok = false;
            break;
          }
          if (old_g != new_g) strict = true;
        }
        if (!ok || !strict) continue;

        const double cand_cost = evaluate_cost(systems, cand).total;
        if (!(cand_cost < cur_cost)) {
          throw ModelError("uniformity swap did not lower the cost (" + std::to_string(cur_cost) +
                           " -> " + std::to_string(cand_cost) + ")");
        }
        cur = std::move(cand);
        cur_cost = cand_cost;
        ++local.accepted_swaps;
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (stats) *stats = local;
  return cur;
}

}  // namespace sensched
