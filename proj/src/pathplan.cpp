#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/pathplan.hpp"
#include "prv/rng.hpp"

namespace prv {
namespace {

constexpr double kImprove = 1e-12;

void check_start(const CostMatrix& m, int start, const char* who) {
  if (m.size() < 1) throw InvalidArgument(std::string(who) + ": empty cost matrix");
  if (start < 0 || start >= m.size()) throw InvalidArgument(std::string(who) + ": start index out of range");
}

}  // namespace

std::string_view to_string(Solver solver) { return solver == Solver::Exact ? "exact" : "heuristic"; }

double path_length(const CostMatrix& m, std::span<const int> order) {
  double total = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) total += m(order[k - 1], order[k]);
  return total;
}

PathPlan hamiltonian_path_exact(const CostMatrix& m, int start, int cap, Execution execution) {
  check_start(m, start, "hamiltonian_path_exact");
  const int n = m.size();
  if (n > cap || n > 30) {
    throw TooLarge("exact solver: " + std::to_string(n) + " nodes exceeds the cap of " + std::to_string(cap));
  }
  m.validate();
  PathPlan plan;
  plan.solver = Solver::Exact;
  plan.optimality_gap_bound = 0.0;
  if (n == 1) {
    plan.order = {start};
    return plan;
  }

  const double K = 1.0 + m.sum();
  const auto enter = [&](int j) { return j == start ? 0.0 : K; };  // c(V, j) == c(j, V)

  const std::uint32_t full = (1u << n) - 1u;
  const std::size_t states = static_cast<std::size_t>(full + 1u) * n;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(states, inf);
  std::vector<std::int8_t> parent(states, -1);
  const auto idx = [n](std::uint32_t mask, int j) { return static_cast<std::size_t>(mask) * n + j; };

  for (int j = 0; j < n; ++j) dp[idx(1u << j, j)] = enter(j);

  // Masks bucketed by popcount; each layer only reads the previous one.
  std::vector<std::uint32_t> by_layer;
  std::vector<std::size_t> layer_begin(static_cast<std::size_t>(n) + 2, 0);
  {
    for (std::uint32_t s = 1; s <= full; ++s) ++layer_begin[static_cast<std::size_t>(std::popcount(s)) + 1];
    for (int k = 1; k <= n + 1; ++k) layer_begin[k] += layer_begin[k - 1];
    by_layer.resize(full);
    std::vector<std::size_t> fill(layer_begin.begin(), layer_begin.end());
    for (std::uint32_t s = 1; s <= full; ++s) by_layer[fill[std::popcount(s)]++] = s;
  }

  const auto relax = [&](std::uint32_t s) {
    for (int j = 0; j < n; ++j) {
      if (!(s & (1u << j))) continue;
      const std::uint32_t prev = s & ~(1u << j);
      double best = inf;
      int arg = -1;
      for (int i = 0; i < n; ++i) {
        if (!(prev & (1u << i))) continue;
        const double c = dp[idx(prev, i)] + m(i, j);
        if (c < best) {
          best = c;
          arg = i;
        }
      }
      dp[idx(s, j)] = best;
      parent[idx(s, j)] = static_cast<std::int8_t>(arg);
    }
  };

  for (int layer = 2; layer <= n; ++layer) {
    const auto lo = static_cast<std::ptrdiff_t>(layer_begin[layer]);
    const auto hi = static_cast<std::ptrdiff_t>(layer_begin[layer + 1]);
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = lo; k < hi; ++k) relax(by_layer[static_cast<std::size_t>(k)]);
    } else {
      for (std::ptrdiff_t k = lo; k < hi; ++k) relax(by_layer[static_cast<std::size_t>(k)]);
    }
  }

  double best = inf;
  int last = -1;
  for (int j = 0; j < n; ++j) {
    const double c = dp[idx(full, j)] + enter(j);
    if (c < best) {
      best = c;
      last = j;
    }
  }

  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(n));
  std::uint32_t s = full;
  int j = last;
  while (j >= 0) {
    seq.push_back(j);
    const int p = parent[idx(s, j)];
    s &= ~(1u << j);
    j = p;
  }
  // seq runs backwards from the node before V to the node after V; one end is start.
  if (seq.front() == start) {
    plan.order = seq;
  } else {
    plan.order.assign(seq.rbegin(), seq.rend());
  }
  if (plan.order.front() != start) throw Error("exact solver: reconstruction lost the start node");
  plan.total_length = path_length(m, plan.order);
  return plan;
}

std::vector<int> nearest_neighbor_order(const CostMatrix& m, int start) {
  check_start(m, start, "nearest_neighbor_order");
  const int n = m.size();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<int> order{start};
  used[static_cast<std::size_t>(start)] = 1;
  while (static_cast<int>(order.size()) < n) {
    const int cur = order.back();
    int next = -1;
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (next < 0 || m(cur, j) < m(cur, next)) next = j;
    }
    used[static_cast<std::size_t>(next)] = 1;
    order.push_back(next);
  }
  return order;
}

std::vector<int> two_opt(const CostMatrix& m, std::vector<int> p) {
  const int n = static_cast<int>(p.size());
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double delta = m(p[i - 1], p[j]) - m(p[i - 1], p[i]);
        if (j + 1 < n) delta += m(p[i], p[j + 1]) - m(p[j], p[j + 1]);
        if (delta < -kImprove) {
          std::reverse(p.begin() + i, p.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return p;
}

std::vector<int> or_opt(const CostMatrix& m, std::vector<int> p) {
  const int n = static_cast<int>(p.size());
  bool improved = true;
  std::vector<int> rest;
  while (improved) {
    improved = false;
    for (int len = 1; len <= 3 && !improved; ++len) {
      for (int i = 1; i + len <= n && !improved; ++i) {
        const int first = p[i];
        const int last = p[i + len - 1];
        const int prev = p[i - 1];
        const bool has_next = i + len < n;
        double removed = m(prev, first);
        if (has_next) removed += m(last, p[i + len]) - m(prev, p[i + len]);

        rest.assign(p.begin(), p.begin() + i);
        rest.insert(rest.end(), p.begin() + i + len, p.end());
        const int r = static_cast<int>(rest.size());
        double best = -kImprove;
        int best_pos = -1;
        bool best_rev = false;
        for (int k = 0; k < r; ++k) {  // insert after rest[k]
          if (k == i - 1) continue;    // original position
          const int q = rest[k];
          const bool has_r = k + 1 < r;
          for (int rev = 0; rev < 2; ++rev) {
            const int a = rev ? last : first;
            const int b = rev ? first : last;
            double added = m(q, a);
            if (has_r) added += m(b, rest[k + 1]) - m(q, rest[k + 1]);
            const double delta = added - removed;
            if (delta < best) {
              best = delta;
              best_pos = k;
              best_rev = rev != 0;
            }
          }
        }
        if (best_pos >= 0) {
          std::vector<int> seg(p.begin() + i, p.begin() + i + len);
          if (best_rev) std::reverse(seg.begin(), seg.end());
          rest.insert(rest.begin() + best_pos + 1, seg.begin(), seg.end());
          p = rest;
          improved = true;
        }
      }
    }
  }
  return p;
}

PathPlan hamiltonian_path_heuristic(const CostMatrix& m, int start, const HeuristicOptions& options) {
  check_start(m, start, "hamiltonian_path_heuristic");
  if (options.restarts < 1) throw InvalidArgument("heuristic: restarts must be >= 1");
  m.validate();
  const int n = m.size();

  const auto improve = [&](std::vector<int> order) {
    double len = path_length(m, order);
    for (;;) {
      order = or_opt(m, two_opt(m, std::move(order)));
      const double next = path_length(m, order);
      if (!(next < len - kImprove)) break;
      len = next;
    }
    return order;
  };

  PathPlan plan;
  plan.solver = Solver::Heuristic;
  plan.order = improve(nearest_neighbor_order(m, start));
  plan.total_length = path_length(m, plan.order);
  for (int r = 1; r < options.restarts && n > 3; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      if (j != start) order.push_back(j);
    }
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[static_cast<std::size_t>(rng() % k)]);
    }
    order.insert(order.begin(), start);
    order = improve(std::move(order));
    const double len = path_length(m, order);
    if (len < plan.total_length - kImprove) {
      plan.order = std::move(order);
      plan.total_length = len;
    }
  }
  return plan;
}

GlobalPlan plan_global_path(const ViewSpace& vs, const ViewPose& start_pose,
                            const ObstacleSphere& obstacle, const PlanOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  GlobalPlan out;
  out.views = vs;
  out.start_index = -1;
  const double tol = 1e-9 * std::max(1.0, vs.radius);
  for (std::size_t i = 0; i < vs.poses.size(); ++i) {
    if ((vs.poses[i].position - start_pose.position).norm() <= tol) {
      out.start_index = static_cast<int>(i);
      break;
    }
  }
  if (out.start_index < 0) {
    out.views.poses.push_back(start_pose);
    out.start_index = static_cast<int>(out.views.poses.size()) - 1;
  }
  if (out.views.size() < 2) {
    out.costs = CostMatrix(static_cast<int>(out.views.size()));
    out.plan.order = {out.start_index};
    out.plan.optimality_gap_bound = 0.0;
  } else {
    out.costs = build_cost_matrix(out.views, obstacle, options.execution);
    if (out.costs.size() <= options.exact_cap) {
      out.plan = hamiltonian_path_exact(out.costs, out.start_index, options.exact_cap, options.execution);
    } else {
      out.plan = hamiltonian_path_heuristic(out.costs, out.start_index, options.heuristic);
    }
  }
  out.planning_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Json path_to_json(const PathPlan& plan, std::optional<double> planning_time_s) {
  Json j;
  j["order"] = plan.order;
  j["total_length_m"] = plan.total_length;
  j["solver"] = std::string(to_string(plan.solver));
  if (plan.optimality_gap_bound) j["optimality_gap_bound"] = *plan.optimality_gap_bound;
  if (planning_time_s) {
    j["planning_time_s"] = *planning_time_s;
  } else {
    j["planning_time_s"] = nullptr;
  }
  return j;
}

}  // namespace prv
