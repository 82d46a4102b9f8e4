#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "prv/errors.hpp"
#include "prv/rng.hpp"
#include "prv/simharness.hpp"

namespace prv {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ViewPose top_pose(const Scene& scene) {
  return look_at_pose(scene.center + scene.radius * Vec3::UnitZ(), scene.center);
}

double tammes_angle(const Scene& scene, int n) {
  const auto it = scene.tammes.find(n);
  if (it == scene.tammes.end()) throw InvalidArgument("scene has no Tammes space for n = " + std::to_string(n));
  return min_pairwise_angle_or_inf(it->second);
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::PrvTammes: return "prv_tammes";
    case Strategy::PrvUniform: return "prv_uniform";
    case Strategy::NbvProxy: return "nbv_proxy";
  }
  return "prv_tammes";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "prv_tammes") return Strategy::PrvTammes;
  if (text == "prv_uniform") return Strategy::PrvUniform;
  if (text == "nbv_proxy") return Strategy::NbvProxy;
  throw InvalidArgument("unknown strategy '" + std::string(text) +
                        "' (expected prv_tammes, prv_uniform or nbv_proxy)");
}

double coverage_ratio(std::span<const Vec3> directions, double reference) {
  if (directions.size() < 2) return 1.0;
  const double angle = std::max(min_pairwise_angle(directions), kCoincidentAngle);
  if (!(reference > 0.0)) throw InvalidArgument("coverage_ratio: reference angle must be > 0");
  const double ratio = angle / reference;
  if (ratio >= 1.0 - 1e-12) return 1.0;
  return ratio;
}

double quality_model(const FittedCurve& curve, std::span<const Vec3> directions, double reference) {
  if (directions.empty()) throw InvalidArgument("quality_model: empty view set");
  const double n_eff = static_cast<double>(directions.size()) * coverage_ratio(directions, reference);
  return curve_eval(curve, std::max(1.0, n_eff));
}

Scene make_scene(double radius, int grid_size, const NamedInitialViews& initial, const PlanOptions& plan) {
  if (!(radius > 0.0)) throw InvalidArgument("scene radius must be > 0");
  Scene s;
  s.radius = radius;
  s.grid = candidate_grid(grid_size, radius, s.center);
  s.initial = initial_views(s.center, radius, initial);
  s.plan = plan;
  return s;
}

void ensure_tammes(Scene& scene, std::span<const int> counts, const TammesOptions& options,
                   const TammesTable* table) {
  std::set<int> todo;
  for (int n : counts) {
    if (n < 1) throw InvalidArgument("Tammes view count must be >= 1");
    if (!scene.tammes.contains(n)) todo.insert(n);
  }
  for (int n : todo) {
    if (table && std::abs(table->radius - scene.radius) <= 1e-12 * scene.radius && table->entries.contains(n)) {
      scene.tammes[n] = table->entries.at(n);
    } else {
      scene.tammes[n] = tammes_hemisphere(n, scene.radius, options, scene.center);
    }
  }
}

std::vector<int> nbv_proxy_sequence(const Scene& scene, int steps) {
  const int m = static_cast<int>(scene.grid.size());
  if (steps < 0) throw InvalidArgument("nbv: steps must be >= 0");
  const auto dirs = scene.grid.directions();
  // Minimizing the largest cosine maximizes the smallest angle.
  std::vector<double> max_dot(static_cast<std::size_t>(m), -std::numeric_limits<double>::infinity());
  const auto absorb = [&](const Vec3& d) {
    for (int i = 0; i < m; ++i) {
      auto& md = max_dot[static_cast<std::size_t>(i)];
      md = std::max(md, dirs[static_cast<std::size_t>(i)].dot(d));
    }
  };
  for (const auto& p : scene.initial) absorb((p.position - scene.center).normalized());

  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    int best = -1;
    for (int i = 0; i < m; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || max_dot[static_cast<std::size_t>(i)] < max_dot[static_cast<std::size_t>(best)]) best = i;
    }
    if (best < 0) throw InvalidArgument("nbv: more steps than candidate views");
    taken[static_cast<std::size_t>(best)] = 1;
    seq.push_back(best);
    absorb(dirs[static_cast<std::size_t>(best)]);
  }
  return seq;
}

TrialReport run_strategy(const SyntheticObject& obj, Strategy strategy, const Prediction& prediction,
                         const Scene& scene, std::uint64_t trial_seed) {
  const int n = prediction.v_hat;
  if (n < 1) throw InvalidArgument("run_strategy: predicted view count must be >= 1");
  TrialReport r;
  r.object_id = obj.id;
  r.strategy = strategy;
  r.predictor = prediction.source;
  r.v_star = obj.label.v_star;
  r.n_views = n;

  const ObstacleSphere obstacle = object_obstacle(scene.center, obj.size);
  const ViewPose start = top_pose(scene);
  PlanOptions plan_options = scene.plan;
  plan_options.heuristic.seed = derive_seed(trial_seed, 1);

  std::vector<Vec3> directions;
  const auto t0 = std::chrono::steady_clock::now();
  if (strategy == Strategy::NbvProxy) {
    const auto seq = nbv_proxy_sequence(scene, n);
    Vec3 cur = start.position;
    r.visited.push_back(cur);
    for (int idx : seq) {
      const Vec3& next = scene.grid.poses[static_cast<std::size_t>(idx)].position;
      r.movement_cost += local_path_length(cur, next, scene.center, obstacle);
      r.visited.push_back(next);
      directions.push_back((next - scene.center).normalized());
      cur = next;
    }
    r.solver = Solver::Heuristic;
    r.planning_time_s = seconds_since(t0);
  } else {
    ViewSpace vs;
    if (strategy == Strategy::PrvTammes) {
      const auto it = scene.tammes.find(n);
      if (it == scene.tammes.end()) throw InvalidArgument("scene has no Tammes space for n = " + std::to_string(n));
      vs = it->second;
    } else {
      const int m = static_cast<int>(scene.grid.size());
      if (n > m) throw InvalidArgument("prv_uniform: more views than candidates");
      Rng rng(derive_seed(trial_seed, 2));
      std::vector<int> idx(static_cast<std::size_t>(m));
      std::iota(idx.begin(), idx.end(), 0);
      for (int k = 0; k < n; ++k) {
        const auto j = static_cast<std::size_t>(k) + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(m - k));
        std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
      }
      vs.center = scene.grid.center;
      vs.radius = scene.grid.radius;
      vs.kind = ViewSpaceKind::Custom;
      for (int k = 0; k < n; ++k) vs.poses.push_back(scene.grid.poses[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]);
    }
    const GlobalPlan plan = plan_global_path(vs, start, obstacle, plan_options);
    r.movement_cost = plan.plan.total_length;
    r.solver = plan.plan.solver;
    r.planning_time_s = seconds_since(t0);
    for (int i : plan.plan.order) r.visited.push_back(plan.views.poses[static_cast<std::size_t>(i)].position);
    directions = vs.directions();
  }
  r.achieved_psnr = quality_model(obj.curve, directions, tammes_angle(scene, n));
  return r;
}

}  // namespace prv
