#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prv/io.hpp"
#include "prv/viewspace.hpp"

namespace prv {

inline constexpr double kObstacleClearance = 0.02;  // meters
inline constexpr double kArcStep = 2.0 * 3.14159265358979323846 / 180.0;
inline constexpr int kExactCap = 20;

// Bounding sphere of the object plus clearance.
struct ObstacleSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

// Object of extent `object_size` (meters) standing at `center`.
ObstacleSphere object_obstacle(const Vec3& center, double object_size,
                               double clearance = kObstacleClearance);

struct LocalPath {
  std::vector<Vec3> points;  // polyline from a to b inclusive
  double length = 0.0;
  bool detour = false;       // arc around the view sphere instead of a straight segment
};

// Straight segment when it stays clear of the obstacle, otherwise the
// great-circle arc on the view sphere around `sphere_center` (the upper arc
// for antipodal endpoints), sampled every <= 2 degrees.
LocalPath local_path(const Vec3& a, const Vec3& b, const Vec3& sphere_center,
                     const ObstacleSphere& obstacle);
double local_path_length(const Vec3& a, const Vec3& b, const Vec3& sphere_center,
                         const ObstacleSphere& obstacle);

// Square, symmetric, zero diagonal, finite non-negative entries.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return data_; }
  double sum() const;

  // Throws InvalidArgument when an invariant fails.
  void validate() const;

  bool operator==(const CostMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

CostMatrix build_cost_matrix(const ViewSpace& vs, const ObstacleSphere& obstacle,
                             Execution execution = Execution::Parallel);
CostMatrix euclidean_cost_matrix(std::span<const Vec3> points);

// "n" on the first line, then n rows of n comma-separated costs.
CostMatrix parse_cost_matrix_csv(std::string_view text, const std::string& source = "csv");
std::string cost_matrix_to_csv(const CostMatrix& m);

enum class Solver { Exact, Heuristic };
std::string_view to_string(Solver solver);

struct PathPlan {
  std::vector<int> order;  // order[0] is the start
  double total_length = 0.0;
  Solver solver = Solver::Exact;
  std::optional<double> optimality_gap_bound;  // 0 for exact, unknown otherwise
};

double path_length(const CostMatrix& m, std::span<const int> order);

// Shortest open path from `start` with a free end, via Held-Karp on the
// instance augmented with a virtual node V: c(V, start) = 0 and
// c(V, u) = K = 1 + sum of all costs, so the optimal tour enters V through
// start and one free endpoint. Requires n <= cap.
PathPlan hamiltonian_path_exact(const CostMatrix& m, int start, int cap = kExactCap,
                                Execution execution = Execution::Parallel);

struct HeuristicOptions {
  std::uint64_t seed = 7;
  int restarts = 8;  // restart 0 is nearest neighbor; the others are random orders
};

std::vector<int> nearest_neighbor_order(const CostMatrix& m, int start);
// 2-opt (segment reversal) with order[0] pinned, to local optimality.
std::vector<int> two_opt(const CostMatrix& m, std::vector<int> order);
// Relocation of segments of 1-3 nodes (optionally reversed), order[0] pinned.
std::vector<int> or_opt(const CostMatrix& m, std::vector<int> order);

PathPlan hamiltonian_path_heuristic(const CostMatrix& m, int start, const HeuristicOptions& options = {});

struct PlanOptions {
  int exact_cap = kExactCap;
  HeuristicOptions heuristic{};
  Execution execution = Execution::Parallel;
};

struct GlobalPlan {
  ViewSpace views;       // input views, plus the start pose if it was not a member
  int start_index = 0;
  CostMatrix costs;
  PathPlan plan;
  double planning_time_s = 0.0;
};

GlobalPlan plan_global_path(const ViewSpace& vs, const ViewPose& start_pose,
                            const ObstacleSphere& obstacle, const PlanOptions& options = {});

// {"order":[..],"total_length_m":..,"solver":"exact|heuristic","planning_time_s":..}
// planning_time_s is null when no timing is supplied.
Json path_to_json(const PathPlan& plan, std::optional<double> planning_time_s);

}  // namespace prv
