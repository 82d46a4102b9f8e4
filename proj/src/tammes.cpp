// Tammes configurations on the upper unit hemisphere.
//
// Each restart maximizes the soft-min of pairwise chord lengths,
//   F_beta(X) = -(1/beta) log sum_{i<j} exp(-beta |x_i - x_j|),
// by projected gradient ascent with a backtracking step and a geometric
// annealing schedule on beta. Projection is normalize-then-clamp z >= 0.
// The largest minimum angle seen during the run is kept.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/rng.hpp"
#include "prv/viewspace.hpp"

namespace prv {
namespace {

constexpr double kBetaStart = 8.0;
constexpr double kBetaEnd = 2.0e5;
constexpr double kInitialStep = 0.05;
constexpr double kMinStep = 1e-14;

Vec3 project_to_hemisphere(const Vec3& v) {
  Vec3 p = v;
  if (p.z() < 0.0) p.z() = 0.0;
  const double norm = p.norm();
  if (!(norm > 0.0)) return Vec3::UnitX();
  return p / norm;
}

struct SoftMin {
  double value = 0.0;     // F_beta
  double min_chord = 0.0; // true minimum chord length
};

// Evaluates F_beta and, when grad is non-null, its gradient w.r.t. each point.
SoftMin soft_min(const std::vector<Vec3>& x, double beta, std::vector<double>& chords,
                 std::vector<Vec3>* grad) {
  const std::size_t n = x.size();
  chords.resize(n * (n - 1) / 2);
  double dmin = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      chords[k] = (x[i] - x[j]).norm();
      dmin = std::min(dmin, chords[k]);
    }
  }
  double sum = 0.0;
  for (double d : chords) sum += std::exp(-beta * (d - dmin));
  SoftMin out;
  out.min_chord = dmin;
  out.value = dmin - std::log(sum) / beta;

  if (grad != nullptr) {
    grad->assign(n, Vec3::Zero());
    k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        const double d = chords[k];
        if (!(d > 0.0)) continue;
        const double w = std::exp(-beta * (d - dmin)) / sum;
        const Vec3 g = (w / d) * (x[i] - x[j]);
        (*grad)[i] += g;
        (*grad)[j] -= g;
      }
    }
  }
  return out;
}

double chord_to_angle(double chord) { return 2.0 * std::asin(std::min(1.0, 0.5 * chord)); }

std::vector<Vec3> random_hemisphere_points(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> x;
  x.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(x.size()) < n) {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    v /= norm;
    v.z() = std::abs(v.z());
    x.push_back(v);
  }
  return x;
}

}  // namespace

TammesRestart tammes_restart(int n, std::uint64_t restart_seed, int iters) {
  if (n < 1) throw InvalidArgument("tammes: n must be >= 1");
  if (iters < 1) throw InvalidArgument("tammes: iters must be >= 1");
  if (n == 1) return {{Vec3::UnitZ()}, kNoPairAngle};

  Rng rng(restart_seed);
  std::vector<Vec3> x = random_hemisphere_points(n, rng);
  std::vector<Vec3> grad;
  std::vector<Vec3> trial(x.size());
  std::vector<double> chords;

  TammesRestart best;
  double step = kInitialStep;
  double beta = kBetaStart;
  SoftMin cur = soft_min(x, beta, chords, &grad);
  best.directions = x;
  best.min_angle = chord_to_angle(cur.min_chord);

  const double log_ratio = std::log(kBetaEnd / kBetaStart);
  for (int it = 0; it < iters; ++it) {
    const double t = iters > 1 ? static_cast<double>(it) / (iters - 1) : 1.0;
    const double next_beta = kBetaStart * std::exp(log_ratio * t);
    if (next_beta != beta) {
      beta = next_beta;
      cur = soft_min(x, beta, chords, &grad);
    }
    double gnorm = 0.0;
    for (const auto& g : grad) gnorm = std::max(gnorm, g.norm());
    if (!(gnorm > 0.0)) break;

    // Backtrack until the soft-min improves; a failed search shrinks the
    // step for the next (sharper) stage.
    bool accepted = false;
    while (step > kMinStep) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        trial[i] = project_to_hemisphere(x[i] + (step / gnorm) * grad[i]);
      }
      const SoftMin cand = soft_min(trial, beta, chords, nullptr);
      if (cand.value > cur.value) {
        x.swap(trial);
        cur = soft_min(x, beta, chords, &grad);
        step *= 1.25;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) step = kInitialStep / beta * kBetaStart;

    const double angle = chord_to_angle(cur.min_chord);
    if (angle > best.min_angle) {
      best.min_angle = angle;
      best.directions = x;
    }
  }
  // Report the exact-angle metric rather than the chord-derived one.
  best.min_angle = min_pairwise_angle(std::span<const Vec3>(best.directions));
  return best;
}

TammesRestart tammes_unit_hemisphere(int n, const TammesOptions& options) {
  if (n < 1) throw InvalidArgument("tammes: n must be >= 1");
  if (options.restarts < 1) throw InvalidArgument("tammes: restarts must be >= 1");
  if (options.iters < 1) throw InvalidArgument("tammes: iters must be >= 1");
  if (n == 1) return {{Vec3::UnitZ()}, kNoPairAngle};

  const int restarts = options.restarts;
  std::vector<TammesRestart> results(static_cast<std::size_t>(restarts));
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < restarts; ++r) {
      results[static_cast<std::size_t>(r)] =
          tammes_restart(n, derive_seed(options.seed, static_cast<std::uint64_t>(r)), options.iters);
    }
  } else {
    for (int r = 0; r < restarts; ++r) {
      results[static_cast<std::size_t>(r)] =
          tammes_restart(n, derive_seed(options.seed, static_cast<std::uint64_t>(r)), options.iters);
    }
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].min_angle > results[best].min_angle) best = r;
  }
  return std::move(results[best]);
}

ViewSpace tammes_hemisphere(int n, double radius, const TammesOptions& options,
                            const Vec3& center) {
  if (n < 1) throw InvalidArgument("tammes_hemisphere: n must be >= 1");
  if (!(radius > 0.0)) throw InvalidArgument("tammes_hemisphere: radius must be positive");
  const TammesRestart unit = tammes_unit_hemisphere(n, options);
  return make_viewspace(unit.directions, radius, center, ViewSpaceKind::Tammes);
}

}  // namespace prv
