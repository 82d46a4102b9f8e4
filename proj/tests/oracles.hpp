#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "prv/curvefit.hpp"
#include "prv/pathplan.hpp"

namespace oracle {

inline double lognormal_curve(const prv::FittedCurve& c, double v) {
  return c.offset + c.scale * 0.5 * std::erfc(-(std::log(v) - c.mu) / (c.sigma * std::sqrt(2.0)));
}

// Direct integer scan: smallest v in [v_min, v_max] with every gain
// C(u+1) - C(u) < alpha for u = v .. horizon. No v qualifies -> v_max, saturated.
struct ScanLabel {
  int v_star;
  bool saturated;
};

inline ScanLabel scan_label(const prv::FittedCurve& c, double alpha, int v_min, int v_max, int horizon = 20000) {
  std::vector<double> gain(static_cast<std::size_t>(horizon + 1), 0.0);
  for (int u = v_min; u <= horizon; ++u) gain[u] = lognormal_curve(c, u + 1.0) - lognormal_curve(c, u);
  double suffix = -std::numeric_limits<double>::infinity();
  std::vector<double> suffix_max(gain.size(), suffix);
  for (int u = horizon; u >= v_min; --u) {
    suffix = std::max(suffix, gain[u]);
    suffix_max[u] = suffix;
  }
  for (int v = v_min; v <= v_max; ++v) {
    if (suffix_max[v] < alpha) return {v, false};
  }
  return {v_max, true};
}

// Exhaustive open-path search with order[0] = start.
struct BrutePath {
  double length = std::numeric_limits<double>::infinity();
  std::vector<int> order;
};

inline BrutePath brute_force_path(const prv::CostMatrix& m, int start) {
  const int n = m.size();
  std::vector<int> rest;
  for (int j = 0; j < n; ++j) {
    if (j != start) rest.push_back(j);
  }
  BrutePath best;
  do {
    double len = 0.0;
    int prev = start;
    for (int j : rest) {
      len += m(prev, j);
      prev = j;
    }
    if (len < best.length) {
      best.length = len;
      best.order = {start};
      best.order.insert(best.order.end(), rest.begin(), rest.end());
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Exhaustive closed tour over the virtual-node instance; V is node n with
// c(V, start) = 0 and c(V, u) = K otherwise. Returns the tour cost minus K.
inline double brute_force_virtual_tour(const prv::CostMatrix& m, int start) {
  const int n = m.size();
  double K = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) K += m(i, j);
  }
  const auto cv = [&](int u) { return u == start ? 0.0 : K; };
  std::vector<int> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = cv(nodes.front()) + cv(nodes.back());
    for (int k = 1; k < n; ++k) len += m(nodes[k - 1], nodes[k]);
    best = std::min(best, len);
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return best - K;
}

inline prv::CostMatrix random_euclidean(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return prv::euclidean_cost_matrix(pts);
}

// Symmetric, non-metric random costs.
inline prv::CostMatrix random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  prv::CostMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = u(rng);
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  return m;
}

// Tammes reference: best of many random starts on the hemisphere, each
// improved by projected coordinate descent in (polar, azimuth) coordinates.
// A move of point i is kept only if its nearest-neighbour distance grows.
struct TammesOracle {
  double min_angle = 0.0;
};

inline double nearest(const std::vector<Eigen::Vector3d>& p, int i) {
  double best = 4.0;
  for (int j = 0; j < static_cast<int>(p.size()); ++j) {
    if (j != i) best = std::min(best, (p[i] - p[j]).squaredNorm());
  }
  return best;
}

inline double min_chord2(const std::vector<Eigen::Vector3d>& p) {
  double best = 4.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, (p[i] - p[j]).squaredNorm());
  }
  return best;
}

inline Eigen::Vector3d from_angles(double theta, double phi) {
  theta = std::clamp(theta, 0.0, M_PI / 2);
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

inline void coordinate_descent(std::vector<double>& th, std::vector<double>& ph, std::vector<Eigen::Vector3d>& p,
                               int sweeps, double step) {
  const int n = static_cast<int>(p.size());
  for (int s = 0; s < sweeps; ++s, step *= 0.5) {
    for (int i = 0; i < n; ++i) {
      double cur = nearest(p, i);
      for (int coord = 0; coord < 2; ++coord) {
        for (double dir : {1.0, -1.0}) {
          const double t = th[i] + (coord == 0 ? dir * step : 0.0);
          const double f = ph[i] + (coord == 1 ? dir * step : 0.0);
          const Eigen::Vector3d keep = p[i];
          p[i] = from_angles(t, f);
          const double cand = nearest(p, i);
          if (cand > cur) {
            cur = cand;
            th[i] = std::clamp(t, 0.0, M_PI / 2);
            ph[i] = f;
          } else {
            p[i] = keep;
          }
        }
      }
    }
  }
}

inline TammesOracle tammes_oracle(int n, long inits, std::uint64_t seed, int keep = 64) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Cand {
    double value;
    std::vector<double> th, ph;
  };
  std::vector<Cand> top;
  std::vector<double> th(static_cast<std::size_t>(n)), ph(static_cast<std::size_t>(n));
  std::vector<Eigen::Vector3d> p(static_cast<std::size_t>(n));
  for (long k = 0; k < inits; ++k) {
    for (int i = 0; i < n; ++i) {
      th[i] = std::acos(u(rng));  // uniform on the cap
      ph[i] = 2 * M_PI * u(rng);
      p[i] = from_angles(th[i], ph[i]);
    }
    coordinate_descent(th, ph, p, 6, 0.2);
    const double v = min_chord2(p);
    if (static_cast<int>(top.size()) < keep || v > top.back().value) {
      top.push_back({v, th, ph});
      std::sort(top.begin(), top.end(), [](const Cand& a, const Cand& b) { return a.value > b.value; });
      if (static_cast<int>(top.size()) > keep) top.pop_back();
    }
  }
  double best = 0.0;
  for (auto& c : top) {
    for (int i = 0; i < n; ++i) p[i] = from_angles(c.th[i], c.ph[i]);
    coordinate_descent(c.th, c.ph, p, 40, 0.05);
    best = std::max(best, min_chord2(p));
  }
  return {2.0 * std::asin(std::sqrt(best) / 2.0)};
}

}  // namespace oracle
