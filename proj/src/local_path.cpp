#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/pathplan.hpp"

namespace prv {
namespace {

double segment_point_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

struct Arc {
  Vec3 u;        // unit start direction
  Vec3 w;        // unit tangent at u toward the end, in the arc plane
  double angle;  // central angle
  double radius;
};

Arc make_arc(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 da = a - c;
  const Vec3 db = b - c;
  Arc arc;
  arc.radius = da.norm();
  arc.u = da / arc.radius;
  const Vec3 ub = db.normalized();
  arc.angle = std::atan2(arc.u.cross(ub).norm(), arc.u.dot(ub));
  Vec3 w = ub - arc.u.dot(ub) * arc.u;
  if (w.norm() < 1e-9) {
    // Antipodal: go over the top.
    w = Vec3::UnitZ() - arc.u.dot(Vec3::UnitZ()) * arc.u;
    if (w.norm() < 1e-9) w = Vec3::UnitX() - arc.u.dot(Vec3::UnitX()) * arc.u;
  }
  arc.w = w.normalized();
  return arc;
}

bool needs_detour(const Vec3& a, const Vec3& b, const ObstacleSphere& obstacle) {
  return !(segment_point_distance(a, b, obstacle.center) > obstacle.radius);
}

}  // namespace

ObstacleSphere object_obstacle(const Vec3& center, double object_size, double clearance) {
  if (!(object_size >= 0.0) || !(clearance >= 0.0)) {
    throw InvalidArgument("object_obstacle: size and clearance must be >= 0");
  }
  return {center, 0.5 * object_size + clearance};
}

double local_path_length(const Vec3& a, const Vec3& b, const Vec3& sphere_center,
                         const ObstacleSphere& obstacle) {
  if (a == b) return 0.0;
  if (!needs_detour(a, b, obstacle)) return (b - a).norm();
  const Arc arc = make_arc(a, b, sphere_center);
  return arc.angle * arc.radius;
}

LocalPath local_path(const Vec3& a, const Vec3& b, const Vec3& sphere_center,
                     const ObstacleSphere& obstacle) {
  if (!(obstacle.radius >= 0.0)) throw InvalidArgument("local_path: obstacle radius must be >= 0");
  LocalPath path;
  if (a == b) {
    path.points = {a};
    return path;
  }
  if (!needs_detour(a, b, obstacle)) {
    path.points = {a, b};
    path.length = (b - a).norm();
    return path;
  }
  const Arc arc = make_arc(a, b, sphere_center);
  const int steps = std::max(1, static_cast<int>(std::ceil(arc.angle / kArcStep - 1e-12)));
  path.points.reserve(static_cast<std::size_t>(steps) + 1);
  path.points.push_back(a);
  for (int k = 1; k < steps; ++k) {
    const double t = arc.angle * k / steps;
    path.points.push_back(sphere_center + arc.radius * (std::cos(t) * arc.u + std::sin(t) * arc.w));
  }
  path.points.push_back(b);
  path.length = arc.angle * arc.radius;
  path.detour = true;
  return path;
}

double CostMatrix::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

void CostMatrix::validate() const {
  if (n_ < 0 || data_.size() != static_cast<std::size_t>(n_) * n_) {
    throw InvalidArgument("cost matrix: storage does not match size");
  }
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) throw InvalidArgument("cost matrix: non-zero diagonal");
    for (int j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("cost matrix: entries must be finite and >= 0");
      if (v != (*this)(j, i)) throw InvalidArgument("cost matrix: not symmetric");
    }
  }
}

CostMatrix build_cost_matrix(const ViewSpace& vs, const ObstacleSphere& obstacle,
                             Execution execution) {
  const int n = static_cast<int>(vs.size());
  if (n < 2) throw InvalidArgument("build_cost_matrix: need at least two views");
  if (!(obstacle.radius >= 0.0) || !(obstacle.radius < vs.radius)) {
    throw InvalidArgument("build_cost_matrix: obstacle must fit inside the view sphere");
  }
  CostMatrix m(n);
  const auto row = [&](int i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = local_path_length(vs.poses[static_cast<std::size_t>(i)].position,
                                         vs.poses[static_cast<std::size_t>(j)].position, vs.center,
                                         obstacle);
      m(i, j) = c;
      m(j, i) = c;
    }
  };
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) row(i);
  } else {
    for (int i = 0; i < n; ++i) row(i);
  }
  return m;
}

CostMatrix euclidean_cost_matrix(std::span<const Vec3> points) {
  const int n = static_cast<int>(points.size());
  CostMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = (points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]).norm();
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  return m;
}

CostMatrix parse_cost_matrix_csv(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  int n = -1;
  int row = 0;
  CostMatrix m;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
        values.push_back(v);
      } catch (const std::logic_error&) {
        throw FormatError(source + ": cannot parse '" + cell + "'", line_no, 1);
      }
    }
    if (n < 0) {
      if (values.size() != 1 || values[0] < 1 || values[0] != std::floor(values[0])) {
        throw FormatError(source + ": first line must hold the matrix size", line_no, 1);
      }
      n = static_cast<int>(values[0]);
      m = CostMatrix(n);
      continue;
    }
    if (row >= n) throw FormatError(source + ": more than n rows", line_no, 1);
    if (static_cast<int>(values.size()) != n) {
      throw FormatError(source + ": expected " + std::to_string(n) + " columns", line_no, 1);
    }
    for (int j = 0; j < n; ++j) m(row, j) = values[static_cast<std::size_t>(j)];
    ++row;
  }
  if (n < 0 || row != n) throw FormatError(source + ": expected n rows after the size line");
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(source + ": " + e.what());
  }
  return m;
}

std::string cost_matrix_to_csv(const CostMatrix& m) {
  std::string out = std::to_string(m.size()) + "\n";
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace prv
