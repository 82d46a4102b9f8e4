#include "prv/viewspace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "prv/errors.hpp"

namespace prv {

std::string_view to_string(ViewSpaceKind kind) {
  switch (kind) {
    case ViewSpaceKind::Tammes: return "tammes";
    case ViewSpaceKind::UniformGrid: return "uniform_grid";
    case ViewSpaceKind::Custom: return "custom";
  }
  return "custom";
}

ViewSpaceKind parse_viewspace_kind(std::string_view text) {
  if (text == "tammes") return ViewSpaceKind::Tammes;
  if (text == "uniform_grid") return ViewSpaceKind::UniformGrid;
  if (text == "custom") return ViewSpaceKind::Custom;
  throw InvalidArgument("unknown view-space kind '" + std::string(text) + "'");
}

std::vector<Vec3> ViewSpace::positions() const {
  std::vector<Vec3> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(p.position);
  return out;
}

std::vector<Vec3> ViewSpace::directions() const {
  std::vector<Vec3> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back((p.position - center).normalized());
  return out;
}

ViewPose look_at_pose(const Vec3& position, const Vec3& center) {
  const Vec3 offset = center - position;
  const double dist = offset.norm();
  if (!(dist > 0.0) || !std::isfinite(dist)) {
    throw InvalidArgument("look_at_pose: position coincides with center");
  }
  const Vec3 forward = offset / dist;
  Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(forward) * forward;
  if (up.norm() < 1e-12) {
    up = Vec3::UnitX() - Vec3::UnitX().dot(forward) * forward;
  }
  up.normalize();
  const Vec3 right = up.cross(forward);

  Eigen::Matrix3d basis;
  basis.col(0) = right;
  basis.col(1) = up;
  basis.col(2) = forward;
  ViewPose pose;
  pose.position = position;
  pose.orientation = Eigen::Quaterniond(basis).normalized();
  return pose;
}

ViewSpace make_viewspace(std::span<const Vec3> unit_directions, double radius, const Vec3& center,
                         ViewSpaceKind kind) {
  if (!(radius > 0.0)) throw InvalidArgument("view-space radius must be positive");
  ViewSpace vs;
  vs.center = center;
  vs.radius = radius;
  vs.kind = kind;
  vs.poses.reserve(unit_directions.size());
  for (const auto& d : unit_directions) {
    vs.poses.push_back(look_at_pose(center + radius * d, center));
  }
  return vs;
}

void validate(const ViewSpace& vs) {
  if (!(vs.radius > 0.0) || !std::isfinite(vs.radius)) {
    throw InvalidArgument("view-space radius must be positive and finite");
  }
  for (std::size_t i = 0; i < vs.poses.size(); ++i) {
    const auto& p = vs.poses[i];
    const Vec3 rel = p.position - vs.center;
    const std::string where = "pose " + std::to_string(i) + ": ";
    if (std::abs(rel.norm() - vs.radius) > 1e-9 * vs.radius) {
      throw InvalidArgument(where + "not on the view sphere");
    }
    if (rel.z() < -1e-12 * vs.radius) throw InvalidArgument(where + "below the tabletop");
    if (std::abs(p.orientation.norm() - 1.0) > 1e-9) {
      throw InvalidArgument(where + "orientation is not a unit quaternion");
    }
    const Vec3 want = -rel.normalized();
    const Vec3 have = p.orientation.normalized() * Vec3::UnitZ();
    const double err = std::atan2(want.cross(have).norm(), want.dot(have));
    if (err > 1e-6) throw InvalidArgument(where + "forward axis does not face the center");
  }
  if (vs.poses.size() >= 2 && !(min_pairwise_angle(vs) > 0.0)) {
    throw InvalidArgument("view space contains coincident poses");
  }
}

double min_pairwise_angle(std::span<const Vec3> directions) {
  if (directions.size() < 2) {
    throw InvalidArgument("min_pairwise_angle needs at least two poses");
  }
  double best = std::numbers::pi;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      const double a = std::atan2(directions[i].cross(directions[j]).norm(),
                                  directions[i].dot(directions[j]));
      best = std::min(best, a);
    }
  }
  return best;
}

double min_pairwise_angle(const ViewSpace& vs) {
  const auto dirs = vs.directions();
  return min_pairwise_angle(std::span<const Vec3>(dirs));
}

double min_pairwise_angle_or_inf(const ViewSpace& vs) {
  return vs.size() < 2 ? kNoPairAngle : min_pairwise_angle(vs);
}

ViewSpace candidate_grid(int n, double radius, const Vec3& center) {
  if (n < 1) throw InvalidArgument("candidate_grid: n must be >= 1");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    // Equal-area bands of the cap: z uniform in (0, 1].
    const double z = 1.0 - static_cast<double>(k) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * k;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return make_viewspace(dirs, radius, center, ViewSpaceKind::UniformGrid);
}

std::string_view to_string(NamedView view) {
  switch (view) {
    case NamedView::Top: return "top";
    case NamedView::Left: return "left";
    case NamedView::Right: return "right";
    case NamedView::Front: return "front";
    case NamedView::Back: return "back";
  }
  return "top";
}

NamedView parse_named_view(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "top") return NamedView::Top;
  if (lower == "left") return NamedView::Left;
  if (lower == "right") return NamedView::Right;
  if (lower == "front") return NamedView::Front;
  if (lower == "back") return NamedView::Back;
  throw InvalidArgument("unknown initial view '" + std::string(text) + "'");
}

Vec3 named_view_direction(NamedView view) {
  switch (view) {
    case NamedView::Top: return Vec3::UnitZ();
    case NamedView::Front: return Vec3::UnitX();
    case NamedView::Left: return Vec3::UnitY();
    case NamedView::Back: return -Vec3::UnitX();
    case NamedView::Right: return -Vec3::UnitY();
  }
  return Vec3::UnitZ();
}

std::vector<ViewPose> initial_views(const Vec3& center, double radius,
                                    const NamedInitialViews& selection) {
  if (!(radius > 0.0)) throw InvalidArgument("initial_views: radius must be positive");
  const auto& names = selection.selection;
  if (names.empty() || names.size() > 5) {
    throw InvalidArgument("initial_views: selection must name 1 to 5 views");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) {
        throw InvalidArgument("initial_views: duplicate view '" + std::string(to_string(names[i])) +
                              "'");
      }
    }
  }
  std::vector<NamedView> ordered;
  bool has_top = false;
  for (auto v : names) {
    if (v == NamedView::Top) {
      has_top = true;
    } else {
      ordered.push_back(v);
    }
  }
  if (has_top) ordered.push_back(NamedView::Top);

  std::vector<ViewPose> poses;
  poses.reserve(ordered.size());
  for (auto v : ordered) {
    poses.push_back(look_at_pose(center + radius * named_view_direction(v), center));
  }
  return poses;
}

}  // namespace prv
