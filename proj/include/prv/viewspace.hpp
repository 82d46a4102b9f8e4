#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace prv {

using Vec3 = Eigen::Vector3d;

// Selects the OpenMP kernel or its serial reference. Both produce
// bitwise-identical results; the serial path exists for testing.
enum class Execution { Serial, Parallel };

// Camera pose. The body frame is (right, up, forward): columns of the
// orientation's rotation matrix. forward points at the view-space center.
struct ViewPose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Vec3 right() const { return orientation * Vec3::UnitX(); }
  Vec3 up() const { return orientation * Vec3::UnitY(); }
  Vec3 forward() const { return orientation * Vec3::UnitZ(); }
};

enum class ViewSpaceKind { Tammes, UniformGrid, Custom };

std::string_view to_string(ViewSpaceKind kind);
ViewSpaceKind parse_viewspace_kind(std::string_view text);

struct ViewSpace {
  Vec3 center = Vec3::Zero();
  double radius = 0.3;
  std::vector<ViewPose> poses;
  ViewSpaceKind kind = ViewSpaceKind::Custom;

  std::size_t size() const { return poses.size(); }
  std::vector<Vec3> positions() const;
  // Unit vectors from center to each pose.
  std::vector<Vec3> directions() const;
};

// Throws InvalidArgument if any pose leaves the hemisphere, is not oriented
// at the center, or coincides with another pose.
void validate(const ViewSpace& vs);

// forward = normalize(center - position); up = world +z projected
// orthogonal to forward, or world +x when looking straight down.
ViewPose look_at_pose(const Vec3& position, const Vec3& center);

ViewSpace make_viewspace(std::span<const Vec3> unit_directions, double radius, const Vec3& center,
                         ViewSpaceKind kind);

// Minimum central angle over all pairs of directions (need not be unit).
double min_pairwise_angle(std::span<const Vec3> directions);
double min_pairwise_angle(const ViewSpace& vs);
// Same, but +inf for fewer than two poses instead of throwing.
double min_pairwise_angle_or_inf(const ViewSpace& vs);

inline constexpr double kNoPairAngle = std::numeric_limits<double>::infinity();

// ---- Tammes configurations -------------------------------------------------

struct TammesOptions {
  std::uint64_t seed = 20240101;
  int restarts = 6;
  int iters = 800;
  Execution execution = Execution::Parallel;
};

struct TammesRestart {
  std::vector<Vec3> directions;
  double min_angle = 0.0;
};

// One annealed soft-min ascent from a seeded random start. Returns the best
// iterate (by true minimum angle) encountered.
TammesRestart tammes_restart(int n, std::uint64_t restart_seed, int iters);

// Best of `restarts` independent restarts on the unit upper hemisphere.
// Restart k is seeded by derive_seed(seed, k); ties go to the lowest k.
TammesRestart tammes_unit_hemisphere(int n, const TammesOptions& options);

ViewSpace tammes_hemisphere(int n, double radius, const TammesOptions& options = {},
                            const Vec3& center = Vec3::Zero());

// Golden-angle spiral restricted to z in (0, 1]; index 0 is the zenith.
ViewSpace candidate_grid(int n, double radius, const Vec3& center = Vec3::Zero());

// ---- Named initial views ---------------------------------------------------

enum class NamedView { Top, Left, Right, Front, Back };

std::string_view to_string(NamedView view);
NamedView parse_named_view(std::string_view text);

struct NamedInitialViews {
  std::vector<NamedView> selection{NamedView::Top, NamedView::Left, NamedView::Front};
};

// Direction of a named view: Top is the zenith, Front +x, Left +y,
// Back -x, Right -y (all on the equator).
Vec3 named_view_direction(NamedView view);

// Poses in selection order with Top moved last (the robot ends there).
std::vector<ViewPose> initial_views(const Vec3& center, double radius,
                                    const NamedInitialViews& selection = {});

}  // namespace prv
