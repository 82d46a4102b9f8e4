#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prv/errors.hpp"
#include "prv/io.hpp"

namespace prv {

inline constexpr double kDefaultAlpha = 0.02;
inline constexpr int kDefaultLabelMin = 3;
inline constexpr int kDefaultLabelMax = 58;

struct PsnrSample {
  int v = 0;          // number of training views
  double psnr = 0.0;  // dB
};

// C(v) = offset + scale * Phi((ln v - mu) / sigma)
struct FittedCurve {
  double mu = 0.0;
  double sigma = 1.0;
  double scale = 1.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  bool degenerate = false;  // flat input or a parameter pinned at its clamp
  int iterations = 0;
};

struct CurveBounds {
  double sigma_min = 1e-3;
  double sigma_max = 10.0;
  double scale_min = 1e-3;
  double scale_max = 100.0;
};

struct FitOptions {
  int max_iters = 500;
  double rel_tol = 1e-10;
  CurveBounds bounds{};
};

class CurveFitFailure : public FitFailure {
 public:
  CurveFitFailure(const std::string& what, FittedCurve last) : FitFailure(what), last_(last) {}
  const FittedCurve& last_valid() const noexcept { return last_; }

 private:
  FittedCurve last_;
};

double curve_eval(const FittedCurve& c, double v);

// Levenberg-Marquardt least squares on vertical residuals. Needs >= 5
// samples covering >= 4 distinct v.
FittedCurve fit_curve(std::span<const PsnrSample> samples, const FitOptions& options = {});

struct ViewCountLabel {
  int v_star = 0;
  double alpha = kDefaultAlpha;
  int v_min = kDefaultLabelMin;
  int v_max = kDefaultLabelMax;
  bool saturated = false;
};

// Smallest v in [v_min, v_max] from which every later per-view gain
// C(u+1) - C(u), u >= v, stays below alpha. When the gain is still >= alpha
// at v_max (or rises above it later), returns v_max flagged saturated.
ViewCountLabel required_views(const FittedCurve& c, double alpha = kDefaultAlpha,
                              int v_min = kDefaultLabelMin, int v_max = kDefaultLabelMax);

// v = 3, 5, ..., 49
std::vector<int> default_sample_grid();

std::vector<PsnrSample> synth_curve(const FittedCurve& params, double noise_sigma,
                                    std::span<const int> grid, std::uint64_t seed);

// CSV with header "v,psnr".
std::vector<PsnrSample> parse_samples_csv(std::string_view text, const std::string& source = "csv");
std::vector<PsnrSample> read_samples_csv(const std::filesystem::path& path);
std::string samples_to_csv(std::span<const PsnrSample> samples);

// {"mu":..,"sigma":..,"scale":..,"offset":..,"residual_rms":..,
//  "v_star":..,"alpha":..,"saturated":..}
Json label_to_json(const FittedCurve& c, const ViewCountLabel& label);

}  // namespace prv
