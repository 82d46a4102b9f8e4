#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "prv/curvefit.hpp"
#include "prv/image.hpp"
#include "prv/io.hpp"
#include "prv/viewspace.hpp"

namespace prv {

inline constexpr int kPredictMin = 13;
inline constexpr int kPredictMax = 58;

// ---- Image features ----------------------------------------------------------

inline constexpr std::size_t kImageFeatureCount = 5;
inline constexpr std::size_t kFeatureDim = 2 * kImageFeatureCount;

// Thresholds for the handcrafted complexity signals.
struct FeatureConfig {
  int histogram_bits = 5;          // per channel -> 32^3 RGB bins
  double edge_fraction = 0.1;      // Sobel magnitude threshold, relative to the max
  double border_tolerance = 0.1;   // per-channel deviation from the border color
};

// Per image, in order: RGB histogram entropy (nats), edge density, mean HSV
// saturation, foreground fraction, luminance variance / 0.25.
using ImageFeatures = std::array<double, kImageFeatureCount>;

// Means of each image feature followed by their (population) variances.
struct FeatureVector {
  std::vector<double> values;
};

ImageFeatures image_features(const RgbImage& image, const FeatureConfig& config = {});

// Each feature is aggregated over its sorted values, so any permutation of
// the inputs gives a bitwise-identical result.
FeatureVector aggregate_features(std::span<const ImageFeatures> per_image);

FeatureVector extract_features(std::span<const RgbImage> images, const FeatureConfig& config = {},
                               Execution execution = Execution::Parallel);

// ---- Predictions ---------------------------------------------------------------

enum class PredictionSource { Oracle, Mode, Median, Mean, Regressor };

std::string_view to_string(PredictionSource source);

struct Prediction {
  double v_hat_real = 0.0;
  int v_hat = 0;
  PredictionSource source = PredictionSource::Oracle;
  bool clamped = false;
};

int round_half_up(double x);

// Clamp to [out_min, out_max] then round half up.
Prediction finalize_prediction(double raw, PredictionSource source, int out_min = kPredictMin,
                               int out_max = kPredictMax);

Prediction predict_oracle(const ViewCountLabel& label);

struct DatasetStats {
  int mode = 0;
  int median = 0;
  int mean = 0;
};

// Mode ties go to the smaller value; median and mean are rounded half up.
DatasetStats compute_dataset_stats(std::span<const int> labels);

// Reference label statistics: mode 32, median 34, mean 35.
DatasetStats reference_dataset_stats();

Prediction predict_statistic(PredictionSource kind, const DatasetStats& stats);

// ---- Ridge regressor -----------------------------------------------------------

struct RegressorModel {
  std::vector<double> weights;  // one per feature, bias last
  double ridge_lambda = 1.0;
  int out_min = kPredictMin;
  int out_max = kPredictMax;

  std::size_t feature_dim() const { return weights.empty() ? 0 : weights.size() - 1; }
};

// Closed-form ridge regression; the bias is not penalized.
RegressorModel train_regressor(std::span<const FeatureVector> features, std::span<const double> targets,
                               double ridge_lambda, int out_min = kPredictMin,
                               int out_max = kPredictMax);
RegressorModel train_regressor(std::span<const FeatureVector> features,
                               std::span<const ViewCountLabel> labels, double ridge_lambda,
                               int out_min = kPredictMin, int out_max = kPredictMax);

// Unclamped affine output.
double regressor_raw(const RegressorModel& model, const FeatureVector& features);
Prediction predict_regressor(const RegressorModel& model, const FeatureVector& features);

Json model_to_json(const RegressorModel& model);
RegressorModel model_from_json(const Json& j, const std::string& context = "model");
void save_model(const std::filesystem::path& path, const RegressorModel& model);
RegressorModel load_model(const std::filesystem::path& path);

Json prediction_to_json(const Prediction& p);

}  // namespace prv
