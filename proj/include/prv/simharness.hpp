#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prv/curvefit.hpp"
#include "prv/image.hpp"
#include "prv/io.hpp"
#include "prv/pathplan.hpp"
#include "prv/predictor.hpp"
#include "prv/viewspace.hpp"
#include "prv/viewspace_io.hpp"

namespace prv {

inline constexpr int kCandidateGridSize = 540;

// Ranges of the synthetic ground-truth curves. The latent complexity c ~ U(0,1)
// drives mu linearly and the texture of the rendered images.
struct SynthRanges {
  double mu_lo = 2.2, mu_hi = 3.0;
  double sigma_lo = 0.35, sigma_hi = 0.55;
  double scale_lo = 5.0, scale_hi = 10.0;
  double offset_lo = 15.0, offset_hi = 25.0;
  double size_lo = 0.07, size_hi = 0.12;  // meters
};

struct SyntheticObject {
  int id = 0;
  std::uint64_t seed = 0;
  double complexity = 0.0;
  FittedCurve curve;
  double size = 0.1;
  ViewCountLabel label;
};

SyntheticObject gen_object(int id, std::uint64_t seed, const SynthRanges& ranges = {},
                           double alpha = kDefaultAlpha, int v_min = kDefaultLabelMin,
                           int v_max = kDefaultLabelMax);

// Objects 0..count-1, each seeded by derive_seed(base_seed, id).
std::vector<SyntheticObject> gen_objects(int count, std::uint64_t base_seed, const SynthRanges& ranges = {},
                                         double alpha = kDefaultAlpha, int v_min = kDefaultLabelMin,
                                         int v_max = kDefaultLabelMax);

struct RenderConfig {
  int width = 128;
  int height = 72;
};

// One procedural image per initial view; texture frequency, palette size,
// saturation and noise all grow with the object's complexity.
std::vector<RgbImage> render_initial_images(const SyntheticObject& obj, std::span<const NamedView> views,
                                            const RenderConfig& config = {});

// ---- Predictors -----------------------------------------------------------------

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionSource source() const = 0;
  virtual Prediction predict(const SyntheticObject& obj) const = 0;
};

std::unique_ptr<Predictor> make_oracle_predictor();
std::unique_ptr<Predictor> make_statistic_predictor(PredictionSource kind, const DatasetStats& stats);
std::unique_ptr<Predictor> make_regressor_predictor(RegressorModel model, std::vector<NamedView> views,
                                                    RenderConfig render = {}, FeatureConfig features = {});

PredictionSource parse_prediction_source(std::string_view text);

// Renders and featurizes `objects`, then fits the ridge model on their labels.
RegressorModel train_on_objects(std::span<const SyntheticObject> objects, std::span<const NamedView> views,
                                double ridge_lambda, const RenderConfig& render = {},
                                const FeatureConfig& features = {});

// ---- Strategies -----------------------------------------------------------------

enum class Strategy { PrvTammes, PrvUniform, NbvProxy };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

// min(1, observed / reference) with a 1e-12 snap to 1; coincident pairs count as 1e-6 rad.
inline constexpr double kCoincidentAngle = 1e-6;
double coverage_ratio(std::span<const Vec3> directions, double tammes_angle);

// PSNR surrogate: curve_eval(curve, max(1, n * coverage_ratio)).
double quality_model(const FittedCurve& curve, std::span<const Vec3> directions, double tammes_angle);

// Geometry shared by every trial of an experiment.
struct Scene {
  double radius = 0.3;
  Vec3 center = Vec3::Zero();
  ViewSpace grid;                      // dense candidate pool
  std::vector<ViewPose> initial;       // initial views, top last
  std::map<int, ViewSpace> tammes;     // Tammes spaces by view count
  PlanOptions plan{};
};

Scene make_scene(double radius, int grid_size, const NamedInitialViews& initial, const PlanOptions& plan = {});
// Solves (or accepts from `table`) the Tammes spaces for every n in `counts`.
void ensure_tammes(Scene& scene, std::span<const int> counts, const TammesOptions& options,
                   const TammesTable* table = nullptr);

struct TrialReport {
  int object_id = 0;
  Strategy strategy = Strategy::PrvTammes;
  PredictionSource predictor = PredictionSource::Oracle;
  int trial = 0;
  int v_star = 0;
  int n_views = 0;
  double achieved_psnr = 0.0;
  double movement_cost = 0.0;
  double planning_time_s = 0.0;
  Solver solver = Solver::Exact;
  std::vector<Vec3> visited;  // view positions in travel order, start first
};

// The robot starts at the top view; movement excludes the initial capture.
TrialReport run_strategy(const SyntheticObject& obj, Strategy strategy, const Prediction& prediction,
                         const Scene& scene, std::uint64_t trial_seed);

// NbvProxy visit order over the grid: farthest point from the visited set,
// seeded with the initial views, ties to the lowest grid index.
std::vector<int> nbv_proxy_sequence(const Scene& scene, int steps);

// ---- Experiments ----------------------------------------------------------------

struct ExperimentConfig {
  int objects = 50;
  std::uint64_t object_seed = 1;
  std::uint64_t trial_seed = 2;
  int trials_per_cell = 5;
  std::vector<Strategy> strategies{Strategy::PrvTammes, Strategy::PrvUniform, Strategy::NbvProxy};
  std::vector<PredictionSource> predictors{PredictionSource::Regressor};
  double alpha = kDefaultAlpha;
  double radius = 0.3;
  int label_min = kDefaultLabelMin;
  int label_max = kDefaultLabelMax;
  int predict_min = kPredictMin;
  int predict_max = kPredictMax;
  int grid_size = kCandidateGridSize;
  NamedInitialViews initial_views{};
  int train_objects = 300;
  double ridge_lambda = 1e-3;
  bool reference_statistics = false;  // use the reference mode/median/mean instead of the training set's
  int exact_cap = kExactCap;
  TammesOptions tammes{};
  std::optional<std::filesystem::path> tammes_table;
  SynthRanges ranges{};
  RenderConfig render{};
  bool record_timing = false;
};

// Unknown keys are rejected. Keys absent from `j` keep their value in `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
// Throws InvalidArgument on an unusable combination.
void validate(const ExperimentConfig& c);
Json config_to_json(const ExperimentConfig& c);

struct ComparisonRow {
  Strategy strategy;
  PredictionSource predictor;
  int trials = 0;
  double n_views_mean = 0, n_views_std = 0;
  double psnr_mean = 0, psnr_std = 0;
  double movement_mean = 0, movement_std = 0;
  std::optional<double> planning_time_mean, planning_time_std;
  double abs_view_error_mean = 0;  // |v_hat - v*|
  // Against the oracle-predictor run with the same object, strategy and trial.
  double psnr_diff_mean = 0;       // |psnr - oracle psnr|
  double movement_diff_mean = 0;   // |movement - oracle movement|
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<TrialReport> trials;  // ordered by (object, strategy, predictor, trial)
  DatasetStats statistics;          // used by the constant predictors
  std::vector<int> eval_labels;     // v* of the evaluated objects
};

ComparisonTable compare(const ExperimentConfig& config, Execution execution = Execution::Parallel);

std::string comparison_to_csv(const ComparisonTable& t);
Json comparison_to_json(const ComparisonTable& t, const ExperimentConfig& config);
Json trial_to_json(const TrialReport& r, bool with_timing);
std::string trials_to_jsonl(const ComparisonTable& t, bool with_timing);
std::string psnr_vs_movement_csv(const ComparisonTable& t);

// Writes comparison.csv, comparison.json, trials.jsonl, psnr_vs_movement.csv and
// manifest.json. On failure the manifest lists what was written before rethrowing.
void run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace prv
