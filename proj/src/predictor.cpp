#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "prv/errors.hpp"
#include "prv/predictor.hpp"

namespace prv {

std::string_view to_string(PredictionSource source) {
  switch (source) {
    case PredictionSource::Oracle: return "oracle";
    case PredictionSource::Mode: return "mode";
    case PredictionSource::Median: return "median";
    case PredictionSource::Mean: return "mean";
    case PredictionSource::Regressor: return "regressor";
  }
  return "oracle";
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

Prediction finalize_prediction(double raw, PredictionSource source, int out_min, int out_max) {
  if (!std::isfinite(raw)) throw InvalidArgument("prediction is not finite");
  Prediction p;
  p.source = source;
  p.v_hat_real = std::clamp(raw, static_cast<double>(out_min), static_cast<double>(out_max));
  p.clamped = p.v_hat_real != raw;
  p.v_hat = round_half_up(p.v_hat_real);
  return p;
}

Prediction predict_oracle(const ViewCountLabel& label) {
  Prediction p;
  p.source = PredictionSource::Oracle;
  p.v_hat_real = label.v_star;
  p.v_hat = label.v_star;
  return p;
}

DatasetStats compute_dataset_stats(std::span<const int> labels) {
  if (labels.empty()) throw InvalidArgument("dataset statistics need at least one label");
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());

  DatasetStats s;
  std::map<int, int> counts;
  for (int v : sorted) ++counts[v];
  int best_count = 0;
  for (const auto& [v, c] : counts) {
    if (c > best_count) {
      best_count = c;
      s.mode = v;
    }
  }
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.median = round_half_up(median);
  double sum = 0.0;
  for (int v : sorted) sum += v;
  s.mean = round_half_up(sum / static_cast<double>(n));
  return s;
}

DatasetStats reference_dataset_stats() { return {32, 34, 35}; }

Prediction predict_statistic(PredictionSource kind, const DatasetStats& stats) {
  int value = 0;
  switch (kind) {
    case PredictionSource::Mode: value = stats.mode; break;
    case PredictionSource::Median: value = stats.median; break;
    case PredictionSource::Mean: value = stats.mean; break;
    default: throw InvalidArgument("predict_statistic: kind must be mode, median or mean");
  }
  Prediction p;
  p.source = kind;
  p.v_hat_real = value;
  p.v_hat = value;
  return p;
}

RegressorModel train_regressor(std::span<const FeatureVector> features, std::span<const double> targets,
                               double ridge_lambda, int out_min, int out_max) {
  if (features.size() != targets.size()) {
    throw InvalidArgument("train_regressor: features and labels differ in length");
  }
  if (features.empty()) throw InvalidArgument("train_regressor: empty training set");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw InvalidArgument("train_regressor: ridge_lambda must be finite and >= 0");
  }
  if (!(out_min < out_max)) throw InvalidArgument("train_regressor: need out_min < out_max");
  const std::size_t dim = features.front().values.size();
  if (dim == 0) throw InvalidArgument("train_regressor: empty feature vectors");
  if (features.size() < dim + 1) {
    throw InvalidArgument("train_regressor: need at least feature_dim + 1 samples");
  }

  const auto rows = static_cast<Eigen::Index>(features.size());
  const auto cols = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& f = features[static_cast<std::size_t>(i)].values;
    if (f.size() != dim) throw InvalidArgument("train_regressor: inconsistent feature length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!std::isfinite(f[static_cast<std::size_t>(k)])) {
        throw InvalidArgument("train_regressor: non-finite feature");
      }
      X(i, k) = f[static_cast<std::size_t>(k)];
    }
    y[i] = targets[static_cast<std::size_t>(i)];
  }

  // Centering removes the bias from the penalized system.
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::VectorXd w;
  if (ridge_lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols) {
      throw FitFailure("train_regressor: design matrix is rank deficient; use ridge_lambda > 0");
    }
    w = qr.solve(yc);
  } else {
    Eigen::MatrixXd gram = Xc.transpose() * Xc;
    gram.diagonal().array() += ridge_lambda;
    w = gram.ldlt().solve(Xc.transpose() * yc);
  }
  if (!w.allFinite()) throw FitFailure("train_regressor: solution is not finite");

  RegressorModel model;
  model.ridge_lambda = ridge_lambda;
  model.out_min = out_min;
  model.out_max = out_max;
  model.weights.assign(w.data(), w.data() + w.size());
  model.weights.push_back(y_mean - x_mean.dot(w));
  return model;
}

RegressorModel train_regressor(std::span<const FeatureVector> features,
                               std::span<const ViewCountLabel> labels, double ridge_lambda,
                               int out_min, int out_max) {
  std::vector<double> targets;
  targets.reserve(labels.size());
  for (const auto& l : labels) targets.push_back(l.v_star);
  return train_regressor(features, targets, ridge_lambda, out_min, out_max);
}

double regressor_raw(const RegressorModel& model, const FeatureVector& features) {
  if (model.weights.empty() || features.values.size() != model.feature_dim()) {
    throw InvalidArgument("predict_regressor: model expects " + std::to_string(model.feature_dim()) +
                          " features, got " + std::to_string(features.values.size()));
  }
  double raw = model.weights.back();
  for (std::size_t k = 0; k < features.values.size(); ++k) raw += model.weights[k] * features.values[k];
  return raw;
}

Prediction predict_regressor(const RegressorModel& model, const FeatureVector& features) {
  return finalize_prediction(regressor_raw(model, features), PredictionSource::Regressor,
                             model.out_min, model.out_max);
}

Json model_to_json(const RegressorModel& model) {
  Json j;
  j["weights"] = model.weights;
  j["ridge_lambda"] = model.ridge_lambda;
  j["out_min"] = model.out_min;
  j["out_max"] = model.out_max;
  return j;
}

RegressorModel model_from_json(const Json& j, const std::string& context) {
  RegressorModel m;
  const Json& w = require(j, "weights", context);
  if (!w.is_array() || w.size() < 2) throw FormatError(context + ": 'weights' must be an array of >= 2 numbers");
  for (const auto& v : w) {
    if (!v.is_number()) throw FormatError(context + ": non-numeric weight");
    m.weights.push_back(v.get<double>());
  }
  m.ridge_lambda = require_number(j, "ridge_lambda", context);
  const Json& lo = require(j, "out_min", context);
  const Json& hi = require(j, "out_max", context);
  if (!lo.is_number_integer() || !hi.is_number_integer()) {
    throw FormatError(context + ": out_min/out_max must be integers");
  }
  m.out_min = lo.get<int>();
  m.out_max = hi.get<int>();
  if (!(m.out_min < m.out_max)) throw FormatError(context + ": out_min must be < out_max");
  for (double v : m.weights) {
    if (!std::isfinite(v)) throw FormatError(context + ": non-finite weight");
  }
  return m;
}

void save_model(const std::filesystem::path& path, const RegressorModel& model) {
  write_text_file(path, model_to_json(model).dump() + "\n");
}

RegressorModel load_model(const std::filesystem::path& path) {
  return model_from_json(load_json_file(path), path.string());
}

Json prediction_to_json(const Prediction& p) {
  Json j;
  j["v_hat"] = p.v_hat;
  j["v_hat_real"] = p.v_hat_real;
  j["source"] = std::string(to_string(p.source));
  j["clamped"] = p.clamped;
  return j;
}

}  // namespace prv
