#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/rng.hpp"
#include "prv/simharness.hpp"

namespace prv {
namespace {

struct Rgb {
  double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double hh = h * 6.0;
  const int sector = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

std::uint8_t to_byte(double x) { return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L)); }

}  // namespace

SyntheticObject gen_object(int id, std::uint64_t seed, const SynthRanges& r, double alpha, int v_min,
                           int v_max) {
  Rng rng(seed);
  SyntheticObject obj;
  obj.id = id;
  obj.seed = seed;
  obj.complexity = uniform01(rng);
  obj.curve.mu = r.mu_lo + (r.mu_hi - r.mu_lo) * obj.complexity;
  obj.curve.sigma = uniform(rng, r.sigma_lo, r.sigma_hi);
  obj.curve.scale = uniform(rng, r.scale_lo, r.scale_hi);
  obj.curve.offset = uniform(rng, r.offset_lo, r.offset_hi);
  obj.size = uniform(rng, r.size_lo, r.size_hi);
  obj.label = required_views(obj.curve, alpha, v_min, v_max);
  return obj;
}

std::vector<SyntheticObject> gen_objects(int count, std::uint64_t base_seed, const SynthRanges& ranges,
                                         double alpha, int v_min, int v_max) {
  if (count < 0) throw InvalidArgument("gen_objects: count must be >= 0");
  std::vector<SyntheticObject> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(gen_object(i, derive_seed(base_seed, static_cast<std::uint64_t>(i)), ranges, alpha, v_min, v_max));
  }
  return out;
}

std::vector<RgbImage> render_initial_images(const SyntheticObject& obj, std::span<const NamedView> views,
                                            const RenderConfig& config) {
  if (config.width < 8 || config.height < 8) throw InvalidArgument("render: image too small");
  const double c = obj.complexity;
  Rng look(derive_seed(obj.seed, 0x6c6f6f6b));
  const double hue0 = uniform01(look);
  const int palette_size = 2 + static_cast<int>(std::lround(6.0 * c));
  std::vector<Rgb> palette;
  for (int k = 0; k < palette_size; ++k) {
    const double val = 0.35 + 0.5 * ((k * 5 % palette_size) + 0.5) / palette_size;
    palette.push_back(hsv_to_rgb(hue0 + 0.11 * k, 0.15 + 0.75 * c, val));
  }
  const double freq = 1.0 + 9.0 * c;
  const double noise = 3.0 + 25.0 * c;
  const Rgb bg{214, 214, 210};

  std::vector<RgbImage> images;
  for (NamedView view : views) {
    Rng rng(derive_seed(obj.seed, 0x1000 + static_cast<std::uint64_t>(view)));
    RgbImage img(config.width, config.height, {to_byte(bg.r), to_byte(bg.g), to_byte(bg.b)});
    const double ry = 0.42 * config.height * (obj.size / 0.12);
    const double rx = view == NamedView::Top ? ry : ry * uniform(rng, 0.7, 0.9);
    const double theta = uniform(rng, 0.0, std::numbers::pi);
    const double phase = uniform(rng, 0.0, 1.0);
    const double cx = 0.5 * config.width, cy = 0.5 * config.height;
    for (int y = 0; y < config.height; ++y) {
      for (int x = 0; x < config.width; ++x) {
        const double u = (x + 0.5 - cx) / rx, v = (y + 0.5 - cy) / ry;
        if (u * u + v * v > 1.0) continue;
        const double a = u * std::cos(theta) + v * std::sin(theta);
        const double b = -u * std::sin(theta) + v * std::cos(theta);
        const double s = std::sin(2 * std::numbers::pi * (freq * a + phase)) +
                         std::sin(2 * std::numbers::pi * 1.7 * freq * b);
        const int band = std::clamp(static_cast<int>((s + 2.0) / 4.0 * palette_size), 0, palette_size - 1);
        const double shade = 1.0 - 0.25 * (u * u + v * v);
        const Rgb& p = palette[static_cast<std::size_t>(band)];
        img.set(x, y, {to_byte(255 * p.r * shade + uniform(rng, -noise, noise)),
                       to_byte(255 * p.g * shade + uniform(rng, -noise, noise)),
                       to_byte(255 * p.b * shade + uniform(rng, -noise, noise))});
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

namespace {

class OraclePredictor final : public Predictor {
 public:
  PredictionSource source() const override { return PredictionSource::Oracle; }
  Prediction predict(const SyntheticObject& obj) const override { return predict_oracle(obj.label); }
};

class StatisticPredictor final : public Predictor {
 public:
  StatisticPredictor(PredictionSource kind, DatasetStats stats) : kind_(kind), stats_(stats) {}
  PredictionSource source() const override { return kind_; }
  Prediction predict(const SyntheticObject&) const override { return predict_statistic(kind_, stats_); }

 private:
  PredictionSource kind_;
  DatasetStats stats_;
};

class RegressorPredictor final : public Predictor {
 public:
  RegressorPredictor(RegressorModel model, std::vector<NamedView> views, RenderConfig render,
                     FeatureConfig features)
      : model_(std::move(model)), views_(std::move(views)), render_(render), features_(features) {}
  PredictionSource source() const override { return PredictionSource::Regressor; }
  Prediction predict(const SyntheticObject& obj) const override {
    const auto images = render_initial_images(obj, views_, render_);
    return predict_regressor(model_, extract_features(images, features_, Execution::Serial));
  }

 private:
  RegressorModel model_;
  std::vector<NamedView> views_;
  RenderConfig render_;
  FeatureConfig features_;
};

}  // namespace

std::unique_ptr<Predictor> make_oracle_predictor() { return std::make_unique<OraclePredictor>(); }

std::unique_ptr<Predictor> make_statistic_predictor(PredictionSource kind, const DatasetStats& stats) {
  if (kind != PredictionSource::Mode && kind != PredictionSource::Median && kind != PredictionSource::Mean) {
    throw InvalidArgument("statistic predictor must be mode, median or mean");
  }
  return std::make_unique<StatisticPredictor>(kind, stats);
}

std::unique_ptr<Predictor> make_regressor_predictor(RegressorModel model, std::vector<NamedView> views,
                                                    RenderConfig render, FeatureConfig features) {
  if (views.empty()) throw InvalidArgument("regressor predictor needs at least one initial view");
  return std::make_unique<RegressorPredictor>(std::move(model), std::move(views), render, features);
}

PredictionSource parse_prediction_source(std::string_view text) {
  if (text == "oracle") return PredictionSource::Oracle;
  if (text == "mode") return PredictionSource::Mode;
  if (text == "median") return PredictionSource::Median;
  if (text == "mean") return PredictionSource::Mean;
  if (text == "regressor") return PredictionSource::Regressor;
  throw InvalidArgument("unknown predictor '" + std::string(text) +
                        "' (expected oracle, mode, median, mean or regressor)");
}

RegressorModel train_on_objects(std::span<const SyntheticObject> objects, std::span<const NamedView> views,
                                double ridge_lambda, const RenderConfig& render, const FeatureConfig& features) {
  std::vector<FeatureVector> x(objects.size());
  std::vector<double> y(objects.size());
  std::vector<std::exception_ptr> errors(objects.size());
  const int count = static_cast<int>(objects.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      x[k] = extract_features(render_initial_images(objects[k], views, render), features, Execution::Serial);
      y[k] = objects[k].label.v_star;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return train_regressor(x, y, ridge_lambda);
}

}  // namespace prv
