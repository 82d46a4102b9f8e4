#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "prv/errors.hpp"
#include "prv/image.hpp"
#include "prv/predictor.hpp"

using namespace prv;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "prv_test_predictor";
  std::filesystem::create_directories(dir);
  return dir / name;
}

RgbImage checkerboard(int size, int block) {
  RgbImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const std::uint8_t v = ((x / block + y / block) % 2) ? 255 : 0;
      img.set(x, y, {v, v, v});
    }
  }
  return img;
}

RgbImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

// Plain Sobel on clamped coordinates, written out tap by tap.
double naive_edge_density(const RgbImage& img, double fraction) {
  const int w = img.width, h = img.height;
  std::vector<double> lum(static_cast<std::size_t>(w * h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto* p = img.at(x, y);
      lum[y * w + x] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
    }
  }
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::vector<double> mag(lum.size());
  double mx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0, gy = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = std::min(std::max(x + dx, 0), w - 1);
          const int sy = std::min(std::max(y + dy, 0), h - 1);
          gx += kx[dy + 1][dx + 1] * lum[sy * w + sx];
          gy += ky[dy + 1][dx + 1] * lum[sy * w + sx];
        }
      }
      mag[y * w + x] = std::hypot(gx, gy);
      mx = std::max(mx, mag[y * w + x]);
    }
  }
  if (mx == 0) return 0;
  int count = 0;
  for (double m : mag) count += m > fraction * mx;
  return static_cast<double>(count) / static_cast<double>(mag.size());
}

}  // namespace

TEST_CASE("features of a checkerboard") {
  const RgbImage img = checkerboard(16, 4);
  const ImageFeatures f = image_features(img);
  CHECK(f[0] == doctest::Approx(std::log(2.0)));
  CHECK(f[1] == doctest::Approx(naive_edge_density(img, 0.1)));
  CHECK(f[2] == 0.0);
  CHECK(f[3] == doctest::Approx(0.5));  // border tie goes to black, white is foreground
  CHECK(f[4] == doctest::Approx(1.0));
}

TEST_CASE("features of flat and saturated images") {
  const RgbImage grey(20, 10, {128, 128, 128});
  const ImageFeatures g = image_features(grey);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK(g[3] == 0.0);
  CHECK(g[4] < 1e-20);
  const RgbImage red(20, 10, {255, 0, 0});
  CHECK(image_features(red)[2] == doctest::Approx(1.0));

  RgbImage blob(30, 30, {200, 200, 200});
  for (int y = 10; y < 20; ++y) {
    for (int x = 10; x < 20; ++x) blob.set(x, y, {20, 60, 200});
  }
  CHECK(image_features(blob)[3] == doctest::Approx(100.0 / 900.0));
  const RgbImage noisy = noise_image(40, 30, 4);
  CHECK(image_features(noisy)[1] == doctest::Approx(naive_edge_density(noisy, 0.1)));
}

TEST_CASE("feature errors") {
  CHECK_THROWS_AS(image_features(RgbImage{}), InvalidArgument);
  FeatureConfig bad;
  bad.histogram_bits = 0;
  CHECK_THROWS_AS(image_features(RgbImage(4, 4), bad), InvalidArgument);
  CHECK_THROWS_AS(aggregate_features({}), InvalidArgument);
}

TEST_CASE("aggregation is permutation invariant and parallel-safe") {
  std::vector<RgbImage> images;
  for (int k = 0; k < 5; ++k) images.push_back(noise_image(32 + k, 24, 100 + k));
  const FeatureVector a = extract_features(images, {}, Execution::Parallel);
  const FeatureVector s = extract_features(images, {}, Execution::Serial);
  CHECK(a.values == s.values);
  std::vector<RgbImage> shuffled{images[3], images[0], images[4], images[2], images[1]};
  CHECK(extract_features(shuffled).values == a.values);
  REQUIRE(a.values.size() == kFeatureDim);

  const FeatureVector single = extract_features(std::span(images.data(), 1));
  for (std::size_t k = kImageFeatureCount; k < kFeatureDim; ++k) CHECK(single.values[k] == 0.0);
}

TEST_CASE("parallel extraction rethrows per-image errors") {
  std::vector<RgbImage> images{noise_image(8, 8, 1), RgbImage{}};
  CHECK_THROWS_AS(extract_features(images, {}, Execution::Parallel), InvalidArgument);
}

TEST_CASE("rounding and clamping") {
  CHECK(round_half_up(35.5) == 36);
  CHECK(round_half_up(35.49) == 35);
  CHECK(round_half_up(-0.5) == 0);
  auto p = finalize_prediction(12.2, PredictionSource::Regressor);
  CHECK(p.v_hat == 13);
  CHECK(p.clamped);
  p = finalize_prediction(58.7, PredictionSource::Regressor);
  CHECK(p.v_hat == 58);
  CHECK(p.clamped);
  p = finalize_prediction(57.5, PredictionSource::Regressor);
  CHECK(p.v_hat == 58);
  CHECK_FALSE(p.clamped);
  CHECK_THROWS_AS(finalize_prediction(NAN, PredictionSource::Regressor), InvalidArgument);
}

TEST_CASE("dataset statistics") {
  const std::vector<int> labels{3, 3, 2, 2, 1};
  const DatasetStats s = compute_dataset_stats(labels);
  CHECK(s.mode == 2);
  CHECK(s.median == 2);
  CHECK(s.mean == 2);
  const std::vector<int> even{10, 20, 21, 40};
  CHECK(compute_dataset_stats(even).median == 21);  // 20.5 rounds up
  CHECK_THROWS_AS(compute_dataset_stats({}), InvalidArgument);

  const DatasetStats ref = reference_dataset_stats();
  CHECK(predict_statistic(PredictionSource::Mean, ref).v_hat == 35);
  CHECK(predict_statistic(PredictionSource::Median, ref).v_hat == 34);
  CHECK(predict_statistic(PredictionSource::Mode, ref).v_hat == 32);
  CHECK_THROWS_AS(predict_statistic(PredictionSource::Regressor, ref), InvalidArgument);
}

TEST_CASE("oracle predictor passes labels through") {
  ViewCountLabel l;
  l.v_star = 7;
  const Prediction p = predict_oracle(l);
  CHECK(p.v_hat == 7);
  CHECK(p.source == PredictionSource::Oracle);
}

TEST_CASE("ridge regression") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::vector<double> w{1.5, -2.0, 0.5, 3.0, 0.0, -1.0, 2.5, 0.25, -0.75, 1.0};
  const double bias = 30.0;
  std::vector<FeatureVector> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    FeatureVector f;
    double t = bias;
    for (double wk : w) {
      f.values.push_back(n01(rng));
      t += wk * f.values.back();
    }
    x.push_back(f);
    y.push_back(t);
  }

  SUBCASE("lambda = 0 recovers an exact linear map") {
    const RegressorModel m = train_regressor(x, y, 0.0);
    REQUIRE(m.feature_dim() == w.size());
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(m.weights[k] == doctest::Approx(w[k]).epsilon(1e-9));
    CHECK(m.weights.back() == doctest::Approx(bias).epsilon(1e-9));
  }
  SUBCASE("penalty shrinks weights but not the bias") {
    const RegressorModel m = train_regressor(x, y, 1e9);
    double mean_y = 0;
    for (double t : y) mean_y += t;
    mean_y /= static_cast<double>(y.size());
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(m.weights[k]) < 1e-5);
    double mean_pred = 0;
    for (const auto& f : x) mean_pred += regressor_raw(m, f);
    CHECK(mean_pred / static_cast<double>(x.size()) == doctest::Approx(mean_y).epsilon(1e-9));
  }
  SUBCASE("rank deficiency needs a penalty") {
    auto xd = x;
    for (auto& f : xd) f.values[3] = 2.0 * f.values[0];
    CHECK_THROWS_AS(train_regressor(xd, y, 0.0), FitFailure);
    CHECK_NOTHROW(train_regressor(xd, y, 1e-3));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(train_regressor(x, std::span(y.data(), 5), 0.0), InvalidArgument);
    CHECK_THROWS_AS(train_regressor(x, y, -1.0), InvalidArgument);
    CHECK_THROWS_AS(train_regressor(std::span(x.data(), 10), std::span(y.data(), 10), 0.0), InvalidArgument);
  }
  SUBCASE("predictions are clamped and rounded") {
    const RegressorModel m = train_regressor(x, y, 0.0);
    for (const auto& f : x) {
      const Prediction p = predict_regressor(m, f);
      CHECK(p.v_hat >= kPredictMin);
      CHECK(p.v_hat <= kPredictMax);
      const double raw = regressor_raw(m, f);
      CHECK(p.clamped == (raw < kPredictMin || raw > kPredictMax));
    }
    FeatureVector short_f;
    short_f.values = {1.0, 2.0};
    CHECK_THROWS_AS(predict_regressor(m, short_f), InvalidArgument);
  }
}

TEST_CASE("model JSON") {
  RegressorModel m;
  m.weights = {0.1, -0.2, 3.0};
  m.ridge_lambda = 0.5;
  const Json j = model_to_json(m);
  CHECK(j.dump().rfind("{\"weights\":", 0) == 0);
  const RegressorModel back = model_from_json(j);
  CHECK(back.weights == m.weights);
  CHECK(back.out_min == 13);
  CHECK(back.out_max == 58);
  const auto path = temp_path("model.json");
  save_model(path, m);
  CHECK(load_model(path).weights == m.weights);
  CHECK_THROWS_AS(model_from_json(parse_json(R"({"weights":[1,2]})", "m")), FormatError);
  CHECK_THROWS_AS(model_from_json(parse_json(R"({"weights":[1,2],"ridge_lambda":0,"out_min":58,"out_max":13})", "m")),
                  FormatError);
}

TEST_CASE("PNG round trip and decode errors") {
  const RgbImage img = noise_image(17, 9, 21);
  const auto path = temp_path("img.png");
  write_png(path, img);
  const RgbImage back = read_png(path);
  CHECK(back.width == 17);
  CHECK(back.height == 9);
  CHECK(back.pixels == img.pixels);

  CHECK_THROWS_AS(read_png(temp_path("missing.png")), ImageDecodeError);
  const auto junk = temp_path("junk.png");
  std::ofstream(junk) << "definitely not a png";
  CHECK_THROWS_AS(read_png(junk), ImageDecodeError);

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto truncated = temp_path("truncated.png");
  std::ofstream(truncated, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(read_png(truncated), ImageDecodeError);
}
