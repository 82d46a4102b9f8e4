#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <unordered_map>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/predictor.hpp"

namespace prv {
namespace {

double luminance(const std::uint8_t* p) {
  return (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
}

std::uint32_t pack(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 16) | (static_cast<std::uint32_t>(p[1]) << 8) | p[2];
}

double histogram_entropy(const RgbImage& img, int bits) {
  const int shift = 8 - bits;
  std::vector<std::uint32_t> hist(std::size_t{1} << (3 * bits), 0);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = &img.pixels[3 * i];
    const std::size_t bin = (static_cast<std::size_t>(p[0] >> shift) << (2 * bits)) |
                            (static_cast<std::size_t>(p[1] >> shift) << bits) |
                            static_cast<std::size_t>(p[2] >> shift);
    ++hist[bin];
  }
  double h = 0.0;
  const double total = static_cast<double>(n);
  for (std::uint32_t c : hist) {
    if (c == 0) continue;
    const double q = c / total;
    h -= q * std::log(q);
  }
  return h;
}

// Fraction of pixels whose Sobel magnitude (edge-replicated borders)
// exceeds `fraction` of the image maximum.
double edge_density(const RgbImage& img, const std::vector<double>& lum, double fraction) {
  const int w = img.width;
  const int h = img.height;
  const auto L = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return lum[static_cast<std::size_t>(y) * w + x];
  };
  std::vector<double> mag(lum.size());
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (L(x + 1, y - 1) + 2.0 * L(x + 1, y) + L(x + 1, y + 1)) -
                        (L(x - 1, y - 1) + 2.0 * L(x - 1, y) + L(x - 1, y + 1));
      const double gy = (L(x - 1, y + 1) + 2.0 * L(x, y + 1) + L(x + 1, y + 1)) -
                        (L(x - 1, y - 1) + 2.0 * L(x, y - 1) + L(x + 1, y - 1));
      const double m = std::sqrt(gx * gx + gy * gy);
      mag[static_cast<std::size_t>(y) * w + x] = m;
      max_mag = std::max(max_mag, m);
    }
  }
  if (!(max_mag > 0.0)) return 0.0;
  const double threshold = fraction * max_mag;
  std::size_t count = 0;
  for (double m : mag) count += m > threshold ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(mag.size());
}

// Most frequent border color; ties go to the smallest packed RGB value.
std::uint32_t dominant_border_color(const RgbImage& img) {
  std::unordered_map<std::uint32_t, std::size_t> counts;
  const auto visit = [&](int x, int y) { ++counts[pack(img.at(x, y))]; };
  for (int x = 0; x < img.width; ++x) {
    visit(x, 0);
    if (img.height > 1) visit(x, img.height - 1);
  }
  for (int y = 1; y + 1 < img.height; ++y) {
    visit(0, y);
    if (img.width > 1) visit(img.width - 1, y);
  }
  std::uint32_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [color, count] : counts) {
    if (count > best_count || (count == best_count && color < best)) {
      best = color;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

ImageFeatures image_features(const RgbImage& image, const FeatureConfig& config) {
  if (image.empty()) throw InvalidArgument("image_features: zero-size image");
  if (image.pixels.size() != 3 * image.pixel_count()) {
    throw InvalidArgument("image_features: pixel buffer does not match dimensions");
  }
  if (config.histogram_bits < 1 || config.histogram_bits > 8) {
    throw InvalidArgument("image_features: histogram_bits must be in [1, 8]");
  }
  const std::size_t n = image.pixel_count();
  std::vector<double> lum(n);
  double sat_sum = 0.0;
  double lum_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = &image.pixels[3 * i];
    lum[i] = luminance(p);
    lum_sum += lum[i];
    const int mx = std::max({p[0], p[1], p[2]});
    const int mn = std::min({p[0], p[1], p[2]});
    sat_sum += mx == 0 ? 0.0 : static_cast<double>(mx - mn) / mx;
  }
  const double lum_mean = lum_sum / static_cast<double>(n);
  double lum_var = 0.0;
  for (double l : lum) lum_var += (l - lum_mean) * (l - lum_mean);
  lum_var /= static_cast<double>(n);

  const std::uint32_t border = dominant_border_color(image);
  const int br = static_cast<int>((border >> 16) & 0xff);
  const int bg = static_cast<int>((border >> 8) & 0xff);
  const int bb = static_cast<int>(border & 0xff);
  const double tol = config.border_tolerance * 255.0;
  std::size_t fg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = &image.pixels[3 * i];
    if (std::abs(p[0] - br) > tol || std::abs(p[1] - bg) > tol || std::abs(p[2] - bb) > tol) ++fg;
  }

  ImageFeatures f{};
  f[0] = histogram_entropy(image, config.histogram_bits);
  f[1] = edge_density(image, lum, config.edge_fraction);
  f[2] = sat_sum / static_cast<double>(n);
  f[3] = static_cast<double>(fg) / static_cast<double>(n);
  f[4] = lum_var / 0.25;
  return f;
}

FeatureVector aggregate_features(std::span<const ImageFeatures> per_image) {
  if (per_image.empty()) throw InvalidArgument("aggregate_features: no images");
  FeatureVector out;
  out.values.assign(kFeatureDim, 0.0);
  std::vector<double> column(per_image.size());
  const double count = static_cast<double>(per_image.size());
  for (std::size_t k = 0; k < kImageFeatureCount; ++k) {
    for (std::size_t i = 0; i < per_image.size(); ++i) column[i] = per_image[i][k];
    std::sort(column.begin(), column.end());
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : column) var += (v - mean) * (v - mean);
    out.values[k] = mean;
    out.values[kImageFeatureCount + k] = var / count;
  }
  return out;
}

FeatureVector extract_features(std::span<const RgbImage> images, const FeatureConfig& config,
                               Execution execution) {
  if (images.empty()) throw InvalidArgument("extract_features: no images");
  std::vector<ImageFeatures> per_image(images.size());
  const int count = static_cast<int>(images.size());
  if (execution == Execution::Parallel) {
    // Exceptions must not escape the parallel region.
    std::vector<std::exception_ptr> errors(images.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) {
      try {
        per_image[static_cast<std::size_t>(i)] = image_features(images[static_cast<std::size_t>(i)], config);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (int i = 0; i < count; ++i) {
      per_image[static_cast<std::size_t>(i)] = image_features(images[static_cast<std::size_t>(i)], config);
    }
  }
  return aggregate_features(per_image);
}

}  // namespace prv
