#include "prv/curvefit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "prv/rng.hpp"

namespace prv {
namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

using Params = Eigen::Vector4d;  // mu, sigma, scale, offset

FittedCurve to_curve(const Params& p) {
  FittedCurve c;
  c.mu = p[0];
  c.sigma = p[1];
  c.scale = p[2];
  c.offset = p[3];
  return c;
}

Params clamp_params(Params p, const CurveBounds& b) {
  p[1] = std::clamp(p[1], b.sigma_min, b.sigma_max);
  p[2] = std::clamp(p[2], b.scale_min, b.scale_max);
  return p;
}

double sse(const Params& p, std::span<const PsnrSample> s) {
  double acc = 0.0;
  for (const auto& x : s) {
    const double z = (std::log(static_cast<double>(x.v)) - p[0]) / p[1];
    const double r = x.psnr - (p[3] + p[2] * std_normal_cdf(z));
    acc += r * r;
  }
  return acc;
}

// Starting point derived from the data shape: offset at the lowest PSNR,
// scale spanning the observed range, median at the midpoint crossing.
Params initial_guess(std::span<const PsnrSample> samples) {
  double lo = samples.front().psnr;
  double hi = lo;
  std::map<int, std::pair<double, int>> by_v;
  for (const auto& s : samples) {
    lo = std::min(lo, s.psnr);
    hi = std::max(hi, s.psnr);
    auto& acc = by_v[s.v];
    acc.first += s.psnr;
    acc.second += 1;
  }
  const double mid = 0.5 * (lo + hi);
  std::vector<std::pair<double, double>> curve;
  for (const auto& [v, acc] : by_v) curve.emplace_back(v, acc.first / acc.second);

  double v_mid = std::sqrt(curve.front().first * curve.back().first);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto [va, ya] = curve[i];
    const auto [vb, yb] = curve[i + 1];
    if (ya < mid && yb >= mid) {
      v_mid = va + (mid - ya) / (yb - ya) * (vb - va);
      break;
    }
  }
  return Params(std::log(v_mid), 0.5, hi - lo, lo);
}

}  // namespace

double curve_eval(const FittedCurve& c, double v) {
  if (!(v > 0.0)) throw InvalidArgument("curve_eval: v must be positive");
  return c.offset + c.scale * std_normal_cdf((std::log(v) - c.mu) / c.sigma);
}

FittedCurve fit_curve(std::span<const PsnrSample> samples, const FitOptions& options) {
  if (samples.size() < 5) throw InvalidArgument("fit_curve: need at least 5 samples");
  std::vector<int> distinct;
  for (const auto& s : samples) {
    if (s.v < 1) throw InvalidArgument("fit_curve: sample with v < 1");
    if (!std::isfinite(s.psnr)) throw InvalidArgument("fit_curve: non-finite psnr");
    distinct.push_back(s.v);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4) throw InvalidArgument("fit_curve: need at least 4 distinct v values");

  const CurveBounds& bounds = options.bounds;
  const double n = static_cast<double>(samples.size());
  Params p = initial_guess(samples);

  if (!(p[2] > 0.0)) {
    // Flat data: park at the lower clamps; the curve reproduces the constant
    // to within scale_min / 2.
    FittedCurve c;
    c.sigma = bounds.sigma_min;
    c.scale = bounds.scale_min;
    c.mu = p[0];
    c.offset = p[3] - 0.5 * bounds.scale_min;
    c.degenerate = true;
    c.residual_rms = std::sqrt(sse(Params(c.mu, c.sigma, c.scale, c.offset), samples) / n);
    return c;
  }

  p = clamp_params(p, bounds);
  double cur = sse(p, samples);
  if (!std::isfinite(cur)) throw CurveFitFailure("fit_curve: initial residual not finite", to_curve(p));

  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iters; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (const auto& s : samples) {
      const double z = (std::log(static_cast<double>(s.v)) - p[0]) / p[1];
      const double pdf = std_normal_pdf(z);
      Eigen::Vector4d jac(-p[2] * pdf / p[1], -p[2] * pdf * z / p[1], std_normal_cdf(z), 1.0);
      const double r = s.psnr - (p[3] + p[2] * std_normal_cdf(z));
      jtj.noalias() += jac * jac.transpose();
      jtr.noalias() += jac * r;
    }

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix4d damped = jtj;
      for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector4d step = damped.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Params trial = clamp_params(p + step, bounds);
      const double next = sse(trial, samples);
      if (!std::isfinite(next)) {
        FittedCurve last = to_curve(p);
        last.residual_rms = std::sqrt(cur / n);
        last.iterations = it;
        throw CurveFitFailure("fit_curve: residual diverged", last);
      }
      if (next < cur) {
        const double rel = (cur - next) / cur;
        p = trial;
        cur = next;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        converged = rel < options.rel_tol;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || converged || cur == 0.0) break;
  }

  FittedCurve c = to_curve(p);
  c.iterations = std::min(it + 1, options.max_iters);
  c.residual_rms = std::sqrt(cur / n);
  constexpr double kPinned = 1e-12;
  c.degenerate = std::abs(c.sigma - bounds.sigma_min) < kPinned ||
                 std::abs(c.sigma - bounds.sigma_max) < kPinned ||
                 std::abs(c.scale - bounds.scale_min) < kPinned ||
                 std::abs(c.scale - bounds.scale_max) < kPinned;
  return c;
}

ViewCountLabel required_views(const FittedCurve& c, double alpha, int v_min, int v_max) {
  if (!(alpha > 0.0)) throw InvalidArgument("required_views: alpha must be positive");
  if (v_min < 1 || v_max < v_min) throw InvalidArgument("required_views: need 1 <= v_min <= v_max");
  const auto gain = [&](double u) { return curve_eval(c, u + 1.0) - curve_eval(c, u); };

  ViewCountLabel label;
  label.alpha = alpha;
  label.v_min = v_min;
  label.v_max = v_max;

  int last_big = v_min - 1;
  for (int u = v_min; u <= v_max; ++u) {
    if (!(gain(u) < alpha)) last_big = u;
  }
  bool saturated = last_big == v_max;
  if (!saturated) {
    // Gains past v_max peak at an integer within one step of the log-normal
    // mode (increments of a unimodal density are unimodal).
    const double first = static_cast<double>(v_max) + 1.0;
    const double mode = std::exp(c.mu - c.sigma * c.sigma);
    const double base = std::floor(mode);
    for (double u : {first, base - 1.0, base, base + 1.0}) {
      if (u >= first && std::isfinite(u) && !(gain(u) < alpha)) saturated = true;
    }
  }
  label.saturated = saturated;
  label.v_star = saturated ? v_max : last_big + 1;
  return label;
}

std::vector<int> default_sample_grid() {
  std::vector<int> grid;
  for (int v = 3; v <= 49; v += 2) grid.push_back(v);
  return grid;
}

std::vector<PsnrSample> synth_curve(const FittedCurve& params, double noise_sigma,
                                    std::span<const int> grid, std::uint64_t seed) {
  if (grid.empty()) throw InvalidArgument("synth_curve: empty grid");
  if (!(params.sigma > 0.0) || !(params.scale > 0.0)) {
    throw InvalidArgument("synth_curve: sigma and scale must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("synth_curve: noise_sigma must be >= 0");
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<PsnrSample> out;
  out.reserve(grid.size());
  for (int v : grid) {
    if (v < 1) throw InvalidArgument("synth_curve: grid values must be >= 1");
    double y = curve_eval(params, v);
    if (noise_sigma > 0.0) y += noise_sigma * noise(rng);
    out.push_back({v, y});
  }
  return out;
}

std::vector<PsnrSample> parse_samples_csv(std::string_view text, const std::string& source) {
  std::vector<PsnrSample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw FormatError(source + ": expected two columns", line_no, 1);
    const std::string a = trim(t.substr(0, comma));
    const std::string b = trim(t.substr(comma + 1));
    if (!header) {
      if (a != "v" || b != "psnr") throw FormatError(source + ": header must be 'v,psnr'", line_no, 1);
      header = true;
      continue;
    }
    try {
      std::size_t used_a = 0;
      std::size_t used_b = 0;
      const int v = std::stoi(a, &used_a);
      const double psnr = std::stod(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing");
      out.push_back({v, psnr});
    } catch (const std::logic_error&) {
      throw FormatError(source + ": cannot parse row '" + t + "'", line_no, 1);
    }
  }
  if (out.empty()) throw InvalidArgument(source + ": no samples");
  return out;
}

std::vector<PsnrSample> read_samples_csv(const std::filesystem::path& path) {
  return parse_samples_csv(read_text_file(path), path.string());
}

std::string samples_to_csv(std::span<const PsnrSample> samples) {
  std::string out = "v,psnr\n";
  for (const auto& s : samples) {
    out += std::to_string(s.v);
    out += ',';
    out += format_double(s.psnr);
    out += '\n';
  }
  return out;
}

Json label_to_json(const FittedCurve& c, const ViewCountLabel& label) {
  Json j;
  j["mu"] = c.mu;
  j["sigma"] = c.sigma;
  j["scale"] = c.scale;
  j["offset"] = c.offset;
  j["residual_rms"] = c.residual_rms;
  j["v_star"] = label.v_star;
  j["alpha"] = label.alpha;
  j["saturated"] = label.saturated;
  return j;
}

}  // namespace prv
