#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prv/curvefit.hpp"
#include "prv/errors.hpp"

using namespace prv;

namespace {

FittedCurve random_curve(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FittedCurve c;
  c.mu = 2.2 + 0.8 * u(rng);
  c.sigma = 0.35 + 0.2 * u(rng);
  c.scale = 5.0 + 5.0 * u(rng);
  c.offset = 15.0 + 10.0 * u(rng);
  return c;
}

// Past the mode the per-view gain decreases; the label is one past the last
// integer where it is still >= alpha. Root of gain(u) = alpha found by bisection.
int bisection_label(const FittedCurve& c, double alpha, int v_min) {
  const auto g = [&](double u) { return oracle::lognormal_curve(c, u + 1) - oracle::lognormal_curve(c, u) - alpha; };
  double lo = std::exp(c.mu - c.sigma * c.sigma);
  double hi = 1e4;
  if (g(lo) < 0) return v_min;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0 ? lo : hi) = mid;
  }
  return std::max(v_min, static_cast<int>(std::floor(lo)) + 1);
}

}  // namespace

TEST_CASE("curve_eval") {
  FittedCurve c;
  c.mu = std::log(20.0);
  c.sigma = 0.5;
  c.scale = 8.0;
  c.offset = 20.0;
  CHECK(curve_eval(c, 20.0) == doctest::Approx(24.0));
  CHECK(curve_eval(c, 1e9) == doctest::Approx(28.0));
  CHECK(curve_eval(c, 1e-9) == doctest::Approx(20.0));
  CHECK_THROWS_AS(curve_eval(c, 0.0), InvalidArgument);
  CHECK_THROWS_AS(curve_eval(c, -1.0), InvalidArgument);
}

TEST_CASE("noiseless fit recovers the parameters") {
  std::mt19937_64 rng(3);
  const auto grid = default_sample_grid();
  for (int k = 0; k < 25; ++k) {
    const FittedCurve truth = random_curve(rng);
    const auto samples = synth_curve(truth, 0.0, grid, 1);
    const FittedCurve fit = fit_curve(samples);
    CHECK(fit.mu == doctest::Approx(truth.mu).epsilon(1e-6));
    CHECK(fit.sigma == doctest::Approx(truth.sigma).epsilon(1e-6));
    CHECK(fit.scale == doctest::Approx(truth.scale).epsilon(1e-6));
    CHECK(fit.offset == doctest::Approx(truth.offset).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-6);
    CHECK_FALSE(fit.degenerate);
  }
}

TEST_CASE("noisy fit stays close") {
  std::mt19937_64 rng(5);
  const auto grid = default_sample_grid();
  const FittedCurve truth = random_curve(rng);
  const FittedCurve fit = fit_curve(synth_curve(truth, 0.15, grid, 17));
  CHECK(fit.residual_rms < 0.3);
  CHECK(std::abs(curve_eval(fit, 30) - curve_eval(truth, 30)) < 0.3);
}

TEST_CASE("fit input validation") {
  std::vector<PsnrSample> few{{3, 20}, {5, 21}, {7, 22}, {9, 23}};
  CHECK_THROWS_AS(fit_curve(few), InvalidArgument);
  std::vector<PsnrSample> repeated{{3, 20}, {3, 20.1}, {5, 21}, {5, 21.1}, {7, 22}};
  CHECK_THROWS_AS(fit_curve(repeated), InvalidArgument);
  std::vector<PsnrSample> nan{{3, 20}, {5, NAN}, {7, 22}, {9, 23}, {11, 24}};
  CHECK_THROWS_AS(fit_curve(nan), InvalidArgument);
}

TEST_CASE("flat data is flagged degenerate") {
  std::vector<PsnrSample> flat;
  for (int v : default_sample_grid()) flat.push_back({v, 25.0});
  const FittedCurve fit = fit_curve(flat);
  CHECK(fit.degenerate);
  CHECK(std::abs(curve_eval(fit, 20) - 25.0) < 1e-2);
  const auto label = required_views(fit, 0.02);
  CHECK(label.v_star == kDefaultLabelMin);
}

TEST_CASE("required_views matches the integer-scan oracle") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const FittedCurve c = random_curve(rng);
    for (double alpha : {0.005, 0.02, 0.1}) {
      const auto got = required_views(c, alpha, 3, 58);
      const auto want = oracle::scan_label(c, alpha, 3, 58);
      CHECK(got.v_star == want.v_star);
      CHECK(got.saturated == want.saturated);
      if (!want.saturated) CHECK(got.v_star == bisection_label(c, alpha, 3));
    }
  }
}

TEST_CASE("required_views edge cases") {
  FittedCurve c;
  c.mu = 3.0;
  c.sigma = 0.5;
  c.scale = 8.0;
  c.offset = 20.0;
  SUBCASE("alpha above the scale returns v_min") { CHECK(required_views(c, 9.0, 3, 58).v_star == 3); }
  SUBCASE("tight alpha saturates") {
    const auto l = required_views(c, 1e-6, 3, 58);
    CHECK(l.saturated);
    CHECK(l.v_star == 58);
  }
  SUBCASE("offset shift leaves the label unchanged") {
    FittedCurve d = c;
    d.offset += 7.5;
    CHECK(required_views(c).v_star == required_views(d).v_star);
  }
  CHECK_THROWS_AS(required_views(c, 0.0), InvalidArgument);
  CHECK_THROWS_AS(required_views(c, 0.02, 10, 5), InvalidArgument);
}

TEST_CASE("alpha monotonicity") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> a(0.001, 0.2);
  for (int k = 0; k < 300; ++k) {
    const FittedCurve c = random_curve(rng);
    double a1 = a(rng), a2 = a(rng);
    if (a1 > a2) std::swap(a1, a2);
    CHECK(required_views(c, a1).v_star >= required_views(c, a2).v_star);
  }
}

TEST_CASE("samples CSV") {
  const auto s = parse_samples_csv("v,psnr\n3,20.5\n5, 21.25\n\n7,22\n");
  REQUIRE(s.size() == 3);
  CHECK(s[1].v == 5);
  CHECK(s[1].psnr == 21.25);
  const auto back = parse_samples_csv(samples_to_csv(s));
  CHECK(back.size() == 3);
  CHECK(back[2].psnr == 22.0);

  CHECK_THROWS_AS(parse_samples_csv(""), InvalidArgument);
  CHECK_THROWS_AS(parse_samples_csv("v,psnr\n"), InvalidArgument);
  try {
    parse_samples_csv("v,psnr\n3,20\n5,abc\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_samples_csv("views,db\n3,20\n"), FormatError);
}

TEST_CASE("label JSON") {
  FittedCurve c;
  c.mu = 3.0;
  c.sigma = 0.5;
  c.scale = 8.0;
  c.offset = 20.0;
  const auto j = label_to_json(c, required_views(c));
  const std::string text = j.dump();
  CHECK(text.rfind("{\"mu\":", 0) == 0);
  for (const char* key : {"mu", "sigma", "scale", "offset", "residual_rms", "v_star", "alpha", "saturated"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("synth_curve determinism") {
  FittedCurve c;
  c.mu = 3.0;
  c.sigma = 0.5;
  c.scale = 8.0;
  c.offset = 20.0;
  const auto grid = default_sample_grid();
  CHECK(grid.size() == 24);
  CHECK(grid.front() == 3);
  CHECK(grid.back() == 49);
  const auto a = synth_curve(c, 0.15, grid, 99);
  const auto b = synth_curve(c, 0.15, grid, 99);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].psnr == b[i].psnr);
}
