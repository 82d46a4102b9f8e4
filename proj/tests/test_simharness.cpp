#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "prv/errors.hpp"
#include "prv/simharness.hpp"

using namespace prv;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.objects = 4;
  c.trials_per_cell = 2;
  c.train_objects = 40;
  c.predictors = {PredictionSource::Oracle, PredictionSource::Mean, PredictionSource::Regressor};
  c.tammes.restarts = 2;
  c.tammes.iters = 300;
  return c;
}

Scene scene_for(std::span<const int> counts) {
  Scene s = make_scene(0.3, kCandidateGridSize, {});
  TammesOptions t;
  t.restarts = 2;
  t.iters = 300;
  ensure_tammes(s, counts, t);
  return s;
}

}  // namespace

TEST_CASE("gen_object is deterministic and in range") {
  const SyntheticObject a = gen_object(3, 99);
  const SyntheticObject b = gen_object(3, 99);
  CHECK(a.curve.mu == b.curve.mu);
  CHECK(a.curve.sigma == b.curve.sigma);
  CHECK(a.size == b.size);
  CHECK(a.label.v_star == b.label.v_star);
  CHECK(gen_object(3, 100).curve.mu != a.curve.mu);
  const SynthRanges r;
  for (const auto& o : gen_objects(500, 7)) {
    CHECK(o.size >= r.size_lo);
    CHECK(o.size <= r.size_hi);
    CHECK(o.curve.mu >= r.mu_lo);
    CHECK(o.curve.mu <= r.mu_hi);
    CHECK(o.label.v_star == required_views(o.curve, o.label.alpha, o.label.v_min, o.label.v_max).v_star);
  }
}

TEST_CASE("labels mostly land inside the prediction range") {
  int inside = 0;
  const auto objs = gen_objects(10000, 123);
  for (const auto& o : objs) inside += o.label.v_star >= kPredictMin && o.label.v_star <= kPredictMax && !o.label.saturated;
  CHECK(inside >= 9500);
}

TEST_CASE("rendered images are deterministic and follow complexity") {
  const std::vector<NamedView> views{NamedView::Top, NamedView::Left, NamedView::Front};
  SyntheticObject simple = gen_object(0, 1);
  SyntheticObject busy = simple;
  simple.complexity = 0.05;
  busy.complexity = 0.95;
  const auto a = render_initial_images(simple, views);
  CHECK(a.size() == 3);
  CHECK(a[0].pixels == render_initial_images(simple, views)[0].pixels);
  const FeatureVector fs = extract_features(a);
  const FeatureVector fb = extract_features(render_initial_images(busy, views));
  CHECK(fb.values[0] > fs.values[0]);  // entropy
  CHECK(fb.values[1] > fs.values[1]);  // edges
  CHECK(fb.values[2] > fs.values[2]);  // saturation
}

TEST_CASE("predictor plumbing") {
  const SyntheticObject o = gen_object(1, 5);
  CHECK(make_oracle_predictor()->predict(o).v_hat == o.label.v_star);
  const auto mean = make_statistic_predictor(PredictionSource::Mean, reference_dataset_stats());
  CHECK(mean->predict(o).v_hat == 35);
  CHECK_THROWS_AS(make_statistic_predictor(PredictionSource::Oracle, {}), InvalidArgument);
  CHECK(parse_prediction_source("median") == PredictionSource::Median);
  CHECK_THROWS_AS(parse_prediction_source("psychic"), InvalidArgument);

  const std::vector<NamedView> views{NamedView::Top, NamedView::Left, NamedView::Front};
  const auto train = gen_objects(60, 77);
  const RegressorModel model = train_on_objects(train, views, 1e-3);
  const auto reg = make_regressor_predictor(model, views);
  const Prediction p = reg->predict(o);
  CHECK(p.v_hat >= kPredictMin);
  CHECK(p.v_hat <= kPredictMax);
  CHECK(reg->predict(o).v_hat_real == p.v_hat_real);
}

TEST_CASE("quality model rules") {
  FittedCurve c;
  c.mu = 3.0;
  c.sigma = 0.5;
  c.scale = 8.0;
  c.offset = 20.0;
  const int counts[] = {12};
  const Scene s = scene_for(counts);
  const ViewSpace& t12 = s.tammes.at(12);
  const double ref = min_pairwise_angle(t12);
  CHECK(quality_model(c, t12.directions(), ref) == curve_eval(c, 12));

  auto dup = t12.directions();
  dup[1] = dup[0];
  CHECK(coverage_ratio(dup, ref) == doctest::Approx(kCoincidentAngle / ref));
  CHECK(quality_model(c, dup, ref) == curve_eval(c, 1.0));

  const std::vector<Vec3> single{{0, 0, 1}};
  CHECK(quality_model(c, single, kNoPairAngle) == curve_eval(c, 1.0));
  CHECK_THROWS_AS(quality_model(c, std::span<const Vec3>{}, ref), InvalidArgument);
}

TEST_CASE("strategies") {
  const SyntheticObject o = gen_object(2, 8);
  const int n = o.label.v_star;
  const int counts[] = {n};
  const Scene s = scene_for(counts);
  const Prediction p = predict_oracle(o.label);

  const TrialReport t = run_strategy(o, Strategy::PrvTammes, p, s, 1);
  CHECK(t.n_views == n);
  CHECK(t.movement_cost > 0.0);
  CHECK(t.achieved_psnr == curve_eval(o.curve, n));
  CHECK((t.visited.front() - Vec3(0, 0, 0.3)).norm() < 1e-12);

  const TrialReport u1 = run_strategy(o, Strategy::PrvUniform, p, s, 1);
  const TrialReport u2 = run_strategy(o, Strategy::PrvUniform, p, s, 1);
  CHECK(u1.movement_cost == u2.movement_cost);
  CHECK(u1.achieved_psnr <= t.achieved_psnr);
  CHECK(run_strategy(o, Strategy::PrvUniform, p, s, 2).movement_cost != u1.movement_cost);

  const TrialReport nbv = run_strategy(o, Strategy::NbvProxy, p, s, 1);
  CHECK(nbv.n_views == n);
  CHECK(nbv.visited.size() == static_cast<std::size_t>(n) + 1);
  CHECK(t.movement_cost < nbv.movement_cost);

  // Optimal order over the NBV-visited set never loses to the NBV traversal.
  ViewSpace visited_set;
  visited_set.radius = 0.3;
  for (std::size_t i = 1; i < nbv.visited.size(); ++i) visited_set.poses.push_back(look_at_pose(nbv.visited[i], Vec3::Zero()));
  const GlobalPlan g = plan_global_path(visited_set, look_at_pose(Vec3(0, 0, 0.3), Vec3::Zero()),
                                        object_obstacle(Vec3::Zero(), o.size));
  CHECK(g.plan.total_length <= nbv.movement_cost + 1e-12);

  Prediction zero = p;
  zero.v_hat = 0;
  CHECK_THROWS_AS(run_strategy(o, Strategy::PrvTammes, zero, s, 1), InvalidArgument);
  CHECK(parse_strategy("nbv_proxy") == Strategy::NbvProxy);
  CHECK_THROWS_AS(parse_strategy("greedy"), InvalidArgument);
}

TEST_CASE("nbv sequence avoids initial views and repeats") {
  const Scene s = make_scene(0.3, 540, {});
  const auto seq = nbv_proxy_sequence(s, 30);
  CHECK(seq.size() == 30);
  std::set<int> unique(seq.begin(), seq.end());
  CHECK(unique.size() == 30);
  CHECK_FALSE(unique.contains(0));  // zenith coincides with the top initial view
  CHECK(nbv_proxy_sequence(s, 30) == seq);
}

TEST_CASE("monotone budget for PrvTammes") {
  const SyntheticObject o = gen_object(4, 4);
  const std::vector<int> counts{13, 14, 15, 16, 17, 18};
  const Scene s = scene_for(counts);
  double prev = -1e9;
  for (int n : counts) {
    Prediction p;
    p.v_hat = n;
    const double q = run_strategy(o, Strategy::PrvTammes, p, s, 1).achieved_psnr;
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("identical predictions give identical plans") {
  const SyntheticObject o = gen_object(5, 6);
  const int counts[] = {35};
  const Scene s = scene_for(counts);
  Prediction a;
  a.v_hat = 35;
  a.source = PredictionSource::Mean;
  Prediction b = a;
  b.source = PredictionSource::Regressor;
  for (Strategy st : {Strategy::PrvTammes, Strategy::PrvUniform, Strategy::NbvProxy}) {
    const auto ra = run_strategy(o, st, a, s, 9);
    const auto rb = run_strategy(o, st, b, s, 9);
    CHECK(ra.visited == rb.visited);
    CHECK(ra.movement_cost == rb.movement_cost);
  }
}

TEST_CASE("config JSON") {
  const ExperimentConfig c = small_config();
  const Json j = config_to_json(c);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_from_json(parse_json(R"({"objects": 7})", "c")).objects == 7);
  CHECK_THROWS_AS(config_from_json(parse_json(R"({"objectz": 7})", "c")), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(parse_json(R"({"strategies": ["teleport"]})", "c")), InvalidArgument);
  ExperimentConfig bad = c;
  bad.trials_per_cell = 0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = c;
  bad.grid_size = 20;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = c;
  bad.train_objects = 3;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("compare: accounting, self-difference and determinism") {
  const ExperimentConfig c = small_config();
  const ComparisonTable par = compare(c, Execution::Parallel);
  const ComparisonTable ser = compare(c, Execution::Serial);
  CHECK(par.rows.size() == c.strategies.size() * c.predictors.size());
  CHECK(par.trials.size() ==
        static_cast<std::size_t>(c.objects * c.trials_per_cell) * c.strategies.size() * c.predictors.size());
  CHECK(comparison_to_csv(par) == comparison_to_csv(ser));
  CHECK(trials_to_jsonl(par, false) == trials_to_jsonl(ser, false));
  CHECK(psnr_vs_movement_csv(par) == psnr_vs_movement_csv(ser));
  for (const auto& r : par.rows) {
    if (r.predictor == PredictionSource::Oracle) {
      CHECK(r.abs_view_error_mean == 0.0);
      CHECK(r.psnr_diff_mean == 0.0);
      CHECK(r.movement_diff_mean == 0.0);
    }
    CHECK_FALSE(r.planning_time_mean.has_value());
  }
  const std::string csv = comparison_to_csv(par);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(par.rows.size()) + 1);
  CHECK(trials_to_jsonl(par, false).find("\"planning_time_s\":null") != std::string::npos);
}

TEST_CASE("run_experiment writes outputs and a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "prv_test_experiment";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = small_config();
  c.objects = 2;
  c.trials_per_cell = 1;
  run_experiment(c, dir);
  for (const char* f : {"comparison.csv", "comparison.json", "trials.jsonl", "psnr_vs_movement.csv", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const Json m = load_json_file(dir / "manifest.json");
  CHECK(m["status"] == "complete");
  const Json cmp = load_json_file(dir / "comparison.json");
  CHECK(cmp["label_distribution"].contains("median"));

  const auto bad_dir = std::filesystem::temp_directory_path() / "prv_test_experiment_bad";
  std::filesystem::remove_all(bad_dir);
  ExperimentConfig bad = c;
  bad.tammes_table = bad_dir / "missing_table.json";
  CHECK_THROWS(run_experiment(bad, bad_dir));
  const Json bm = load_json_file(bad_dir / "manifest.json");
  CHECK(bm["status"] == "partial");
  CHECK(bm.contains("error"));
}
