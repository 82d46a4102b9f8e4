#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prv/curvefit.hpp"
#include "prv/errors.hpp"
#include "prv/image.hpp"
#include "prv/io.hpp"
#include "prv/pathplan.hpp"
#include "prv/predictor.hpp"
#include "prv/rng.hpp"
#include "prv/simharness.hpp"
#include "prv/viewspace.hpp"
#include "prv/viewspace_io.hpp"

namespace fs = std::filesystem;
using namespace prv;

namespace {

enum Exit { kOk = 0, kUsage = 2, kFit = 3, kDecode = 4, kRuntime = 5 };

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Values from a --config JSON file fill options that were not given on the command line.
class ConfigMerge {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, target, help)->capture_default_str();
    setters_[name] = {opt, [&target, name](const Json& v) {
                        try {
                          target = v.get<T>();
                        } catch (const Json::exception&) {
                          throw InvalidArgument("config: wrong type for '" + name + "'");
                        }
                      }};
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
    CLI::Option* opt = app->add_flag("--" + name, target, help);
    setters_[name] = {opt, [&target, name](const Json& v) {
                        if (!v.is_boolean()) throw InvalidArgument("config: '" + name + "' must be a boolean");
                        target = v.get<bool>();
                      }};
    return opt;
  }

  void apply(const fs::path& file) const {
    const Json j = load_json_file(file);
    if (!j.is_object()) throw InvalidArgument(file.string() + ": config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      const auto it = setters_.find(key);
      if (it == setters_.end()) throw InvalidArgument(file.string() + ": unknown config key '" + key + "'");
      if (it->second.first->count() == 0) it->second.second(value);
    }
  }

 private:
  std::map<std::string, std::pair<CLI::Option*, std::function<void(const Json&)>>> setters_;
};

fs::path output_dir() {
  const char* env = std::getenv("PRV_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

fs::path resolve_out(const std::string& given, const std::string& fallback) {
  return given.empty() ? output_dir() / fallback : fs::path(given);
}

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string brief(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double degrees(double rad) { return rad * 180.0 / 3.14159265358979323846; }

// ---- tammes ----------------------------------------------------------------------

struct TammesArgs {
  int n = 0;
  std::string table;
  double radius = 0.3;
  std::uint64_t seed = TammesOptions{}.seed;
  int restarts = TammesOptions{}.restarts;
  int iters = TammesOptions{}.iters;
  std::string out;
  std::string config;
};

int run_tammes(const TammesArgs& a) {
  TammesOptions opts;
  opts.seed = a.seed;
  opts.restarts = a.restarts;
  opts.iters = a.iters;
  if (opts.restarts < 1 || opts.iters < 1) throw InvalidArgument("--restarts and --iters must be >= 1");
  if (!a.table.empty()) {
    const auto dots = a.table.find("..");
    int lo = 0, hi = 0;
    try {
      if (dots == std::string::npos) throw std::invalid_argument("range");
      lo = std::stoi(a.table.substr(0, dots));
      hi = std::stoi(a.table.substr(dots + 2));
    } catch (const std::logic_error&) {
      throw InvalidArgument("--table expects LO..HI, e.g. 13..58");
    }
    if (lo < 1 || hi < lo) throw InvalidArgument("--table needs 1 <= LO <= HI");
    const TammesTable table = build_tammes_table(lo, hi, a.radius, opts);
    const fs::path out = resolve_out(a.out, "tammes_table.json");
    save_table(out, table);
    std::cout << "entries=" << table.entries.size() << " radius=" << brief(a.radius) << " out=" << out.string()
              << "\n";
    for (const auto& [n, vs] : table.entries) {
      if (n >= 2) std::cout << "n=" << n << " min_angle_deg=" << fixed(degrees(min_pairwise_angle(vs))) << "\n";
    }
    return kOk;
  }
  if (a.n < 1) throw InvalidArgument("--n must be >= 1 (or use --table LO..HI)");
  const ViewSpace vs = tammes_hemisphere(a.n, a.radius, opts);
  const fs::path out = resolve_out(a.out, "tammes_" + std::to_string(a.n) + ".json");
  save_viewspace(out, vs);
  std::cout << "n=" << a.n << " radius=" << brief(a.radius);
  if (a.n >= 2) std::cout << " min_angle_deg=" << fixed(degrees(min_pairwise_angle(vs)));
  std::cout << " out=" << out.string() << "\n";
  return kOk;
}

// ---- label -----------------------------------------------------------------------

struct LabelArgs {
  std::string samples;
  double alpha = kDefaultAlpha;
  int vmin = kDefaultLabelMin;
  int vmax = kDefaultLabelMax;
  std::string out;
  std::string config;
};

int run_label(const LabelArgs& a) {
  if (!(a.alpha > 0.0)) throw InvalidArgument("--alpha must be > 0");
  const auto samples = read_samples_csv(a.samples);
  FittedCurve curve;
  try {
    curve = fit_curve(samples);
  } catch (const CurveFitFailure& e) {
    const auto& last = e.last_valid();
    std::cerr << "fit failed: " << e.what() << "\n  last iterate: mu=" << format_double(last.mu)
              << " sigma=" << format_double(last.sigma) << " scale=" << format_double(last.scale)
              << " offset=" << format_double(last.offset) << " rms=" << format_double(last.residual_rms) << "\n";
    throw;
  }
  const ViewCountLabel label = required_views(curve, a.alpha, a.vmin, a.vmax);
  const fs::path out = resolve_out(a.out, "label.json");
  write_text_file(out, label_to_json(curve, label).dump(2) + "\n");
  std::cout << "v_star=" << label.v_star << (label.saturated ? " (saturated)" : "")
            << " rms=" << fixed(curve.residual_rms) << " out=" << out.string() << "\n";
  if (curve.degenerate) std::cerr << "warning: degenerate fit (flat data or a parameter at its bound)\n";
  return kOk;
}

// ---- synth -----------------------------------------------------------------------

struct SynthArgs {
  int id = 0;
  std::uint64_t seed = 1;
  double noise = 0.15;
  double alpha = kDefaultAlpha;
  std::vector<std::string> views{"top", "left", "front"};
  int width = RenderConfig{}.width;
  int height = RenderConfig{}.height;
  std::string out_dir;
  std::string config;
};

int run_synth(const SynthArgs& a) {
  if (a.id < 0) throw InvalidArgument("--id must be >= 0");
  if (!(a.noise >= 0.0)) throw InvalidArgument("--noise must be >= 0");
  std::vector<NamedView> views;
  for (const auto& v : a.views) views.push_back(parse_named_view(v));
  const SyntheticObject obj = gen_object(a.id, derive_seed(a.seed, static_cast<std::uint64_t>(a.id)), {}, a.alpha);
  const fs::path dir = a.out_dir.empty() ? output_dir() : fs::path(a.out_dir);
  const auto grid = default_sample_grid();
  write_text_file(dir / "samples.csv", samples_to_csv(synth_curve(obj.curve, a.noise, grid, derive_seed(obj.seed, 9))));
  Json j;
  j["id"] = obj.id;
  j["complexity"] = obj.complexity;
  j["size_m"] = obj.size;
  j["curve"] = {{"mu", obj.curve.mu}, {"sigma", obj.curve.sigma}, {"scale", obj.curve.scale},
                {"offset", obj.curve.offset}};
  j["v_star"] = obj.label.v_star;
  j["alpha"] = obj.label.alpha;
  write_text_file(dir / "object.json", j.dump(2) + "\n");
  const auto images = render_initial_images(obj, views, {a.width, a.height});
  for (std::size_t i = 0; i < views.size(); ++i) {
    write_png(dir / (std::string(to_string(views[i])) + ".png"), images[i]);
  }
  std::cout << "id=" << obj.id << " v_star=" << obj.label.v_star << " out_dir=" << dir.string() << "\n";
  return kOk;
}

// ---- train -----------------------------------------------------------------------

struct TrainArgs {
  int objects = 300;
  std::uint64_t seed = 11;
  double lambda = 1e-3;
  double alpha = kDefaultAlpha;
  std::vector<std::string> views{"top", "left", "front"};
  int width = RenderConfig{}.width;
  int height = RenderConfig{}.height;
  int out_min = kPredictMin;
  int out_max = kPredictMax;
  std::string out;
  std::string config;
};

int run_train(const TrainArgs& a) {
  std::vector<NamedView> views;
  for (const auto& v : a.views) views.push_back(parse_named_view(v));
  if (a.objects < static_cast<int>(kFeatureDim) + 1) throw InvalidArgument("--objects must be >= 11");
  const auto objs = gen_objects(a.objects, a.seed, {}, a.alpha);
  RegressorModel model = train_on_objects(objs, views, a.lambda, {a.width, a.height});
  model.out_min = a.out_min;
  model.out_max = a.out_max;
  if (!(model.out_min < model.out_max)) throw InvalidArgument("--out-min must be < --out-max");
  double mae = 0.0;
  const auto pred = make_regressor_predictor(model, views, {a.width, a.height});
  for (const auto& o : objs) mae += std::abs(pred->predict(o).v_hat - o.label.v_star);
  mae /= static_cast<double>(objs.size());
  const fs::path out = resolve_out(a.out, "model.json");
  save_model(out, model);
  std::cout << "objects=" << objs.size() << " train_mae=" << fixed(mae, 4) << " out=" << out.string() << "\n";
  return kOk;
}

// ---- predict ---------------------------------------------------------------------

struct PredictArgs {
  std::vector<std::string> images;
  std::string model;
  std::string statistic;
  std::string labels;
  std::string out;
  std::string config;
};

std::vector<int> read_labels(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.find_first_of("0123456789") == std::string::npos) continue;  // header
    const std::string cell = line.substr(line.rfind(',') == std::string::npos ? 0 : line.rfind(',') + 1);
    try {
      labels.push_back(std::stoi(cell));
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ": expected an integer label", line_no, 1);
    }
  }
  if (labels.empty()) throw InvalidArgument(path.string() + ": no labels");
  return labels;
}

int run_predict(const PredictArgs& a) {
  Prediction p;
  if (!a.statistic.empty()) {
    if (!a.model.empty()) throw InvalidArgument("use either --model or --statistic");
    const PredictionSource kind = parse_prediction_source(a.statistic);
    const DatasetStats stats = a.labels.empty() ? reference_dataset_stats() : compute_dataset_stats(read_labels(a.labels));
    p = predict_statistic(kind, stats);
  } else {
    if (a.model.empty()) throw InvalidArgument("--model or --statistic is required");
    if (a.images.empty()) throw InvalidArgument("at least one image is required with --model");
    const RegressorModel model = load_model(a.model);
    std::vector<RgbImage> images;
    for (const auto& path : a.images) images.push_back(read_png(path));
    if (images.size() == 1) std::cerr << "warning: single image; variance features are zero\n";
    p = predict_regressor(model, extract_features(images));
  }
  const fs::path out = resolve_out(a.out, "prediction.json");
  write_text_file(out, prediction_to_json(p).dump(2) + "\n");
  std::cout << "v_hat=" << p.v_hat << " v_hat_real=" << fixed(p.v_hat_real, 4) << " source=" << to_string(p.source)
            << (p.clamped ? " (clamped)" : "") << "\n";
  return kOk;
}

// ---- plan ------------------------------------------------------------------------

struct PlanArgs {
  std::string viewspace;
  std::string costs;
  std::string start = "top";
  std::string solver = "auto";
  int cap = kExactCap;
  std::uint64_t seed = HeuristicOptions{}.seed;
  int restarts = HeuristicOptions{}.restarts;
  double object_size = 0.1;
  bool timing = false;
  std::string out;
  std::string config;
};

int run_plan(const PlanArgs& a) {
  if (a.viewspace.empty() == a.costs.empty()) throw InvalidArgument("give exactly one of VIEWSPACE or --costs");
  if (a.solver != "auto" && a.solver != "exact" && a.solver != "heuristic") {
    throw InvalidArgument("--solver must be auto, exact or heuristic");
  }
  if (a.cap < 1) throw InvalidArgument("--cap must be >= 1");
  PlanOptions opts;
  opts.exact_cap = a.solver == "heuristic" ? 0 : a.cap;
  opts.heuristic.seed = a.seed;
  opts.heuristic.restarts = a.restarts;

  PathPlan plan;
  double seconds = 0.0;
  if (!a.costs.empty()) {
    const CostMatrix m = parse_cost_matrix_csv(read_text_file(a.costs), a.costs);
    int start = 0;
    if (a.start != "top") {
      try {
        start = std::stoi(a.start);
      } catch (const std::logic_error&) {
        throw InvalidArgument("--start must be an index for cost matrices");
      }
    }
    if (a.solver == "exact" && m.size() > a.cap) {
      throw TooLarge(std::to_string(m.size()) + " nodes exceeds --cap " + std::to_string(a.cap));
    }
    const auto t0 = std::chrono::steady_clock::now();
    plan = m.size() <= opts.exact_cap ? hamiltonian_path_exact(m, start, opts.exact_cap)
                                      : hamiltonian_path_heuristic(m, start, opts.heuristic);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    const ViewSpace vs = load_viewspace(a.viewspace);
    ViewPose start_pose;
    if (a.start == "top") {
      start_pose = look_at_pose(vs.center + vs.radius * Vec3::UnitZ(), vs.center);
    } else {
      int idx = -1;
      try {
        idx = std::stoi(a.start);
      } catch (const std::logic_error&) {
        throw InvalidArgument("--start must be 'top' or a pose index");
      }
      if (idx < 0 || idx >= static_cast<int>(vs.size())) throw InvalidArgument("--start index out of range");
      start_pose = vs.poses[static_cast<std::size_t>(idx)];
    }
    const ObstacleSphere obstacle = object_obstacle(vs.center, a.object_size);
    const GlobalPlan g = plan_global_path(vs, start_pose, obstacle, opts);
    if (a.solver == "exact" && g.plan.solver != Solver::Exact) {
      throw TooLarge(std::to_string(g.views.size()) + " nodes exceeds --cap " + std::to_string(a.cap));
    }
    plan = g.plan;
    seconds = g.planning_time_s;
  }
  const fs::path out = resolve_out(a.out, "path.json");
  write_text_file(out, path_to_json(plan, a.timing ? std::optional<double>(seconds) : std::nullopt).dump(2) + "\n");
  std::cout << "n=" << plan.order.size() << " solver=" << to_string(plan.solver)
            << " total_length_m=" << fixed(plan.total_length);
  if (a.timing) std::cout << " planning_time_s=" << fixed(seconds);
  std::cout << " out=" << out.string() << "\n";
  return kOk;
}

// ---- simulate --------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  int trials = 0;
  int objects = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> predictors;
  std::string table;
  bool timing = false;
};

int run_simulate(const SimulateArgs& a, const CLI::App& sub) {
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = config_from_json(load_json_file(a.config));
  if (sub.count("--trials")) cfg.trials_per_cell = a.trials;
  if (sub.count("--objects")) cfg.objects = a.objects;
  if (sub.count("--seed")) cfg.object_seed = a.seed;
  if (sub.count("--predictors")) {
    cfg.predictors.clear();
    for (const auto& p : a.predictors) cfg.predictors.push_back(parse_prediction_source(p));
  }
  if (sub.count("--table")) cfg.tammes_table = a.table;
  if (a.timing) cfg.record_timing = true;
  validate(cfg);
  const fs::path dir = a.out_dir.empty() ? output_dir() : fs::path(a.out_dir);
  try {
    run_experiment(cfg, dir);
  } catch (const std::exception& e) {
    throw RuntimeFailure(std::string("simulation failed: ") + e.what() + " (see " + (dir / "manifest.json").string() +
                         ")");
  }
  std::cout << "objects=" << cfg.objects << " trials_per_cell=" << cfg.trials_per_cell << " out_dir=" << dir.string()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"View planning toolkit: Tammes view spaces, view-count labels and predictors, global paths."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  TammesArgs ta;
  ConfigMerge tm;
  auto* tammes = app.add_subcommand("tammes", "Generate a Tammes view space on the upper hemisphere");
  tm.add(tammes, "n", ta.n, "Number of views (>= 1)");
  tm.add(tammes, "table", ta.table, "Build a lookup table for LO..HI instead of a single space");
  tm.add(tammes, "radius", ta.radius, "View-sphere radius in meters");
  tm.add(tammes, "seed", ta.seed, "Solver seed");
  tm.add(tammes, "restarts", ta.restarts, "Independent solver restarts");
  tm.add(tammes, "iters", ta.iters, "Iterations per restart");
  tm.add(tammes, "out", ta.out, "Output file (default $PRV_OUTPUT_DIR/tammes_<n>.json or tammes_table.json)");
  tammes->add_option("--config", ta.config, "JSON object of option values; explicit flags win");

  LabelArgs la;
  ConfigMerge lm;
  auto* label = app.add_subcommand("label", "Fit a PSNR curve and extract the required number of views");
  label->add_option("samples", la.samples, "CSV with header v,psnr")->required();
  lm.add(label, "alpha", la.alpha, "Per-view PSNR gain threshold in dB");
  lm.add(label, "vmin", la.vmin, "Smallest admissible view count");
  lm.add(label, "vmax", la.vmax, "Largest admissible view count");
  lm.add(label, "out", la.out, "Output JSON (default $PRV_OUTPUT_DIR/label.json)");
  label->add_option("--config", la.config, "JSON object of option values; explicit flags win");

  SynthArgs sa;
  ConfigMerge sm;
  auto* synth = app.add_subcommand("synth", "Write a synthetic object: samples.csv, object.json and initial-view PNGs");
  sm.add(synth, "id", sa.id, "Object id");
  sm.add(synth, "seed", sa.seed, "Base object seed");
  sm.add(synth, "noise", sa.noise, "Gaussian PSNR noise in dB");
  sm.add(synth, "alpha", sa.alpha, "Label threshold in dB");
  sm.add(synth, "views", sa.views, "Initial views to render");
  sm.add(synth, "width", sa.width, "Image width");
  sm.add(synth, "height", sa.height, "Image height");
  sm.add(synth, "out-dir", sa.out_dir, "Output directory (default $PRV_OUTPUT_DIR or .)");
  synth->add_option("--config", sa.config, "JSON object of option values; explicit flags win");

  TrainArgs tr;
  ConfigMerge trm;
  auto* train = app.add_subcommand("train", "Train the ridge view-count regressor on synthetic objects");
  trm.add(train, "objects", tr.objects, "Number of training objects");
  trm.add(train, "seed", tr.seed, "Base object seed");
  trm.add(train, "lambda", tr.lambda, "Ridge penalty (0 = ordinary least squares)");
  trm.add(train, "alpha", tr.alpha, "Label threshold in dB");
  trm.add(train, "views", tr.views, "Initial views rendered per object");
  trm.add(train, "width", tr.width, "Image width");
  trm.add(train, "height", tr.height, "Image height");
  trm.add(train, "out-min", tr.out_min, "Lower clamp of predictions");
  trm.add(train, "out-max", tr.out_max, "Upper clamp of predictions");
  trm.add(train, "out", tr.out, "Output model JSON (default $PRV_OUTPUT_DIR/model.json)");
  train->add_option("--config", tr.config, "JSON object of option values; explicit flags win");

  PredictArgs pa;
  ConfigMerge pm;
  auto* predict = app.add_subcommand("predict", "Predict the required number of views");
  predict->add_option("images", pa.images, "PNG images of the initial views");
  pm.add(predict, "model", pa.model, "Regressor model JSON");
  pm.add(predict, "statistic", pa.statistic, "Constant predictor: mode, median or mean");
  pm.add(predict, "labels", pa.labels, "Label file for --statistic (default: reference mode 32, median 34, mean 35)");
  pm.add(predict, "out", pa.out, "Output JSON (default $PRV_OUTPUT_DIR/prediction.json)");
  predict->add_option("--config", pa.config, "JSON object of option values; explicit flags win");

  PlanArgs pl;
  ConfigMerge plm;
  auto* plan = app.add_subcommand("plan", "Plan the shortest visiting path over a view space");
  plan->add_option("viewspace", pl.viewspace, "View-space JSON");
  plm.add(plan, "costs", pl.costs, "Cost-matrix CSV (size line, then rows) instead of a view space");
  plm.add(plan, "start", pl.start, "Start view: 'top' (index 0 for --costs) or an index");
  plm.add(plan, "solver", pl.solver, "auto, exact or heuristic");
  plm.add(plan, "cap", pl.cap, "Largest instance solved exactly");
  plm.add(plan, "seed", pl.seed, "Heuristic seed");
  plm.add(plan, "restarts", pl.restarts, "Heuristic restarts");
  plm.add(plan, "object-size", pl.object_size, "Object extent in meters; obstacle radius = size/2 + 0.02");
  plm.flag(plan, "timing", pl.timing, "Record planning time (otherwise null, keeping output reproducible)");
  plm.add(plan, "out", pl.out, "Output path JSON (default $PRV_OUTPUT_DIR/path.json)");
  plan->add_option("--config", pl.config, "JSON object of option values; explicit flags win");

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Run the strategy comparison on synthetic objects");
  simulate->add_option("--config", si.config, "Experiment config JSON; explicit flags win");
  simulate->add_option("--out-dir", si.out_dir, "Output directory (default $PRV_OUTPUT_DIR or .)");
  simulate->add_option("--trials", si.trials, "Trials per cell (default 5)");
  simulate->add_option("--objects", si.objects, "Number of evaluated objects (default 50)");
  simulate->add_option("--seed", si.seed, "Object seed (default 1)");
  simulate->add_option("--predictors", si.predictors, "Any of oracle, mode, median, mean, regressor (default regressor)");
  simulate->add_option("--table", si.table, "Precomputed Tammes table JSON");
  simulate->add_flag("--timing", si.timing, "Record planning times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*tammes) {
      if (!ta.config.empty()) tm.apply(ta.config);
      return run_tammes(ta);
    }
    if (*label) {
      if (!la.config.empty()) lm.apply(la.config);
      return run_label(la);
    }
    if (*synth) {
      if (!sa.config.empty()) sm.apply(sa.config);
      return run_synth(sa);
    }
    if (*train) {
      if (!tr.config.empty()) trm.apply(tr.config);
      return run_train(tr);
    }
    if (*predict) {
      if (!pa.config.empty()) pm.apply(pa.config);
      return run_predict(pa);
    }
    if (*plan) {
      if (!pl.config.empty()) plm.apply(pl.config);
      return run_plan(pl);
    }
    if (*simulate) return run_simulate(si, *simulate);
  } catch (const ImageDecodeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDecode;
  } catch (const FitFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFit;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
