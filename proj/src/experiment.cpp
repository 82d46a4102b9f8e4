#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <set>

#include <omp.h>

#include "prv/errors.hpp"
#include "prv/rng.hpp"
#include "prv/simharness.hpp"

namespace prv {
namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; zero for a single value.
MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

int get_int(const Json& v, const char* key) {
  if (!v.is_number_integer()) throw InvalidArgument(std::string("config: '") + key + "' must be an integer");
  return v.get<int>();
}

double get_number(const Json& v, const char* key) {
  if (!v.is_number()) throw InvalidArgument(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t get_seed(const Json& v, const char* key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InvalidArgument(std::string("config: '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<std::string> get_strings(const Json& v, const char* key) {
  if (!v.is_array()) throw InvalidArgument(std::string("config: '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InvalidArgument(std::string("config: '") + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void read_range(const Json& j, const char* key, double& lo, double& hi) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidArgument(std::string("config: ranges.") + key + " must be [lo, hi]");
  }
  lo = j[0].get<double>();
  hi = j[1].get<double>();
}

Json range_json(double lo, double hi) { return Json::array({lo, hi}); }

std::uint64_t trial_seed_for(std::uint64_t base, int object_id, Strategy s, int trial) {
  return derive_seed(derive_seed(derive_seed(base, static_cast<std::uint64_t>(object_id)),
                                 static_cast<std::uint64_t>(s)),
                     static_cast<std::uint64_t>(trial));
}

constexpr std::uint64_t kTrainStream = 0x747261696eULL;

}  // namespace

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "objects") c.objects = get_int(v, "objects");
    else if (key == "object_seed") c.object_seed = get_seed(v, "object_seed");
    else if (key == "trial_seed") c.trial_seed = get_seed(v, "trial_seed");
    else if (key == "trials_per_cell") c.trials_per_cell = get_int(v, "trials_per_cell");
    else if (key == "strategies") {
      c.strategies.clear();
      for (const auto& s : get_strings(v, "strategies")) c.strategies.push_back(parse_strategy(s));
    } else if (key == "predictors") {
      c.predictors.clear();
      for (const auto& s : get_strings(v, "predictors")) c.predictors.push_back(parse_prediction_source(s));
    } else if (key == "alpha") c.alpha = get_number(v, "alpha");
    else if (key == "radius") c.radius = get_number(v, "radius");
    else if (key == "label_range") {
      if (!v.is_array() || v.size() != 2) throw InvalidArgument("config: label_range must be [lo, hi]");
      c.label_min = get_int(v[0], "label_range");
      c.label_max = get_int(v[1], "label_range");
    } else if (key == "view_range") {
      if (!v.is_array() || v.size() != 2) throw InvalidArgument("config: view_range must be [lo, hi]");
      c.predict_min = get_int(v[0], "view_range");
      c.predict_max = get_int(v[1], "view_range");
    } else if (key == "candidate_grid") c.grid_size = get_int(v, "candidate_grid");
    else if (key == "initial_views") {
      c.initial_views.selection.clear();
      for (const auto& s : get_strings(v, "initial_views")) c.initial_views.selection.push_back(parse_named_view(s));
    } else if (key == "train_objects") c.train_objects = get_int(v, "train_objects");
    else if (key == "ridge_lambda") c.ridge_lambda = get_number(v, "ridge_lambda");
    else if (key == "statistics") {
      if (!v.is_string() || (v != "training" && v != "reference")) {
        throw InvalidArgument("config: statistics must be \"training\" or \"reference\"");
      }
      c.reference_statistics = v == "reference";
    } else if (key == "exact_cap") c.exact_cap = get_int(v, "exact_cap");
    else if (key == "tammes") {
      if (!v.is_object()) throw InvalidArgument("config: tammes must be an object");
      for (const auto& [k, t] : v.items()) {
        if (k == "seed") c.tammes.seed = get_seed(t, "tammes.seed");
        else if (k == "restarts") c.tammes.restarts = get_int(t, "tammes.restarts");
        else if (k == "iters") c.tammes.iters = get_int(t, "tammes.iters");
        else throw InvalidArgument("config: unknown key tammes." + k);
      }
    } else if (key == "tammes_table") {
      if (v.is_null()) c.tammes_table.reset();
      else if (v.is_string()) c.tammes_table = v.get<std::string>();
      else throw InvalidArgument("config: tammes_table must be a path or null");
    } else if (key == "ranges") {
      if (!v.is_object()) throw InvalidArgument("config: ranges must be an object");
      for (const auto& [k, r] : v.items()) {
        if (k == "mu") read_range(r, "mu", c.ranges.mu_lo, c.ranges.mu_hi);
        else if (k == "sigma") read_range(r, "sigma", c.ranges.sigma_lo, c.ranges.sigma_hi);
        else if (k == "scale") read_range(r, "scale", c.ranges.scale_lo, c.ranges.scale_hi);
        else if (k == "offset") read_range(r, "offset", c.ranges.offset_lo, c.ranges.offset_hi);
        else if (k == "size") read_range(r, "size", c.ranges.size_lo, c.ranges.size_hi);
        else throw InvalidArgument("config: unknown key ranges." + k);
      }
    } else if (key == "image_size") {
      if (!v.is_array() || v.size() != 2) throw InvalidArgument("config: image_size must be [width, height]");
      c.render.width = get_int(v[0], "image_size");
      c.render.height = get_int(v[1], "image_size");
    } else if (key == "record_timing") {
      if (!v.is_boolean()) throw InvalidArgument("config: record_timing must be a boolean");
      c.record_timing = v.get<bool>();
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto need = [](bool ok, const char* msg) {
    if (!ok) throw InvalidArgument(std::string("config: ") + msg);
  };
  need(c.objects >= 1, "objects must be >= 1");
  need(c.trials_per_cell >= 1, "trials_per_cell must be >= 1");
  need(!c.strategies.empty(), "strategies must not be empty");
  need(!c.predictors.empty(), "predictors must not be empty");
  need(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha must be > 0");
  need(c.radius > 0.0 && std::isfinite(c.radius), "radius must be > 0");
  need(c.label_min >= 1 && c.label_min < c.label_max, "label_range must satisfy 1 <= lo < hi");
  need(c.predict_min >= 1 && c.predict_min < c.predict_max, "view_range must satisfy 1 <= lo < hi");
  need(c.grid_size >= std::max(c.predict_max, c.label_max) + 1, "candidate_grid must exceed the largest view count");
  need(!c.initial_views.selection.empty(), "initial_views must not be empty");
  need(c.ridge_lambda >= 0.0, "ridge_lambda must be >= 0");
  need(c.exact_cap >= 1 && c.exact_cap <= 24, "exact_cap must be in [1, 24]");
  need(c.tammes.restarts >= 1 && c.tammes.iters >= 1, "tammes restarts and iters must be >= 1");
  need(c.ranges.mu_lo <= c.ranges.mu_hi && c.ranges.sigma_lo <= c.ranges.sigma_hi &&
           c.ranges.scale_lo <= c.ranges.scale_hi && c.ranges.offset_lo <= c.ranges.offset_hi &&
           c.ranges.size_lo <= c.ranges.size_hi,
       "every range needs lo <= hi");
  need(c.ranges.sigma_lo > 0.0 && c.ranges.scale_lo > 0.0 && c.ranges.size_lo >= 0.0,
       "sigma and scale must be positive");
  need(0.5 * c.ranges.size_hi + kObstacleClearance < c.radius, "objects must fit inside the view sphere");
  const bool needs_training =
      std::any_of(c.predictors.begin(), c.predictors.end(), [&](PredictionSource p) {
        return p == PredictionSource::Regressor ||
               (!c.reference_statistics && p != PredictionSource::Oracle);
      });
  if (needs_training) {
    need(c.train_objects >= static_cast<int>(kFeatureDim) + 1, "train_objects must be >= 11");
  }
  // Rejected here rather than inside a worker thread.
  (void)initial_views(Vec3::Zero(), c.radius, c.initial_views);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["objects"] = c.objects;
  j["object_seed"] = c.object_seed;
  j["trial_seed"] = c.trial_seed;
  j["trials_per_cell"] = c.trials_per_cell;
  Json strategies = Json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  j["strategies"] = strategies;
  Json predictors = Json::array();
  for (auto p : c.predictors) predictors.push_back(std::string(to_string(p)));
  j["predictors"] = predictors;
  j["alpha"] = c.alpha;
  j["radius"] = c.radius;
  j["label_range"] = Json::array({c.label_min, c.label_max});
  j["view_range"] = Json::array({c.predict_min, c.predict_max});
  j["candidate_grid"] = c.grid_size;
  Json views = Json::array();
  for (auto v : c.initial_views.selection) views.push_back(std::string(to_string(v)));
  j["initial_views"] = views;
  j["train_objects"] = c.train_objects;
  j["ridge_lambda"] = c.ridge_lambda;
  j["statistics"] = c.reference_statistics ? "reference" : "training";
  j["exact_cap"] = c.exact_cap;
  j["tammes"] = {{"seed", c.tammes.seed}, {"restarts", c.tammes.restarts}, {"iters", c.tammes.iters}};
  if (c.tammes_table) j["tammes_table"] = c.tammes_table->string();
  else j["tammes_table"] = nullptr;
  j["ranges"] = {{"mu", range_json(c.ranges.mu_lo, c.ranges.mu_hi)},
                 {"sigma", range_json(c.ranges.sigma_lo, c.ranges.sigma_hi)},
                 {"scale", range_json(c.ranges.scale_lo, c.ranges.scale_hi)},
                 {"offset", range_json(c.ranges.offset_lo, c.ranges.offset_hi)},
                 {"size", range_json(c.ranges.size_lo, c.ranges.size_hi)}};
  j["image_size"] = Json::array({c.render.width, c.render.height});
  j["record_timing"] = c.record_timing;
  return j;
}

ComparisonTable compare(const ExperimentConfig& config, Execution execution) {
  validate(config);
  ComparisonTable table;

  const auto objects = gen_objects(config.objects, config.object_seed, config.ranges, config.alpha,
                                   config.label_min, config.label_max);
  for (const auto& o : objects) table.eval_labels.push_back(o.label.v_star);

  // Oracle runs are the reference for the difference columns even when not reported.
  std::vector<PredictionSource> run_predictors = config.predictors;
  if (std::find(run_predictors.begin(), run_predictors.end(), PredictionSource::Oracle) == run_predictors.end()) {
    run_predictors.push_back(PredictionSource::Oracle);
  }

  std::vector<SyntheticObject> train;
  const bool needs_training = std::any_of(run_predictors.begin(), run_predictors.end(), [&](PredictionSource p) {
    return p == PredictionSource::Regressor || (!config.reference_statistics && p != PredictionSource::Oracle);
  });
  if (needs_training) {
    train = gen_objects(config.train_objects, derive_seed(config.object_seed, kTrainStream), config.ranges,
                        config.alpha, config.label_min, config.label_max);
  }
  if (config.reference_statistics) {
    table.statistics = reference_dataset_stats();
  } else if (!train.empty()) {
    std::vector<int> labels;
    for (const auto& o : train) labels.push_back(o.label.v_star);
    table.statistics = compute_dataset_stats(labels);
  }

  std::map<PredictionSource, std::unique_ptr<Predictor>> predictors;
  for (auto p : run_predictors) {
    if (p == PredictionSource::Oracle) {
      predictors[p] = make_oracle_predictor();
    } else if (p == PredictionSource::Regressor) {
      RegressorModel model =
          train_on_objects(train, config.initial_views.selection, config.ridge_lambda, config.render);
      model.out_min = config.predict_min;
      model.out_max = config.predict_max;
      predictors[p] = make_regressor_predictor(std::move(model), config.initial_views.selection, config.render);
    } else {
      predictors[p] = make_statistic_predictor(p, table.statistics);
    }
  }

  // predictions[p][object]
  std::map<PredictionSource, std::vector<Prediction>> predictions;
  std::set<int> counts;
  for (auto p : run_predictors) {
    auto& out = predictions[p];
    out.resize(objects.size());
    const int count = static_cast<int>(objects.size());
    std::vector<std::exception_ptr> errors(objects.size());
    const Predictor& pred = *predictors.at(p);
    const auto one = [&](int i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        out[k] = pred.predict(objects[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 2)
      for (int i = 0; i < count; ++i) one(i);
    } else {
      for (int i = 0; i < count; ++i) one(i);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const auto& pr : out) counts.insert(pr.v_hat);
  }

  PlanOptions plan;
  plan.exact_cap = config.exact_cap;
  plan.execution = Execution::Serial;  // trials already run in parallel
  Scene scene = make_scene(config.radius, config.grid_size, config.initial_views, plan);
  std::optional<TammesTable> loaded;
  if (config.tammes_table) loaded = load_table(*config.tammes_table);
  const std::vector<int> count_list(counts.begin(), counts.end());
  TammesOptions topts = config.tammes;
  topts.execution = execution;
  ensure_tammes(scene, count_list, topts, loaded ? &*loaded : nullptr);

  // Flattened cells in (object, strategy, predictor, trial) order.
  const std::size_t ns = config.strategies.size();
  const std::size_t np = run_predictors.size();
  const std::size_t nt = static_cast<std::size_t>(config.trials_per_cell);
  const std::size_t cells = objects.size() * ns * np * nt;
  std::vector<TrialReport> reports(cells);
  std::vector<std::exception_ptr> errors(cells);
  const auto run_cell = [&](std::size_t c) {
    const std::size_t t = c % nt;
    const std::size_t p = (c / nt) % np;
    const std::size_t s = (c / (nt * np)) % ns;
    const std::size_t o = c / (nt * np * ns);
    try {
      const Strategy strategy = config.strategies[s];
      const PredictionSource source = run_predictors[p];
      reports[c] = run_strategy(objects[o], strategy, predictions.at(source)[o], scene,
                                trial_seed_for(config.trial_seed, objects[o].id, strategy, static_cast<int>(t)));
      reports[c].trial = static_cast<int>(t);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const auto total = static_cast<std::ptrdiff_t>(cells);
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < total; ++c) run_cell(static_cast<std::size_t>(c));
  } else {
    for (std::ptrdiff_t c = 0; c < total; ++c) run_cell(static_cast<std::size_t>(c));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t oracle_p = static_cast<std::size_t>(
      std::find(run_predictors.begin(), run_predictors.end(), PredictionSource::Oracle) - run_predictors.begin());
  const auto cell_index = [&](std::size_t o, std::size_t s, std::size_t p, std::size_t t) {
    return ((o * ns + s) * np + p) * nt + t;
  };

  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t p = 0; p < config.predictors.size(); ++p) {
      std::vector<double> views, psnr, movement, timing, abs_err, psnr_diff, move_diff;
      for (std::size_t o = 0; o < objects.size(); ++o) {
        for (std::size_t t = 0; t < nt; ++t) {
          const TrialReport& r = reports[cell_index(o, s, p, t)];
          const TrialReport& ref = reports[cell_index(o, s, oracle_p, t)];
          views.push_back(r.n_views);
          psnr.push_back(r.achieved_psnr);
          movement.push_back(r.movement_cost);
          timing.push_back(r.planning_time_s);
          abs_err.push_back(std::abs(r.n_views - r.v_star));
          psnr_diff.push_back(std::abs(r.achieved_psnr - ref.achieved_psnr));
          move_diff.push_back(std::abs(r.movement_cost - ref.movement_cost));
        }
      }
      ComparisonRow row;
      row.strategy = config.strategies[s];
      row.predictor = config.predictors[p];
      row.trials = static_cast<int>(views.size());
      const auto v = mean_std(views), q = mean_std(psnr), m = mean_std(movement);
      row.n_views_mean = v.mean;
      row.n_views_std = v.std;
      row.psnr_mean = q.mean;
      row.psnr_std = q.std;
      row.movement_mean = m.mean;
      row.movement_std = m.std;
      if (config.record_timing) {
        const auto tm = mean_std(timing);
        row.planning_time_mean = tm.mean;
        row.planning_time_std = tm.std;
      }
      row.abs_view_error_mean = mean_std(abs_err).mean;
      row.psnr_diff_mean = mean_std(psnr_diff).mean;
      row.movement_diff_mean = mean_std(move_diff).mean;
      table.rows.push_back(row);
    }
  }

  // Reported trials only, in (object, strategy, predictor, trial) order.
  for (std::size_t o = 0; o < objects.size(); ++o) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t p = 0; p < config.predictors.size(); ++p) {
        for (std::size_t t = 0; t < nt; ++t) table.trials.push_back(std::move(reports[cell_index(o, s, p, t)]));
      }
    }
  }
  return table;
}

std::string comparison_to_csv(const ComparisonTable& t) {
  std::string out =
      "strategy,predictor,trials,n_views_mean,n_views_std,psnr_mean,psnr_std,movement_mean_m,movement_std_m,"
      "planning_time_mean_s,planning_time_std_s,abs_view_error_mean,psnr_diff_mean,movement_diff_mean_m\n";
  const auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  for (const auto& r : t.rows) {
    out += std::string(to_string(r.strategy)) + "," + std::string(to_string(r.predictor)) + "," +
           std::to_string(r.trials) + "," + format_double(r.n_views_mean) + "," + format_double(r.n_views_std) +
           "," + format_double(r.psnr_mean) + "," + format_double(r.psnr_std) + "," +
           format_double(r.movement_mean) + "," + format_double(r.movement_std) + "," +
           opt(r.planning_time_mean) + "," + opt(r.planning_time_std) + "," +
           format_double(r.abs_view_error_mean) + "," + format_double(r.psnr_diff_mean) + "," +
           format_double(r.movement_diff_mean) + "\n";
  }
  return out;
}

Json comparison_to_json(const ComparisonTable& t, const ExperimentConfig& config) {
  Json j;
  j["config"] = config_to_json(config);
  j["statistics"] = {{"mode", t.statistics.mode}, {"median", t.statistics.median}, {"mean", t.statistics.mean}};
  const DatasetStats eval = compute_dataset_stats(t.eval_labels);
  std::map<int, int> hist;
  for (int v : t.eval_labels) ++hist[v];
  Json h = Json::object();
  for (const auto& [v, c] : hist) h[std::to_string(v)] = c;
  j["label_distribution"] = {{"count", t.eval_labels.size()},
                             {"mode", eval.mode},
                             {"median", eval.median},
                             {"mean", eval.mean},
                             {"histogram", h}};
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row;
    row["strategy"] = std::string(to_string(r.strategy));
    row["predictor"] = std::string(to_string(r.predictor));
    row["trials"] = r.trials;
    row["n_views"] = {{"mean", r.n_views_mean}, {"std", r.n_views_std}};
    row["psnr_db"] = {{"mean", r.psnr_mean}, {"std", r.psnr_std}};
    row["movement_m"] = {{"mean", r.movement_mean}, {"std", r.movement_std}};
    if (r.planning_time_mean) {
      row["planning_time_s"] = {{"mean", *r.planning_time_mean}, {"std", *r.planning_time_std}};
    } else {
      row["planning_time_s"] = nullptr;
    }
    row["abs_view_error_mean"] = r.abs_view_error_mean;
    row["psnr_diff_mean_db"] = r.psnr_diff_mean;
    row["movement_diff_mean_m"] = r.movement_diff_mean;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Json trial_to_json(const TrialReport& r, bool with_timing) {
  Json j;
  j["object"] = r.object_id;
  j["strategy"] = std::string(to_string(r.strategy));
  j["predictor"] = std::string(to_string(r.predictor));
  j["trial"] = r.trial;
  j["v_star"] = r.v_star;
  j["n_views"] = r.n_views;
  j["achieved_psnr_db"] = r.achieved_psnr;
  j["movement_cost_m"] = r.movement_cost;
  if (with_timing) j["planning_time_s"] = r.planning_time_s;
  else j["planning_time_s"] = nullptr;
  j["solver"] = std::string(to_string(r.solver));
  return j;
}

std::string trials_to_jsonl(const ComparisonTable& t, bool with_timing) {
  std::string out;
  for (const auto& r : t.trials) out += trial_to_json(r, with_timing).dump() + "\n";
  return out;
}

std::string psnr_vs_movement_csv(const ComparisonTable& t) {
  std::string out = "strategy,predictor,object,trial,movement_m,psnr_db\n";
  for (const auto& r : t.trials) {
    out += std::string(to_string(r.strategy)) + "," + std::string(to_string(r.predictor)) + "," +
           std::to_string(r.object_id) + "," + std::to_string(r.trial) + "," + format_double(r.movement_cost) +
           "," + format_double(r.achieved_psnr) + "\n";
  }
  return out;
}

void run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::vector<std::string> written;
  const auto manifest = [&](const std::string& status, const std::string& error) {
    Json m;
    m["status"] = status;
    m["files"] = written;
    if (!error.empty()) m["error"] = error;
    write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
  };
  const auto emit = [&](const char* name, const std::string& text) {
    write_text_file(out_dir / name, text);
    written.emplace_back(name);
  };
  try {
    const ComparisonTable t = compare(config);
    emit("comparison.csv", comparison_to_csv(t));
    emit("comparison.json", comparison_to_json(t, config).dump(2) + "\n");
    emit("trials.jsonl", trials_to_jsonl(t, config.record_timing));
    emit("psnr_vs_movement.csv", psnr_vs_movement_csv(t));
  } catch (const std::exception& e) {
    try {
      manifest("partial", e.what());
    } catch (...) {
    }
    throw;
  }
  manifest("complete", "");
}

}  // namespace prv
