// Batch CLI for the AFT gradient-boosting engine: data generation, training,
// prediction, evaluation and hyperparameter search.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aftboost/datagen.hpp"
#include "aftboost/eval.hpp"
#include "aftboost/tree.hpp"
#include "aftboost/tuning.hpp"

namespace {

using namespace aftboost;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct TrainOptions {
  std::string dist = "normal";
  double sigma = 1.0;
  BoostingParams boost;
};

void add_train_options(CLI::App* cmd, TrainOptions* opts) {
  cmd->add_option("--aft-loss-distribution", opts->dist,
                  "Z distribution: normal, logistic or extreme")
      ->default_val("normal");
  cmd->add_option("--aft-loss-distribution-scale", opts->sigma,
                  "scale parameter sigma")
      ->default_val(1.0);
  cmd->add_option("--learning-rate", opts->boost.learning_rate)->default_val(0.1);
  cmd->add_option("--max-depth", opts->boost.max_depth)->default_val(6);
  cmd->add_option("--min-child-weight", opts->boost.min_child_weight)
      ->default_val(1.0);
  cmd->add_option("--reg-alpha", opts->boost.reg_alpha)->default_val(0.001);
  cmd->add_option("--reg-lambda", opts->boost.reg_lambda)->default_val(1.0);
  cmd->add_option("--num-rounds", opts->boost.num_rounds)->default_val(100);
  cmd->add_option("--max-bins", opts->boost.max_bins)->default_val(256);
  cmd->add_option("--seed", opts->boost.seed)->default_val(0);
  cmd->add_option("--threads", opts->boost.threads)->default_val(1);
}

AftParams make_aft(const TrainOptions& opts) {
  AftParams aft;
  aft.dist = distribution_from_name(opts.dist);
  aft.sigma = opts.sigma;
  if (!(aft.sigma > 0.0)) {
    throw std::invalid_argument("aft-loss-distribution-scale must be > 0");
  }
  return aft;
}

std::string assignment_string(const ParamAssignment& a) {
  std::string out;
  for (const auto& [k, v] : a.values) {
    out += (out.empty() ? "" : ";") + k + "=" + format_double(v);
  }
  for (const auto& [k, v] : a.categorical) {
    out += (out.empty() ? "" : ";") + k + "=" + v;
  }
  return out;
}

std::vector<double> predict_margins(const Model& model, const Dataset& data) {
  std::vector<double> margins(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    margins[i] = model.predict_margin(data.row(i), data.num_features());
  }
  return margins;
}

int run(int argc, char** argv) {
  CLI::App app{"Gradient-boosted AFT survival regression"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic censored dataset");
  std::string gen_recipe = "simulated.sin";
  GeneratorSpec gen_spec;
  std::string gen_out;
  gen->add_option("--recipe", gen_recipe,
                  "simulated.{sin,abs,linear,model.1,model.2,model.3}, coxph, aft")
      ->required();
  gen->add_option("--rows", gen_spec.n_rows)->default_val(200);
  gen->add_option("--censor-fraction", gen_spec.censor_fraction,
                  "target censored fraction (right-censored recipes)");
  gen->add_option("--seed", gen_spec.seed)->default_val(0);
  gen->add_option("--out", gen_out)->required();

  // train
  auto* tr = app.add_subcommand("train", "fit a model on a CSV dataset");
  std::string tr_data, tr_valid, tr_model_out, tr_log_out;
  TrainOptions tr_opts;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--valid", tr_valid, "optional validation CSV");
  tr->add_option("--model-out", tr_model_out)->required();
  tr->add_option("--log-out", tr_log_out, "per-round aft-nloglik log CSV");
  add_train_options(tr, &tr_opts);

  // predict
  auto* pr = app.add_subcommand("predict", "write predictions for a dataset");
  std::string pr_model, pr_data, pr_out;
  bool pr_margin = false;
  pr->add_option("--model", pr_model)->required();
  pr->add_option("--data", pr_data)->required();
  pr->add_option("--out", pr_out)->required();
  pr->add_flag("--margin", pr_margin, "emit log-margin instead of survival time");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "compute metrics for a dataset");
  std::string ev_model, ev_data, ev_pred, ev_metrics = "aft-nloglik", ev_out;
  double ev_tau_pct = 80.0;
  bool ev_pred_margin = false;
  TrainOptions ev_opts;
  ev->add_option("--model", ev_model);
  ev->add_option("--predictions", ev_pred, "single-column prediction CSV");
  ev->add_flag("--predictions-are-margins", ev_pred_margin);
  ev->add_option("--data", ev_data)->required();
  ev->add_option("--metrics", ev_metrics,
                 "comma list of interval-accuracy, aft-nloglik, uno-c, harrell-c");
  ev->add_option("--tau-percentile", ev_tau_pct)->default_val(80.0);
  ev->add_option("--out", ev_out, "report path (default: stdout)");
  ev->add_option("--aft-loss-distribution", ev_opts.dist)->default_val("normal");
  ev->add_option("--aft-loss-distribution-scale", ev_opts.sigma)->default_val(1.0);

  // tune
  auto* tu = app.add_subcommand("tune", "hyperparameter search with inner CV");
  std::string tu_data, tu_mode = "random", tu_metric = "interval-accuracy";
  std::string tu_space_path, tu_log_out, tu_best_out;
  std::vector<std::string> tu_vary;
  int tu_trials = 100, tu_inner = 5, tu_budget = 500, tu_threads = 1;
  std::uint64_t tu_seed = 0;
  tu->add_option("--data", tu_data)->required();
  tu->add_option("--mode", tu_mode, "grid or random")->default_val("random");
  tu->add_option("--trials", tu_trials)->default_val(100);
  tu->add_option("--vary", tu_vary, "hyperparameter names for grid mode");
  tu->add_option("--space", tu_space_path, "search space JSON");
  tu->add_option("--metric", tu_metric)->default_val("interval-accuracy");
  tu->add_option("--inner-folds", tu_inner)->default_val(5);
  tu->add_option("--round-budget", tu_budget)->default_val(500);
  tu->add_option("--seed", tu_seed)->default_val(0);
  tu->add_option("--threads", tu_threads)->default_val(1);
  tu->add_option("--log-out", tu_log_out, "trial log CSV")->required();
  tu->add_option("--best-out", tu_best_out, "best configuration JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    const Recipe recipe = recipe_from_name(gen_recipe);
    gen_spec.recipe = recipe;
    if (!recipe_is_interval(recipe) && gen->count("--censor-fraction") == 0) {
      throw std::invalid_argument("--censor-fraction is required for recipe '" +
                                  gen_recipe + "'");
    }
    write_csv(generate(gen_spec), gen_out);
    std::cerr << "wrote " << gen_spec.n_rows << " rows to " << gen_out << "\n";
    return kExitOk;
  }

  if (tr->parsed()) {
    const Dataset data = read_csv(tr_data);
    std::optional<Dataset> valid;
    if (!tr_valid.empty()) valid = read_csv(tr_valid);
    const AftParams aft = make_aft(tr_opts);

    std::ofstream log_file;
    if (!tr_log_out.empty()) {
      log_file.open(tr_log_out);
      if (!log_file) throw DataError("cannot write '" + tr_log_out + "'");
      log_file << (valid ? "round,train-aft-nloglik,valid-aft-nloglik\n"
                         : "round,train-aft-nloglik\n");
    }
    const Model model = train(
        data, aft, tr_opts.boost, valid ? &*valid : nullptr,
        [&](int round, const std::vector<double>& margins,
            const std::vector<double>& valid_margins) {
          const double train_nll = aft_nloglik(margins, data.labels(), aft);
          std::ostringstream line;
          line << round << ',' << format_double(train_nll);
          if (valid) {
            line << ','
                 << format_double(aft_nloglik(valid_margins, valid->labels(), aft));
          }
          if (log_file) log_file << line.str() << '\n';
          std::cerr << "[" << round << "] " << line.str() << "\n";
        });
    save_model(model, tr_model_out);
    return kExitOk;
  }

  if (pr->parsed()) {
    const Model model = load_model(pr_model);
    const Dataset data = read_csv(pr_data);
    const std::vector<double> margins = predict_margins(model, data);
    std::ofstream out(pr_out);
    if (!out) throw DataError("cannot write '" + pr_out + "'");
    out << (pr_margin ? "margin\n" : "survival_time\n");
    for (double m : margins) {
      out << format_double(pr_margin ? m : std::exp(m)) << '\n';
    }
    return kExitOk;
  }

  if (ev->parsed()) {
    const Dataset data = read_csv(ev_data);
    std::vector<double> margins;
    if (!ev_model.empty()) {
      margins = predict_margins(load_model(ev_model), data);
    } else if (!ev_pred.empty()) {
      std::ifstream in(ev_pred);
      if (!in) throw DataError("cannot open '" + ev_pred + "'");
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const double v = std::stod(line);
        margins.push_back(ev_pred_margin ? v : std::log(v));
      }
      if (margins.size() != data.num_rows()) {
        throw DataError("prediction count does not match dataset rows");
      }
    } else {
      throw std::invalid_argument("evaluate needs --model or --predictions");
    }

    const AftParams aft = make_aft(ev_opts);
    std::ostringstream report;
    std::stringstream names(ev_metrics);
    std::string name;
    while (std::getline(names, name, ',')) {
      double value = 0.0;
      if (name == "harrell-c") {
        value = harrell_c(make_survival_pairs(data.labels(), margins));
      } else {
        const Metric metric = metric_from_name(name);
        double tau = -1.0;
        if (metric == Metric::kUnoC) {
          std::vector<double> times;
          for (const LabelRange& label : data.labels()) {
            times.push_back(label.lower);
          }
          tau = percentile(times, ev_tau_pct);
        }
        value = evaluate_metric(metric, margins, data.labels(), aft,
                                data.labels(), tau);
      }
      report << name << '=' << format_double(value) << '\n';
    }
    if (ev_out.empty()) {
      std::cout << report.str();
    } else {
      std::ofstream out(ev_out);
      if (!out) throw DataError("cannot write '" + ev_out + "'");
      out << report.str();
    }
    return kExitOk;
  }

  if (tu->parsed()) {
    const Dataset data = read_csv(tu_data);
    SearchOptions options;
    options.metric = metric_from_name(tu_metric);
    options.n_trials = tu_trials;
    options.inner_folds = tu_inner;
    options.round_budget = tu_budget;
    options.seed = tu_seed;
    options.threads = tu_threads;

    SearchSpace space;
    if (tu_mode == "grid") {
      options.mode = SearchMode::kGrid;
      if (!tu_space_path.empty()) {
        std::ifstream in(tu_space_path);
        if (!in) throw DataError("cannot open '" + tu_space_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        space = parse_search_space(buf.str());
      } else if (!tu_vary.empty()) {
        space = SearchSpace::grid_over(tu_vary);
      } else {
        throw std::invalid_argument("grid mode needs --vary or --space");
      }
    } else if (tu_mode == "random") {
      options.mode = SearchMode::kRandom;
      if (!tu_space_path.empty()) {
        std::ifstream in(tu_space_path);
        if (!in) throw DataError("cannot open '" + tu_space_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        space = parse_search_space(buf.str());
      } else {
        space = SearchSpace::default_random();
      }
    } else {
      throw std::invalid_argument("--mode must be grid or random");
    }

    const SearchResult result = run_search(data, space, options);

    std::ofstream log(tu_log_out);
    if (!log) throw DataError("cannot write '" + tu_log_out + "'");
    log << "trial,fold,metric_value,mean_metric,best_round,params\n";
    for (std::size_t t = 0; t < result.trials.size(); ++t) {
      const TrialRecord& rec = result.trials[t];
      for (std::size_t f = 0; f < rec.fold_metrics.size(); ++f) {
        log << t << ',' << f << ',' << format_double(rec.fold_metrics[f]) << ','
            << format_double(rec.mean_metric) << ',' << rec.best_round << ','
            << assignment_string(rec.assignment) << '\n';
      }
    }

    const TrialRecord& best = result.trials[result.best_index];
    json best_doc;
    best_doc["trial_index"] = result.best_index;
    best_doc["metric"] = metric_name(options.metric);
    best_doc["mean_validation_metric"] = best.mean_metric;
    best_doc["num_rounds"] = best.best_round;
    json params;
    for (const auto& [k, v] : best.assignment.values) params[k] = v;
    for (const auto& [k, v] : best.assignment.categorical) params[k] = v;
    best_doc["params"] = params;
    std::ofstream best_out(tu_best_out);
    if (!best_out) throw DataError("cannot write '" + tu_best_out + "'");
    best_out << best_doc.dump(2) << "\n";
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const aftboost::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
