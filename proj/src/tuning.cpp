#include "aftboost/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "aftboost/datagen.hpp"

namespace aftboost {

using nlohmann::json;

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::kIntervalAccuracy: return "interval-accuracy";
    case Metric::kAftNloglik: return "aft-nloglik";
    case Metric::kUnoC: return "uno-c";
  }
  return "unknown";
}

Metric metric_from_name(const std::string& name) {
  if (name == "interval-accuracy") return Metric::kIntervalAccuracy;
  if (name == "aft-nloglik") return Metric::kAftNloglik;
  if (name == "uno-c") return Metric::kUnoC;
  throw std::invalid_argument(
      "unknown metric: '" + name +
      "' (expected interval-accuracy, aft-nloglik or uno-c)");
}

bool metric_higher_is_better(Metric metric) {
  return metric != Metric::kAftNloglik;
}

ParamSpec SearchSpace::table_grid(const std::string& name) {
  ParamSpec spec;
  spec.kind = ParamSpec::Kind::kGrid;
  if (name == "learning_rate") {
    spec.grid = {0.001, 0.01, 0.1, 1.0};
  } else if (name == "max_depth") {
    spec.grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  } else if (name == "min_child_weight") {
    spec.grid = {0.001, 0.1, 1.0, 10.0, 100.0};
  } else if (name == "reg_alpha" || name == "reg_lambda") {
    spec.grid = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
  } else if (name == "aft_loss_distribution_scale") {
    spec.grid = {0.5, 0.8, 1.1, 1.4, 1.7, 2.0};
  } else if (name == "aft_loss_distribution") {
    spec.kind = ParamSpec::Kind::kCategorical;
    spec.categories = {"normal", "logistic", "extreme"};
  } else {
    throw std::invalid_argument("unknown hyperparameter: '" + name + "'");
  }
  return spec;
}

ParamSpec SearchSpace::table_random(const std::string& name) {
  ParamSpec spec;
  if (name == "learning_rate") {
    spec.kind = ParamSpec::Kind::kLogUniform;
    spec.low = 0.001;
    spec.high = 1.0;
  } else if (name == "max_depth") {
    spec.kind = ParamSpec::Kind::kIntUniform;
    spec.low = 2;
    spec.high = 10;
  } else if (name == "min_child_weight" || name == "reg_alpha" ||
             name == "reg_lambda") {
    spec.kind = ParamSpec::Kind::kLogUniform;
    spec.low = 0.001;
    spec.high = 100.0;
  } else if (name == "aft_loss_distribution_scale") {
    spec.kind = ParamSpec::Kind::kUniform;
    spec.low = 0.5;
    spec.high = 2.0;
  } else if (name == "aft_loss_distribution") {
    spec.kind = ParamSpec::Kind::kCategorical;
    spec.categories = {"normal", "logistic", "extreme"};
  } else {
    throw std::invalid_argument("unknown hyperparameter: '" + name + "'");
  }
  return spec;
}

SearchSpace SearchSpace::default_random() {
  SearchSpace space;
  for (const char* name :
       {"learning_rate", "max_depth", "min_child_weight", "reg_alpha",
        "reg_lambda", "aft_loss_distribution_scale"}) {
    space.entries.emplace_back(name, table_random(name));
  }
  return space;
}

SearchSpace SearchSpace::grid_over(const std::vector<std::string>& names) {
  SearchSpace space;
  for (const std::string& name : names) {
    space.entries.emplace_back(name, table_grid(name));
  }
  return space;
}

SearchSpace parse_search_space(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("search space parse error: ") +
                                e.what());
  }
  SearchSpace space;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    ParamSpec spec;
    const json& v = it.value();
    if (v.contains("grid")) {
      if (it.key() == "aft_loss_distribution") {
        spec.kind = ParamSpec::Kind::kCategorical;
        for (const json& g : v["grid"]) {
          spec.categories.push_back(g.get<std::string>());
        }
        if (spec.categories.empty()) {
          throw std::invalid_argument("empty grid for '" + it.key() + "'");
        }
      } else {
        spec.kind = ParamSpec::Kind::kGrid;
        for (const json& g : v["grid"]) spec.grid.push_back(g.get<double>());
        if (spec.grid.empty()) {
          throw std::invalid_argument("empty grid for '" + it.key() + "'");
        }
      }
    } else if (v.contains("distribution")) {
      const std::string kind = v["distribution"].get<std::string>();
      if (kind == "log_uniform") {
        spec.kind = ParamSpec::Kind::kLogUniform;
      } else if (kind == "uniform") {
        spec.kind = ParamSpec::Kind::kUniform;
      } else if (kind == "int_uniform") {
        spec.kind = ParamSpec::Kind::kIntUniform;
      } else {
        throw std::invalid_argument("unknown distribution kind: '" + kind + "'");
      }
      spec.low = v.at("low").get<double>();
      spec.high = v.at("high").get<double>();
      if (!(spec.low < spec.high)) {
        throw std::invalid_argument("low must be < high for '" + it.key() + "'");
      }
    } else {
      throw std::invalid_argument("entry '" + it.key() +
                                  "' needs 'grid' or 'distribution'");
    }
    space.entries.emplace_back(it.key(), spec);
  }
  return space;
}

void ParamAssignment::apply(AftParams* aft, BoostingParams* boost) const {
  for (const auto& [name, value] : values) {
    if (name == "learning_rate") {
      boost->learning_rate = value;
    } else if (name == "max_depth") {
      boost->max_depth = static_cast<int>(std::lround(value));
    } else if (name == "min_child_weight") {
      boost->min_child_weight = value;
    } else if (name == "reg_alpha") {
      boost->reg_alpha = value;
    } else if (name == "reg_lambda") {
      boost->reg_lambda = value;
    } else if (name == "aft_loss_distribution_scale") {
      aft->sigma = value;
    } else {
      throw std::invalid_argument("unknown hyperparameter: '" + name + "'");
    }
  }
  for (const auto& [name, value] : categorical) {
    if (name == "aft_loss_distribution") {
      aft->dist = distribution_from_name(value);
    } else {
      throw std::invalid_argument("unknown hyperparameter: '" + name + "'");
    }
  }
}

std::vector<int> make_folds(std::size_t n_rows, int n_folds,
                            std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("need at least 2 folds");
  std::vector<std::size_t> perm(n_rows);
  std::iota(perm.begin(), perm.end(), 0u);
  // Fisher-Yates with our own uniform draws (portable across libstdc++/libc++)
  Rng rng(seed);
  for (std::size_t i = n_rows; i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
  }
  std::vector<int> folds(n_rows);
  for (std::size_t pos = 0; pos < n_rows; ++pos) {
    folds[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(n_folds));
  }
  return folds;
}

ParamAssignment sample_trial(const SearchSpace& space, Rng& rng) {
  ParamAssignment assignment;
  for (const auto& [name, spec] : space.entries) {
    switch (spec.kind) {
      case ParamSpec::Kind::kGrid: {
        const std::size_t k = std::min<std::size_t>(
            static_cast<std::size_t>(rng.uniform() *
                                     static_cast<double>(spec.grid.size())),
            spec.grid.size() - 1);
        assignment.values[name] = spec.grid[k];
        break;
      }
      case ParamSpec::Kind::kCategorical: {
        const std::size_t k = std::min<std::size_t>(
            static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(spec.categories.size())),
            spec.categories.size() - 1);
        assignment.categorical[name] = spec.categories[k];
        break;
      }
      case ParamSpec::Kind::kLogUniform:
        assignment.values[name] =
            std::exp(rng.uniform(std::log(spec.low), std::log(spec.high)));
        break;
      case ParamSpec::Kind::kUniform:
        assignment.values[name] = rng.uniform(spec.low, spec.high);
        break;
      case ParamSpec::Kind::kIntUniform: {
        const double span = spec.high - spec.low + 1.0;
        const double v = spec.low + std::floor(rng.uniform() * span);
        assignment.values[name] = std::min(v, spec.high);
        break;
      }
    }
  }
  return assignment;
}

std::vector<ParamAssignment> enumerate_grid(const SearchSpace& space) {
  for (const auto& [name, spec] : space.entries) {
    if (spec.kind != ParamSpec::Kind::kGrid &&
        spec.kind != ParamSpec::Kind::kCategorical) {
      throw std::invalid_argument("grid search requires a grid for '" + name +
                                  "'");
    }
  }
  std::vector<ParamAssignment> out;
  std::vector<std::size_t> index(space.entries.size(), 0);
  while (true) {
    ParamAssignment assignment;
    for (std::size_t k = 0; k < space.entries.size(); ++k) {
      const auto& [name, spec] = space.entries[k];
      if (spec.kind == ParamSpec::Kind::kCategorical) {
        assignment.categorical[name] = spec.categories[index[k]];
      } else {
        assignment.values[name] = spec.grid[index[k]];
      }
    }
    out.push_back(std::move(assignment));
    // Odometer increment, last entry fastest.
    std::size_t k = space.entries.size();
    while (k > 0) {
      --k;
      const auto& spec = space.entries[k].second;
      const std::size_t size = spec.kind == ParamSpec::Kind::kCategorical
                                   ? spec.categories.size()
                                   : spec.grid.size();
      if (++index[k] < size) break;
      index[k] = 0;
      if (k == 0) return out;
    }
    if (space.entries.empty()) return out;
  }
}

double evaluate_metric(Metric metric, const std::vector<double>& margins,
                       const std::vector<LabelRange>& labels,
                       const AftParams& aft,
                       const std::vector<LabelRange>& train_labels,
                       double tau) {
  switch (metric) {
    case Metric::kIntervalAccuracy:
      return interval_accuracy(margins, labels);
    case Metric::kAftNloglik:
      return aft_nloglik(margins, labels, aft);
    case Metric::kUnoC: {
      const std::vector<SurvivalPair> test =
          make_survival_pairs(labels, margins);
      std::vector<double> zeros(train_labels.size(), 0.0);
      const std::vector<SurvivalPair> train =
          make_survival_pairs(train_labels, zeros);
      if (tau < 0.0) {
        std::vector<double> times;
        times.reserve(test.size());
        for (const SurvivalPair& p : test) times.push_back(p.time);
        tau = percentile(times, 80.0);
      }
      return uno_c(train, test, tau);
    }
  }
  throw std::invalid_argument("unknown metric");
}

namespace {

void check_metric_compatibility(Metric metric, const Dataset& dataset) {
  if (metric != Metric::kUnoC) return;
  for (const LabelRange& label : dataset.labels()) {
    const Censoring c = classify_censoring(label);
    if (c == Censoring::kLeft || c == Censoring::kInterval) {
      throw DataError("uno-c requires uncensored/right-censored labels only");
    }
  }
}

// Per-round mean validation metric across the inner folds of one trial.
TrialRecord evaluate_trial(const Dataset& dataset, const ParamAssignment& assignment,
                           const std::vector<int>& folds,
                           const SearchOptions& options) {
  AftParams aft;
  BoostingParams boost;
  boost.threads = options.threads;
  assignment.apply(&aft, &boost);
  boost.num_rounds = options.round_budget;

  const int k = options.inner_folds;
  std::vector<std::vector<double>> per_round(
      static_cast<std::size_t>(options.round_budget),
      std::vector<double>(static_cast<std::size_t>(k)));

  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows, valid_rows;
    for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
      (folds[i] == fold ? valid_rows : train_rows).push_back(i);
    }
    if (valid_rows.empty() || train_rows.empty()) {
      throw DataError("fold too small: an inner fold is empty");
    }
    const Dataset train_set = dataset.subset(train_rows);
    const Dataset valid_set = dataset.subset(valid_rows);

    train(train_set, aft, boost, &valid_set,
          [&](int round, const std::vector<double>&,
              const std::vector<double>& valid_margins) {
            per_round[static_cast<std::size_t>(round)]
                     [static_cast<std::size_t>(fold)] = evaluate_metric(
                         options.metric, valid_margins, valid_set.labels(), aft,
                         train_set.labels());
          });
  }

  const bool maximize = metric_higher_is_better(options.metric);
  int best_round = 0;
  double best_mean = maximize ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.round_budget; ++r) {
    const auto& row = per_round[static_cast<std::size_t>(r)];
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) /
                        static_cast<double>(k);
    if (maximize ? mean > best_mean : mean < best_mean) {
      best_mean = mean;
      best_round = r;
    }
  }

  TrialRecord record;
  record.assignment = assignment;
  record.fold_metrics = per_round[static_cast<std::size_t>(best_round)];
  record.mean_metric = best_mean;
  record.best_round = best_round + 1;
  return record;
}

}  // namespace

SearchResult run_search(const Dataset& dataset, const SearchSpace& space,
                        const SearchOptions& options) {
  if (dataset.num_rows() <
      static_cast<std::size_t>(options.inner_folds)) {
    throw DataError("fewer rows than inner folds");
  }
  check_metric_compatibility(options.metric, dataset);

  std::vector<ParamAssignment> assignments;
  if (options.mode == SearchMode::kGrid) {
    assignments = enumerate_grid(space);
  } else {
    Rng rng(options.seed);
    for (int t = 0; t < options.n_trials; ++t) {
      assignments.push_back(sample_trial(space, rng));
    }
  }

  std::vector<int> folds;
  if (dataset.fold_assignment()) {
    folds = *dataset.fold_assignment();
    for (int& f : folds) f %= options.inner_folds;
  } else {
    folds = make_folds(dataset.num_rows(), options.inner_folds,
                       options.seed ^ 0x9e3779b97f4a7c15ull);
  }

  SearchResult result;
  const bool maximize = metric_higher_is_better(options.metric);
  for (const ParamAssignment& assignment : assignments) {
    result.trials.push_back(evaluate_trial(dataset, assignment, folds, options));
    const TrialRecord& rec = result.trials.back();
    const TrialRecord& best = result.trials[result.best_index];
    if (maximize ? rec.mean_metric > best.mean_metric
                 : rec.mean_metric < best.mean_metric) {
      result.best_index = result.trials.size() - 1;
    }
  }
  if (result.trials.empty()) throw std::invalid_argument("no trials");
  return result;
}

NestedCvResult nested_cv(const Dataset& dataset, const SearchSpace& space,
                         const SearchOptions& options, int outer_folds) {
  if (outer_folds < 2) throw std::invalid_argument("outer_folds must be >= 2");
  check_metric_compatibility(options.metric, dataset);

  std::vector<int> outer;
  if (dataset.fold_assignment()) {
    outer = *dataset.fold_assignment();
    for (int& f : outer) f %= outer_folds;
  } else {
    outer = make_folds(dataset.num_rows(), outer_folds, options.seed);
  }

  NestedCvResult result;
  for (int fold = 0; fold < outer_folds; ++fold) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
      (outer[i] == fold ? test_rows : train_rows).push_back(i);
    }
    if (test_rows.empty() || train_rows.empty()) {
      throw DataError("fold too small: an outer fold is empty");
    }
    Dataset search_set = dataset.subset(train_rows);
    search_set.fold_assignment().reset();  // inner folds are drawn afresh
    const Dataset test_set = dataset.subset(test_rows);

    SearchOptions inner = options;
    inner.seed = options.seed + 0x51ed2701u * static_cast<std::uint64_t>(fold + 1);
    const SearchResult search = run_search(search_set, space, inner);
    const TrialRecord& best = search.trials[search.best_index];

    AftParams aft;
    BoostingParams boost;
    boost.threads = options.threads;
    best.assignment.apply(&aft, &boost);
    boost.num_rounds = best.best_round;
    const Model model = train(search_set, aft, boost);

    std::vector<double> margins(test_set.num_rows());
    for (std::size_t i = 0; i < test_set.num_rows(); ++i) {
      margins[i] = model.predict_margin(test_set.row(i), test_set.num_features());
    }
    OuterFoldResult fr;
    fr.fold = fold;
    fr.best_trial = best;
    fr.test_metric = evaluate_metric(options.metric, margins,
                                     test_set.labels(), aft,
                                     search_set.labels());
    result.folds.push_back(std::move(fr));
  }

  double mean = 0.0;
  for (const OuterFoldResult& fr : result.folds) mean += fr.test_metric;
  mean /= static_cast<double>(result.folds.size());
  double var = 0.0;
  for (const OuterFoldResult& fr : result.folds) {
    var += (fr.test_metric - mean) * (fr.test_metric - mean);
  }
  result.mean_test_metric = mean;
  result.stdev_test_metric =
      result.folds.size() > 1
          ? std::sqrt(var / static_cast<double>(result.folds.size() - 1))
          : 0.0;
  return result;
}

}  // namespace aftboost
