#ifndef AFTBOOST_TUNING_HPP_
#define AFTBOOST_TUNING_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aftboost/eval.hpp"
#include "aftboost/tree.hpp"

namespace aftboost {

enum class Metric { kIntervalAccuracy, kAftNloglik, kUnoC };
const char* metric_name(Metric metric);
Metric metric_from_name(const std::string& name);
bool metric_higher_is_better(Metric metric);

// One tunable hyperparameter: an explicit grid, or a sampling distribution
// for random search. Categorical axes (the distribution kind) use a grid of
// names.
struct ParamSpec {
  enum class Kind { kGrid, kLogUniform, kUniform, kIntUniform, kCategorical };
  Kind kind = Kind::kGrid;
  std::vector<double> grid;
  std::vector<std::string> categories;
  double low = 0.0;
  double high = 0.0;
};

struct SearchSpace {
  // Ordered: grid enumeration and random draws follow this order.
  std::vector<std::pair<std::string, ParamSpec>> entries;

  // Per-hyperparameter grid/distribution descriptors for the six tuned names.
  static ParamSpec table_grid(const std::string& name);
  static ParamSpec table_random(const std::string& name);
  // Full random-search space over all six hyperparameters.
  static SearchSpace default_random();
  // Grid over the listed subset of hyperparameter names.
  static SearchSpace grid_over(const std::vector<std::string>& names);
};

SearchSpace parse_search_space(const std::string& json_text);

// name -> value; categorical values are carried separately.
struct ParamAssignment {
  std::map<std::string, double> values;
  std::map<std::string, std::string> categorical;

  // Baseline defaults with the assignment applied on top.
  void apply(AftParams* aft, BoostingParams* boost) const;
};

struct TrialRecord {
  ParamAssignment assignment;
  std::vector<double> fold_metrics;  // at the chosen round, one per inner fold
  double mean_metric = 0.0;
  int best_round = 0;  // number of boosting rounds maximizing the mean metric
};

enum class SearchMode { kGrid, kRandom };

struct SearchOptions {
  SearchMode mode = SearchMode::kRandom;
  int n_trials = 100;  // random mode only
  int inner_folds = 5;
  Metric metric = Metric::kIntervalAccuracy;
  int round_budget = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SearchResult {
  std::vector<TrialRecord> trials;
  std::size_t best_index = 0;
};

// Deterministic fold ids: seeded shuffle dealt round-robin.
std::vector<int> make_folds(std::size_t n_rows, int n_folds,
                            std::uint64_t seed);

ParamAssignment sample_trial(const SearchSpace& space, class Rng& rng);
std::vector<ParamAssignment> enumerate_grid(const SearchSpace& space);

SearchResult run_search(const Dataset& dataset, const SearchSpace& space,
                        const SearchOptions& options);

struct OuterFoldResult {
  int fold = 0;
  TrialRecord best_trial;
  double test_metric = 0.0;
};

struct NestedCvResult {
  std::vector<OuterFoldResult> folds;
  double mean_test_metric = 0.0;
  double stdev_test_metric = 0.0;
};

NestedCvResult nested_cv(const Dataset& dataset, const SearchSpace& space,
                         const SearchOptions& options, int outer_folds);

// Metric value for margins on `labels`; train_labels supply the censoring
// curve for uno_c (ignored by the other metrics). tau < 0 means the default
// 80th percentile of the observed times in `labels`.
double evaluate_metric(Metric metric, const std::vector<double>& margins,
                       const std::vector<LabelRange>& labels,
                       const AftParams& aft,
                       const std::vector<LabelRange>& train_labels,
                       double tau = -1.0);

}  // namespace aftboost

#endif  // AFTBOOST_TUNING_HPP_
