#ifndef AFTBOOST_EVAL_HPP_
#define AFTBOOST_EVAL_HPP_

#include <vector>

#include "aftboost/loss.hpp"

namespace aftboost {

// Observation for concordance metrics. `time` is y for uncensored rows and
// the lower bound for right-censored ones; `score` is the model margin.
// Higher score means longer predicted survival.
struct SurvivalPair {
  double time = 0.0;
  bool event = false;  // true = uncensored
  double score = 0.0;
};

// Right-continuous product-limit step function, value 1 at time 0.
class KaplanMeierCurve {
 public:
  KaplanMeierCurve() = default;
  KaplanMeierCurve(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {}

  double at(double t) const;          // S(t), right-continuous
  double left_limit(double t) const;  // S(t-)

  const std::vector<double>& step_times() const { return times_; }
  const std::vector<double>& step_values() const { return values_; }

 private:
  std::vector<double> times_;   // ascending distinct event times
  std::vector<double> values_;  // value on [times_[k], times_[k+1])
};

KaplanMeierCurve kaplan_meier(const std::vector<double>& times,
                              const std::vector<bool>& events);

// Fraction of margins falling inside the closed log label interval.
double interval_accuracy(const std::vector<double>& margins,
                         const std::vector<LabelRange>& labels);

// Mean AFT negative log-likelihood.
double aft_nloglik(const std::vector<double>& margins,
                   const std::vector<LabelRange>& labels,
                   const AftParams& params);

double harrell_c(const std::vector<SurvivalPair>& pairs);

// IPCW concordance with truncation at tau. The censoring survival curve is
// fit on train_pairs (event indicator inverted) and each comparable pair
// (i, j) with event_i and time_i < min(time_j, tau) gets weight G(t_i-)^-2.
double uno_c(const std::vector<SurvivalPair>& train_pairs,
             const std::vector<SurvivalPair>& test_pairs, double tau);

// Helper shared with the CLI and tuning: labels -> concordance observations.
// Throws DataError when a label is left- or interval-censored.
std::vector<SurvivalPair> make_survival_pairs(
    const std::vector<LabelRange>& labels, const std::vector<double>& margins);

double percentile(std::vector<double> values, double pct);

}  // namespace aftboost

#endif  // AFTBOOST_EVAL_HPP_
