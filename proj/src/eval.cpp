#include "aftboost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aftboost/data.hpp"

namespace aftboost {

double KaplanMeierCurve::at(double t) const {
  // value on [times_[k], times_[k+1])
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double KaplanMeierCurve::left_limit(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

KaplanMeierCurve kaplan_meier(const std::vector<double>& times,
                              const std::vector<bool>& events) {
  if (times.empty() || times.size() != events.size()) {
    throw DataError("kaplan_meier: empty or mismatched inputs");
  }
  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> step_times, step_values;
  double survival = 1.0;
  double at_risk = static_cast<double>(n);
  std::size_t k = 0;
  while (k < n) {
    const double t = times[order[k]];
    double deaths = 0.0, removed = 0.0;
    while (k < n && times[order[k]] == t) {
      if (events[order[k]]) deaths += 1.0;
      removed += 1.0;
      ++k;
    }
    if (deaths > 0.0) {
      // Deaths at t are processed against everyone still at risk at t.
      survival *= 1.0 - deaths / at_risk;
      step_times.push_back(t);
      step_values.push_back(survival);
    }
    at_risk -= removed;
  }
  return KaplanMeierCurve(std::move(step_times), std::move(step_values));
}

double interval_accuracy(const std::vector<double>& margins,
                         const std::vector<LabelRange>& labels) {
  if (margins.empty() || margins.size() != labels.size()) {
    throw DataError("interval_accuracy: empty or mismatched inputs");
  }
  std::size_t inside = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double lo =
        labels[i].lower == 0.0 ? -std::numeric_limits<double>::infinity()
                               : std::log(labels[i].lower);
    const double hi = std::isinf(labels[i].upper)
                          ? std::numeric_limits<double>::infinity()
                          : std::log(labels[i].upper);
    if (margins[i] >= lo && margins[i] <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(margins.size());
}

double aft_nloglik(const std::vector<double>& margins,
                   const std::vector<LabelRange>& labels,
                   const AftParams& params) {
  if (margins.empty() || margins.size() != labels.size()) {
    throw DataError("aft_nloglik: empty or mismatched inputs");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    acc += aft_loss(labels[i], margins[i], params);
  }
  return acc / static_cast<double>(margins.size());
}

double harrell_c(const std::vector<SurvivalPair>& pairs) {
  if (pairs.size() < 2) throw DataError("harrell_c: need at least 2 pairs");
  double concordant = 0.0, comparable = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].event) continue;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (i == j || pairs[i].time >= pairs[j].time) continue;
      comparable += 1.0;
      if (pairs[i].score < pairs[j].score) {
        concordant += 1.0;
      } else if (pairs[i].score == pairs[j].score) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0.0) throw DataError("harrell_c: no comparable pairs");
  return concordant / comparable;
}

double uno_c(const std::vector<SurvivalPair>& train_pairs,
             const std::vector<SurvivalPair>& test_pairs, double tau) {
  if (train_pairs.empty()) throw DataError("uno_c: empty training pairs");
  if (test_pairs.size() < 2) throw DataError("uno_c: need at least 2 pairs");
  if (!(tau > 0.0)) throw DataError("uno_c: tau must be > 0");

  // Censoring survival curve: KM with the event indicator inverted.
  std::vector<double> times;
  std::vector<bool> censored;
  times.reserve(train_pairs.size());
  for (const SurvivalPair& p : train_pairs) {
    times.push_back(p.time);
    censored.push_back(!p.event);
  }
  const KaplanMeierCurve curve = kaplan_meier(times, censored);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < test_pairs.size(); ++i) {
    const SurvivalPair& a = test_pairs[i];
    if (!a.event || a.time >= tau) continue;
    const double g = curve.left_limit(a.time);
    bool used = false;
    double w = 0.0;
    for (std::size_t j = 0; j < test_pairs.size(); ++j) {
      if (i == j || a.time >= test_pairs[j].time) continue;
      if (!used) {
        if (g <= 0.0) {
          throw DataError("uno_c: censoring survival reaches 0 before an "
                          "event time (insufficient follow-up)");
        }
        w = 1.0 / (g * g);
        used = true;
      }
      den += w;
      if (a.score < test_pairs[j].score) {
        num += w;
      } else if (a.score == test_pairs[j].score) {
        num += 0.5 * w;
      }
    }
  }
  if (den == 0.0) throw DataError("uno_c: no comparable pairs under tau");
  return num / den;
}

std::vector<SurvivalPair> make_survival_pairs(
    const std::vector<LabelRange>& labels, const std::vector<double>& margins) {
  if (labels.size() != margins.size()) {
    throw DataError("make_survival_pairs: mismatched inputs");
  }
  std::vector<SurvivalPair> pairs(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Censoring c = classify_censoring(labels[i]);
    if (c != Censoring::kUncensored && c != Censoring::kRight) {
      throw DataError(
          "concordance metrics require uncensored or right-censored labels, "
          "got a " + std::string(censoring_name(c)) + "-censored row");
    }
    pairs[i].time = labels[i].lower;
    pairs[i].event = c == Censoring::kUncensored;
    pairs[i].score = margins[i];
  }
  return pairs;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DataError("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace aftboost
