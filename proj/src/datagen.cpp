#include "aftboost/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace aftboost {

double Rng::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double stddev) {
  // Box-Muller; both values of a pair are consumed before drawing again.
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return mean + stddev * radius * std::cos(theta);
}

bool recipe_is_interval(Recipe recipe) {
  return recipe != Recipe::kCoxph && recipe != Recipe::kAft;
}

const char* recipe_name(Recipe recipe) {
  switch (recipe) {
    case Recipe::kSin: return "simulated.sin";
    case Recipe::kAbs: return "simulated.abs";
    case Recipe::kLinear: return "simulated.linear";
    case Recipe::kModel1: return "simulated.model.1";
    case Recipe::kModel2: return "simulated.model.2";
    case Recipe::kModel3: return "simulated.model.3";
    case Recipe::kCoxph: return "coxph";
    case Recipe::kAft: return "aft";
  }
  return "unknown";
}

Recipe recipe_from_name(const std::string& name) {
  for (Recipe r : {Recipe::kSin, Recipe::kAbs, Recipe::kLinear, Recipe::kModel1,
                   Recipe::kModel2, Recipe::kModel3, Recipe::kCoxph,
                   Recipe::kAft}) {
    if (name == recipe_name(r)) return r;
  }
  throw std::invalid_argument("unknown recipe: '" + name + "'");
}

double mean_function(Recipe recipe, const double* x) {
  switch (recipe) {
    case Recipe::kSin: return std::sin(x[0]);
    case Recipe::kAbs: return std::abs(x[0] - 5.0);
    case Recipe::kLinear: return x[0] / 5.0;
    case Recipe::kModel1:
      return x[0] * x[1] + x[2] * x[2] - x[3] * x[6] + x[7] * x[9] - x[5] * x[5];
    case Recipe::kModel2:
      return -std::sin(2.0 * x[0]) + x[1] * x[1] + x[2] - std::exp(-x[3]);
    case Recipe::kCoxph:
    case Recipe::kAft:
    case Recipe::kModel3:
      return x[0] + 3.0 * x[2] * x[2] - 2.0 * std::exp(-x[4]);
  }
  return 0.0;
}

namespace {

constexpr std::size_t kNumFeatures = 20;

std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= kNumFeatures; ++j) {
    names.push_back("x" + std::to_string(j));
  }
  return names;
}

}  // namespace

Dataset generate_interval(const GeneratorSpec& spec) {
  if (!recipe_is_interval(spec.recipe)) {
    throw std::invalid_argument("recipe is not interval-censored");
  }
  // The Drouin-style recipes draw features over [0, 10]; the model.* recipes
  // reuse the right-censored mean functions, whose feature scale is [0, 1].
  const bool model_recipe = spec.recipe == Recipe::kModel1 ||
                            spec.recipe == Recipe::kModel2 ||
                            spec.recipe == Recipe::kModel3;
  const double feature_hi = model_recipe ? 1.0 : 10.0;
  Rng rng(spec.seed);
  Dataset dataset(kNumFeatures, feature_names());
  std::vector<double> x(kNumFeatures);
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    for (double& v : x) v = rng.uniform(0.0, feature_hi);
    const double mean = mean_function(spec.recipe, x.data());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
      const double v = rng.normal(mean, 0.3);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // One shared noise draw keeps the bounds ordered.
    const double noise = rng.normal(0.0, 0.2);
    LabelRange label;
    label.lower = std::exp(lo + noise);
    label.upper = std::exp(hi + noise);
    dataset.add_row(x, label);
  }
  return dataset;
}

double calibrate_censoring_cutoff(const std::vector<double>& times,
                                  double censor_fraction) {
  if (times.empty()) throw std::invalid_argument("no survival times");
  const auto [min_it, max_it] = std::minmax_element(times.begin(), times.end());
  // (1/n) sum min(y_i/C, 1) = P[y >= c] for c ~ U([0, C]); decreasing in C.
  auto censored_frac = [&](double cutoff) {
    double acc = 0.0;
    for (double y : times) acc += std::min(y / cutoff, 1.0);
    return acc / static_cast<double>(times.size());
  };
  double lo = *min_it;
  double hi = 10.0 * *max_it;
  if (censored_frac(lo) < censor_fraction) return lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double frac = censored_frac(mid);
    if (std::abs(frac - censor_fraction) < 1e-3) return mid;
    if (frac > censor_fraction) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Dataset generate_right_censored(const GeneratorSpec& spec) {
  if (recipe_is_interval(spec.recipe)) {
    throw std::invalid_argument("recipe is not right-censored");
  }
  if (!(spec.censor_fraction > 0.0 && spec.censor_fraction < 1.0)) {
    throw std::invalid_argument("censor_fraction must lie in (0, 1)");
  }
  if (spec.n_rows < 2) {
    throw std::invalid_argument("right-censored recipes need at least 2 rows");
  }
  constexpr double kBaselineHazard = 0.1;
  constexpr double kHazardRatio = 2.0;

  Rng rng(spec.seed);
  std::vector<std::vector<double>> features(spec.n_rows,
                                            std::vector<double>(kNumFeatures));
  std::vector<double> times(spec.n_rows);
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    for (double& v : features[i]) v = rng.uniform(0.0, 1.0);
    const double risk = rng.normal(mean_function(spec.recipe, features[i].data()), 0.3);
    if (spec.recipe == Recipe::kCoxph) {
      double u = rng.uniform();
      while (u == 0.0) u = rng.uniform();
      times[i] = -std::log(u) / (kBaselineHazard * std::pow(kHazardRatio, risk));
    } else {
      times[i] = std::exp(-risk);
    }
  }

  // Censoring uniforms first; the cutoff scale C is then placed so that the
  // realized censored count hits round(n * fraction) exactly (row i is
  // censored iff y_i >= u_i * C, i.e. C <= y_i / u_i). Expectation-based
  // calibration alone leaves ~n^-1/2 binomial noise on the realized fraction.
  const std::size_t n = spec.n_rows;
  std::vector<double> u(n);
  for (double& v : u) {
    do {
      v = rng.uniform();
    } while (v == 0.0);
  }
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = times[i] / u[i];
  std::vector<double> sorted = ratio;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t want = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.censor_fraction *
                                            static_cast<double>(n))),
      1, n - 1);
  const double cutoff_scale = 0.5 * (sorted[want - 1] + sorted[want]);

  Dataset dataset(kNumFeatures, feature_names());
  for (std::size_t i = 0; i < n; ++i) {
    LabelRange label;
    if (ratio[i] >= cutoff_scale) {
      label.lower = u[i] * cutoff_scale;
      label.upper = std::numeric_limits<double>::infinity();
    } else {
      label.lower = label.upper = times[i];
    }
    dataset.add_row(features[i], label);
  }
  return dataset;
}

Dataset generate(const GeneratorSpec& spec) {
  return recipe_is_interval(spec.recipe) ? generate_interval(spec)
                                         : generate_right_censored(spec);
}

}  // namespace aftboost
