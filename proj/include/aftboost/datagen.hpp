#ifndef AFTBOOST_DATAGEN_HPP_
#define AFTBOOST_DATAGEN_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "aftboost/data.hpp"

namespace aftboost {

enum class Recipe {
  kSin,      // f(x) = sin(x1)
  kAbs,      // f(x) = |x1 - 5|
  kLinear,   // f(x) = x1/5
  kModel1,   // f(x) = x1*x2 + x3^2 - x4*x7 + x8*x10 - x6^2
  kModel2,   // f(x) = -sin(2*x1) + x2^2 + x3 - exp(-x4)
  kModel3,   // f(x) = x1 + 3*x3^2 - 2*exp(-x5)
  kCoxph,    // right-censored, y = -ln(u)/(h0*h^r)
  kAft,      // right-censored, y = exp(-r)
};

bool recipe_is_interval(Recipe recipe);
const char* recipe_name(Recipe recipe);          // e.g. "simulated.sin", "coxph"
Recipe recipe_from_name(const std::string& name);

struct GeneratorSpec {
  Recipe recipe = Recipe::kSin;
  std::size_t n_rows = 200;
  double censor_fraction = 0.5;  // right-censored recipes only
  std::uint64_t seed = 0;
};

// Mean function f(x) of the recipe; x is 1-based in the formulas above, so
// x[0] is x1. Requires at least 20 entries.
double mean_function(Recipe recipe, const double* x);

Dataset generate_interval(const GeneratorSpec& spec);
Dataset generate_right_censored(const GeneratorSpec& spec);
Dataset generate(const GeneratorSpec& spec);

// Deterministic draws independent of the standard library's distribution
// implementations: the dataset bytes depend only on the spec.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                       // U([0,1))
  double uniform(double lo, double hi);
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Cutoff scale C such that (1/n) * sum_i min(y_i/C, 1) hits the target
// censored fraction to within 1e-3 (bisection).
double calibrate_censoring_cutoff(const std::vector<double>& times,
                                  double censor_fraction);

}  // namespace aftboost

#endif  // AFTBOOST_DATAGEN_HPP_
