#include "aftboost/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aftboost {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kExpArgMax = 700.0;  // exp(709.78) overflows a double

// exp with the argument clamped so no intermediate becomes INF.
inline double guarded_exp(double x) { return std::exp(std::min(x, kExpArgMax)); }

}  // namespace

double pdf(Distribution dist, double z) {
  switch (dist) {
    case Distribution::kNormal:
      return kInvSqrt2Pi * std::exp(-0.5 * z * z);
    case Distribution::kLogistic: {
      // e^z/(1+e^z)^2 rearranged with t = e^-|z| so large |z| cannot overflow.
      const double t = std::exp(-std::abs(z));
      const double d = 1.0 + t;
      return t / (d * d);
    }
    case Distribution::kExtreme: {
      const double w = guarded_exp(z);
      return std::exp(std::min(z, kExpArgMax) - w);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double cdf(Distribution dist, double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  switch (dist) {
    case Distribution::kNormal:
      return 0.5 * std::erfc(-z * M_SQRT1_2);
    case Distribution::kLogistic: {
      const double t = std::exp(-std::abs(z));
      return z >= 0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
    }
    case Distribution::kExtreme:
      // 1 - exp(-e^z), via expm1 to keep precision in the lower tail
      return -std::expm1(-guarded_exp(z));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double survival(Distribution dist, double z) {
  if (std::isinf(z)) return z > 0 ? 0.0 : 1.0;
  switch (dist) {
    case Distribution::kNormal:
      return 0.5 * std::erfc(z * M_SQRT1_2);
    case Distribution::kLogistic: {
      const double t = std::exp(-std::abs(z));
      return z >= 0 ? t / (1.0 + t) : 1.0 / (1.0 + t);
    }
    case Distribution::kExtreme:
      return std::exp(-guarded_exp(z));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double cdf_diff(Distribution dist, double lo, double hi) {
  if (lo > 0.0) return survival(dist, lo) - survival(dist, hi);
  return cdf(dist, hi) - cdf(dist, lo);
}

double pdf_prime(Distribution dist, double z) {
  switch (dist) {
    case Distribution::kNormal:
      return -z * pdf(dist, z);
    case Distribution::kLogistic:
      // f(z)(1-e^z)/(1+e^z) = -f(z)*tanh(z/2)
      return -pdf(dist, z) * std::tanh(0.5 * z);
    case Distribution::kExtreme: {
      const double f = pdf(dist, z);
      if (f == 0.0) return 0.0;
      return (1.0 - guarded_exp(z)) * f;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double pdf_double_prime(Distribution dist, double z) {
  switch (dist) {
    case Distribution::kNormal:
      return (z * z - 1.0) * pdf(dist, z);
    case Distribution::kLogistic: {
      // (e^2z - 4e^z + 1)/(1+e^z)^2 is even in z; evaluate with t = e^-|z|
      const double t = std::exp(-std::abs(z));
      const double d = 1.0 + t;
      return pdf(dist, z) * (t * t - 4.0 * t + 1.0) / (d * d);
    }
    case Distribution::kExtreme: {
      const double f = pdf(dist, z);
      if (f == 0.0) return 0.0;
      const double w = guarded_exp(z);
      return (w * w - 3.0 * w + 1.0) * f;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const char* distribution_name(Distribution dist) {
  switch (dist) {
    case Distribution::kNormal: return "normal";
    case Distribution::kLogistic: return "logistic";
    case Distribution::kExtreme: return "extreme";
  }
  return "unknown";
}

Distribution distribution_from_name(const std::string& name) {
  if (name == "normal") return Distribution::kNormal;
  if (name == "logistic") return Distribution::kLogistic;
  if (name == "extreme") return Distribution::kExtreme;
  throw std::invalid_argument("unknown distribution: '" + name +
                              "' (expected normal, logistic or extreme)");
}

}  // namespace aftboost
