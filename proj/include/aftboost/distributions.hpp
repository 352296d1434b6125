#ifndef AFTBOOST_DISTRIBUTIONS_HPP_
#define AFTBOOST_DISTRIBUTIONS_HPP_

#include <string>

namespace aftboost {

// Candidate distributions for the standardized residual Z of the AFT model.
enum class Distribution { kNormal, kLogistic, kExtreme };

// "extreme" is the Gumbel (minimum) distribution.
double pdf(Distribution dist, double z);
double cdf(Distribution dist, double z);

// 1 - cdf(z), computed without cancellation in the upper tail.
double survival(Distribution dist, double z);

// cdf(hi) - cdf(lo), evaluated through the tail that keeps precision. The
// naive difference loses all significant digits once both CDFs are near 1.
double cdf_diff(Distribution dist, double lo, double hi);

// First and second derivatives of the PDF with respect to z.
double pdf_prime(Distribution dist, double z);
double pdf_double_prime(Distribution dist, double z);

// Serialized names: "normal", "logistic", "extreme".
const char* distribution_name(Distribution dist);
Distribution distribution_from_name(const std::string& name);

}  // namespace aftboost

#endif  // AFTBOOST_DISTRIBUTIONS_HPP_
