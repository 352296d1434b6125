#ifndef AFTBOOST_LOSS_HPP_
#define AFTBOOST_LOSS_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aftboost/distributions.hpp"

namespace aftboost {

enum class Censoring { kUncensored, kRight, kLeft, kInterval };

// Ranged survival-time label [lower, upper]. The censoring class is derived
// from the bounds, never stored:
//   lower == upper            -> uncensored
//   upper == +inf             -> right-censored
//   lower == 0, upper finite  -> left-censored
//   otherwise                 -> interval-censored
struct LabelRange {
  double lower = 0.0;
  double upper = 0.0;

  bool valid() const {
    return lower >= 0.0 && lower <= upper && std::isfinite(lower);
  }
};

Censoring classify_censoring(const LabelRange& label);
const char* censoring_name(Censoring c);

struct AftParams {
  Distribution dist = Distribution::kNormal;
  double sigma = 1.0;
  double epsilon = 1e-12;       // floor for the CDF difference / PDF term
  double grad_clip = 15.0;
  double hessian_floor = 1e-16;
};

struct LossDerivatives {
  double loss = 0.0;
  double gradient = 0.0;
  double hessian = 0.0;
  // True when the limit values were substituted for the raw formulas.
  bool limit_substituted = false;
  // True when the gradient clip changed the gradient value.
  bool clip_active = false;
};

// s(y) = (ln y - u)/sigma, with link(0) = -inf and link(+inf) = +inf.
double link(double y, double u, double sigma);

// Negative log-likelihood of one ranged label at margin u. Always finite.
// Throws std::invalid_argument for an uncensored label with y = 0.
double aft_loss(const LabelRange& label, double u, const AftParams& params);

// Loss, gradient and hessian at margin u, regularized so that every field is
// finite, |gradient| <= grad_clip and hessian >= hessian_floor.
LossDerivatives aft_grad_hess(const LabelRange& label, double u,
                              const AftParams& params);

// Gradient/hessian limits as u diverges, with sigma substituted.
// direction > 0 selects u -> +inf, direction < 0 selects u -> -inf.
struct LimitPair {
  double gradient;
  double hessian;
};
LimitPair limit_derivatives(Distribution dist, Censoring censoring,
                            int direction, double sigma);

}  // namespace aftboost

#endif  // AFTBOOST_LOSS_HPP_
