#include "aftboost/loss.hpp"

#include <algorithm>
#include <cmath>

namespace aftboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gradient/hessian limits as u -> -inf / +inf (sigma substituted by caller).
// Entries use sentinel codes: kG15 = +-15, kInvS = 1/sigma, kInvS2 = 1/sigma^2,
// kFloor = 1e-16.
struct LimitEntry {
  double grad_neg, hess_neg;  // u -> -inf
  double grad_pos, hess_pos;  // u -> +inf
};

inline double guarded_exp(double x) { return std::exp(std::min(x, 700.0)); }

}  // namespace

Censoring classify_censoring(const LabelRange& label) {
  if (label.lower == label.upper) return Censoring::kUncensored;
  if (std::isinf(label.upper)) return Censoring::kRight;
  if (label.lower == 0.0) return Censoring::kLeft;
  return Censoring::kInterval;
}

const char* censoring_name(Censoring c) {
  switch (c) {
    case Censoring::kUncensored: return "uncensored";
    case Censoring::kRight: return "right";
    case Censoring::kLeft: return "left";
    case Censoring::kInterval: return "interval";
  }
  return "unknown";
}

double link(double y, double u, double sigma) {
  if (y == 0.0) return -kInf;
  if (std::isinf(y)) return kInf;
  return (std::log(y) - u) / sigma;
}

LimitPair limit_derivatives(Distribution dist, Censoring censoring,
                            int direction, double sigma) {
  const double inv_s = 1.0 / sigma;
  const double inv_s2 = inv_s * inv_s;
  const double floor = 1e-16;
  const bool neg = direction < 0;
  switch (dist) {
    case Distribution::kNormal:
      switch (censoring) {
        case Censoring::kUncensored:
        case Censoring::kInterval:
          return neg ? LimitPair{-15.0, inv_s2} : LimitPair{15.0, inv_s2};
        case Censoring::kRight:
          return neg ? LimitPair{-15.0, inv_s2} : LimitPair{0.0, floor};
        case Censoring::kLeft:
          return neg ? LimitPair{0.0, floor} : LimitPair{15.0, inv_s2};
      }
      break;
    case Distribution::kLogistic:
      switch (censoring) {
        case Censoring::kUncensored:
        case Censoring::kInterval:
          return neg ? LimitPair{-inv_s, floor} : LimitPair{inv_s, floor};
        case Censoring::kRight:
          return neg ? LimitPair{-inv_s, floor} : LimitPair{0.0, floor};
        case Censoring::kLeft:
          return neg ? LimitPair{0.0, floor} : LimitPair{inv_s, floor};
      }
      break;
    case Distribution::kExtreme:
      switch (censoring) {
        case Censoring::kUncensored:
        case Censoring::kInterval:
          return neg ? LimitPair{-15.0, 15.0} : LimitPair{inv_s, floor};
        case Censoring::kRight:
          return neg ? LimitPair{-15.0, 15.0} : LimitPair{0.0, floor};
        case Censoring::kLeft:
          return neg ? LimitPair{0.0, floor} : LimitPair{inv_s, floor};
      }
      break;
  }
  return LimitPair{0.0, 1e-16};
}

double aft_loss(const LabelRange& label, double u, const AftParams& params) {
  const Censoring c = classify_censoring(label);
  if (c == Censoring::kUncensored) {
    if (label.lower == 0.0) {
      throw std::invalid_argument("uncensored label with y = 0 has no defined loss");
    }
    // -ln[f(s)/(sigma*y)] with the epsilon clamp applied to the pdf factor so
    // the clamp engages exactly when the derivative path substitutes limits,
    // independently of the label magnitude.
    const double s = link(label.lower, u, params.sigma);
    const double f = pdf(params.dist, s);
    return -std::log(std::max(f, params.epsilon)) + std::log(params.sigma) +
           std::log(label.lower);
  }
  const double sl = link(label.lower, u, params.sigma);
  const double su = link(label.upper, u, params.sigma);
  const double diff = cdf_diff(params.dist, sl, su);
  return -std::log(std::max(diff, params.epsilon));
}

LossDerivatives aft_grad_hess(const LabelRange& label, double u,
                              const AftParams& params) {
  const Censoring c = classify_censoring(label);
  const Distribution dist = params.dist;
  const double sigma = params.sigma;

  LossDerivatives out;
  out.loss = aft_loss(label, u, params);

  bool unstable = false;
  int direction = 0;  // -1: u -> -inf limits, +1: u -> +inf limits

  if (c == Censoring::kUncensored) {
    const double s = link(label.lower, u, sigma);
    const double f = pdf(dist, s);
    if (!(f >= params.epsilon)) {
      unstable = true;
      direction = s > 0 ? -1 : 1;
    } else {
      // Closed forms of f'/(sigma f) and -(f f'' - f'^2)/(sigma^2 f^2),
      // simplified per distribution to avoid cancellation.
      switch (dist) {
        case Distribution::kNormal:
          out.gradient = -s / sigma;
          out.hessian = 1.0 / (sigma * sigma);
          break;
        case Distribution::kLogistic:
          out.gradient = -std::tanh(0.5 * s) / sigma;
          out.hessian = 2.0 * f / (sigma * sigma);
          break;
        case Distribution::kExtreme: {
          const double w = guarded_exp(s);
          out.gradient = (1.0 - w) / sigma;
          out.hessian = w / (sigma * sigma);
          break;
        }
      }
    }
  } else {
    const double sl = link(label.lower, u, sigma);
    const double su = link(label.upper, u, sigma);
    const double fl = std::isfinite(sl) ? pdf(dist, sl) : 0.0;
    const double fu = std::isfinite(su) ? pdf(dist, su) : 0.0;
    const double fpl = std::isfinite(sl) ? pdf_prime(dist, sl) : 0.0;
    const double fpu = std::isfinite(su) ? pdf_prime(dist, su) : 0.0;
    const double diff = cdf_diff(dist, sl, su);

    const double grad = (fu - fl) / (sigma * diff);
    const double hess = (-diff * (fpu - fpl) + (fu - fl) * (fu - fl)) /
                        (sigma * sigma * diff * diff);

    // Divergence of the single finite anchor's pdf makes the raw quotient
    // untrustworthy even when the CDF difference stays near 1.
    const double anchor_pdf =
        c == Censoring::kRight ? fl : (c == Censoring::kLeft ? fu : 1.0);

    if (diff < params.epsilon || !std::isfinite(grad) || !std::isfinite(hess) ||
        anchor_pdf < params.epsilon) {
      unstable = true;
      // Sign of the residual at the finite anchor (midpoint for intervals)
      // tells which limit u is heading towards.
      const double s_ref = c == Censoring::kRight
                               ? sl
                               : (c == Censoring::kLeft ? su : 0.5 * (sl + su));
      direction = s_ref > 0 ? -1 : 1;
    } else {
      out.gradient = grad;
      out.hessian = hess;
    }
  }

  if (unstable) {
    const LimitPair lim = limit_derivatives(dist, c, direction, sigma);
    out.gradient = lim.gradient;
    out.hessian = lim.hessian;
    out.limit_substituted = true;
  }

  const double clipped =
      std::clamp(out.gradient, -params.grad_clip, params.grad_clip);
  out.clip_active = clipped != out.gradient;
  out.gradient = clipped;
  out.hessian = std::max(out.hessian, params.hessian_floor);
  return out;
}

}  // namespace aftboost
