#pragma once

#include <cmath>
#include <limits>

#include "sparsek/common.hpp"

namespace sparsek {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

inline double gaussian_pdf(double t) { return std::exp(-0.5 * t * t - kLogSqrt2Pi); }

// Upper tail of the standard normal: Pr[N(0,1) >= t].
inline double gaussian_tail(double t) { return 0.5 * std::erfc(t / kSqrt2); }

// log of the upper tail; usable far past double underflow of the tail itself.
inline double gaussian_tail_log(double t) {
  if (t < 8.0) return std::log(gaussian_tail(t));
  // Mills-ratio asymptotics: tail = pdf(t)/t * (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...)
  const double inv2 = 1.0 / (t * t);
  const double series = 1.0 - inv2 * (1.0 - inv2 * (3.0 - 15.0 * inv2));
  return -0.5 * t * t - kLogSqrt2Pi - std::log(t) + std::log(series);
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile, |err| < 1.2e-9.
inline double norm_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse upper tail in log form: returns t with log(gaussian_tail(t)) = log_p.
// Handles arbitrarily small tails (log_p << log(DBL_MIN)).
inline double gaussian_tail_inv_log(double log_p) {
  if (!(log_p < 0.0)) throw BadParams("gaussian_tail_inv_log: log_p must be negative");
  double t;
  if (log_p > -690.0 && std::exp(log_p) > 1e-280) {
    t = -detail::norm_quantile_approx(std::exp(log_p));
  } else {
    // asymptotic seed: log tail ~ -t^2/2 - log t - log sqrt(2 pi)
    t = std::sqrt(-2.0 * log_p);
    for (int i = 0; i < 4; ++i)
      t = std::sqrt(2.0 * (-log_p - std::log(t) - kLogSqrt2Pi));
  }
  // Newton on g(t) = log tail(t) - log_p; g'(t) = -pdf/tail.
  for (int i = 0; i < 3; ++i) {
    const double lt = gaussian_tail_log(t);
    const double log_pdf = -0.5 * t * t - kLogSqrt2Pi;
    t += (lt - log_p) * std::exp(lt - log_pdf);
  }
  return t;
}

// Inverse upper tail: t with gaussian_tail(t) = p, p in (0,1).
inline double gaussian_tail_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw BadParams("gaussian_tail_inv: p must be in (0,1)");
  if (p < 1e-280) return gaussian_tail_inv_log(std::log(p));
  double t = -detail::norm_quantile_approx(p);
  for (int i = 0; i < 2; ++i) t += (gaussian_tail(t) - p) / gaussian_pdf(t);
  return t;
}

// Mean of N(0,1) conditioned on exceeding t.
inline double truncated_tail_mean(double t) {
  return std::exp(-0.5 * t * t - kLogSqrt2Pi - gaussian_tail_log(t));
}

}  // namespace sparsek
