#pragma once

// Scalar Gaussian kernels used by the KG acquisition and by every bound.
//
// f(x) = x*Phi(x) + phi(x) is the expected-improvement kernel. The acquisition
// only ever needs f at non-positive arguments, where it decays like
// phi(x)/x^2 and underflows near x = 38, so the tail is owned here in log
// form (LogValue) and downstream code never exponentiates it.

#include <cmath>
#include <limits>
#include <span>

namespace kglab {

/// Natural log of a non-negative quantity; -inf encodes zero.
struct LogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();

  static LogValue zero() { return {}; }
  static LogValue from_linear(double v);

  double value() const { return std::exp(log_magnitude); }
  bool is_zero() const { return std::isinf(log_magnitude) && log_magnitude < 0; }

  friend LogValue operator*(LogValue a, LogValue b) {
    return {a.log_magnitude + b.log_magnitude};
  }
  friend auto operator<=>(const LogValue&, const LogValue&) = default;
};

/// log(sum_i exp(terms[i])), tolerant of -inf entries. Returns -inf for an
/// empty span or all -inf terms.
double log_sum_exp(std::span<const double> terms);

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

/// Crossover between direct evaluation and the asymptotic Mills-ratio series.
inline constexpr double kTailCrossover = 8.0;

double norm_pdf(double x);
double norm_log_pdf(double x);

/// Standard normal CDF. Relative error <= 1e-12 for |x| <= 8; underflows to
/// zero below about -38 (use norm_log_cdf there).
double norm_cdf(double x);

/// log Phi(x), finite for every finite x.
double norm_log_cdf(double x);

/// f(x) = x Phi(x) + phi(x). Strictly positive and increasing; satisfies
/// f(x) - f(-x) = x. Underflows to zero for x below about -38.
double f_kg(double x);

/// log f(-x) for x >= 0. Direct for x <= 8, otherwise
/// log phi(x) - 2 log x + log1p(eps(x)) with eps the Mills-ratio series
/// sum_{m>=1} (-1)^m (2m+1)!! / x^{2m}.
LogValue log_f_neg(double x);

struct FEnvelope {
  LogValue lower;  // phi(x) / x^3
  LogValue upper;  // phi(x) / x^2
};

/// The envelope phi(x)/x^3 < f(-x) < phi(x)/x^2, defined for x >= 2.
FEnvelope f_envelope(double x);

}  // namespace kglab
