#include "kglab/math_kernel.hpp"

#include <algorithm>
#include <string>

#include "kglab/error.hpp"

namespace kglab {
namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

void require_not_nan(double x, const char* fn) {
  if (std::isnan(x)) {
    throw ValidationError(std::string(fn) + ": NaN argument");
  }
}

// Sum of the alternating asymptotic series sum_{m>=0} (-1)^m c_m / x^{2m}
// where c_m = prod_{j=1..m} (2j + offset). offset = -1 gives x * Phi(-x) /
// phi(x); offset = +1 gives x^2 f(-x) / phi(x). Truncated at the smallest term.
double mills_series(double x, int offset) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    const double next = -term * (2.0 * m + offset) * inv_x2;
    if (std::fabs(next) >= std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace

LogValue LogValue::from_linear(double v) {
  if (std::isnan(v) || v < 0.0) {
    throw ValidationError("LogValue::from_linear: expected a non-negative value");
  }
  return {std::log(v)};
}

double log_sum_exp(std::span<const double> terms) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

double norm_pdf(double x) {
  require_not_nan(x, "norm_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_log_pdf(double x) {
  require_not_nan(x, "norm_log_pdf");
  return -0.5 * x * x - kLogSqrt2Pi;
}

double norm_cdf(double x) {
  require_not_nan(x, "norm_cdf");
  if (x < 0.0) return 0.5 * std::erfc(-x * kInvSqrt2);
  return 1.0 - 0.5 * std::erfc(x * kInvSqrt2);
}

double norm_log_cdf(double x) {
  require_not_nan(x, "norm_log_cdf");
  if (x < -kTailCrossover) {
    const double ax = -x;
    return norm_log_pdf(ax) - std::log(ax) + std::log(mills_series(ax, -1));
  }
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  return std::log(norm_cdf(x));
}

double f_kg(double x) {
  require_not_nan(x, "f_kg");
  if (x < -kTailCrossover) return log_f_neg(-x).value();
  return x * norm_cdf(x) + norm_pdf(x);
}

LogValue log_f_neg(double x) {
  require_not_nan(x, "log_f_neg");
  if (x < 0.0) throw ValidationError("log_f_neg: argument must be >= 0");
  if (x <= kTailCrossover) return {std::log(f_kg(-x))};
  const double eps_sum = mills_series(x, +1);
  return {norm_log_pdf(x) - 2.0 * std::log(x) + std::log(eps_sum)};
}

FEnvelope f_envelope(double x) {
  require_not_nan(x, "f_envelope");
  if (x < 2.0) throw ValidationError("f_envelope: requires x >= 2");
  const double lp = norm_log_pdf(x);
  const double lx = std::log(x);
  return {LogValue{lp - 3.0 * lx}, LogValue{lp - 2.0 * lx}};
}

}  // namespace kglab
