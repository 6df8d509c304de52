#include "kglab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kglab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogPi = 1.1447298858494001741;
constexpr double kLog2 = std::numbers::ln2;
constexpr double kLog2Pi = kLog2 + kLogPi;

double sq(double x) { return x * x; }

// log(1 - (1 - q)^k), clamped to 0 once q >= 1.
double log_one_minus_confidence(const InstanceConstants& c, double s) {
  const double q = q_fn(c, s);
  if (q >= 1.0) return 0.0;
  const double one_minus = -std::expm1(static_cast<double>(c.k) * std::log1p(-q));
  if (one_minus > 0.0) return std::log(one_minus);
  return std::log(static_cast<double>(c.k)) + log_q_fn(c, s);
}

void require_valid(const RhoBounds& rho, const char* fn) {
  if (rho.arms.empty()) throw ValidationError(std::string(fn) + ": empty rho envelope");
}

double log_pe_upper(const InstanceConstants& c, const RhoBounds& rho, double log_scale) {
  const double t = rho.t;
  const double k = static_cast<double>(c.k);
  const double sb = c.stds[c.best];
  const double dmin = c.delta_min;
  const double s_up = 1.0 + rho.sum_upper;
  const double log_t = std::log(t);
  const double t34 = std::pow(t, 0.75);
  const double k34 = std::pow(k, 0.75);
  const double log_k38 = 0.375 * std::log(k);
  const double log_cq = log_one_minus_confidence(c, 0.75 * t);

  std::vector<double> terms;
  terms.reserve(2 * c.k);
  // sigma_b sqrt(2 S) / (dmin sqrt(pi t)) exp(-dmin^2 t / (8 sigma_b^2 S))
  terms.push_back(std::log(sb) + 0.5 * std::log(2.0 * s_up) - std::log(dmin) - 0.5 * (kLogPi + log_t) -
                  sq(dmin) * t / (8.0 * sq(sb) * s_up));
  // sqrt2 k^{3/8} sigma_b / (sqrt(pi) dmin t^{3/8}) [1-(1-q)^k] exp(-dmin^2 t^{3/4} / (8 sigma_b^2 k^{3/4}))
  terms.push_back(0.5 * kLog2 + log_k38 + std::log(sb) - 0.5 * kLogPi - std::log(dmin) - 0.375 * log_t + log_cq -
                  sq(dmin) * t34 / (8.0 * sq(sb) * k34));
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) continue;
    const double si = c.stds[i];
    const double g = c.gaps[i] - 0.5 * dmin;
    const double rlo = rho.arms[i].lower;
    terms.push_back(std::log(si) + 0.5 * std::log(s_up) - std::log(g) - 0.5 * (kLog2Pi + std::log(rlo) + log_t) -
                    sq(g) * rlo * t / (2.0 * sq(si) * s_up));
    terms.push_back(log_k38 + std::log(si) + log_cq - 0.5 * kLog2Pi - std::log(g) - 0.375 * log_t -
                    sq(g) * t34 / (2.0 * sq(si) * k34));
  }
  for (double& term : terms) term += log_scale;
  return log_sum_exp(terms);
}

double log_pe_lower(const InstanceConstants& c, const RhoBounds& rho, PeLowerForm form) {
  const double t = rho.t;
  const double q = q_fn(c, 0.75 * t);
  if (q >= 1.0) return -std::numeric_limits<double>::infinity();
  const double log_prefactor = 2.0 * static_cast<double>(c.k) * std::log1p(-q) - kLog2Pi;

  const double sb = c.stds[c.best];
  const double dmin = c.delta_min;
  const double s_up = 1.0 + rho.sum_upper;
  const double s_lo = 1.0 + rho.sum_lower;
  const bool derivation = form == PeLowerForm::kDerivation;

  double worst = std::numeric_limits<double>::infinity();
  for (ArmIndex j = 0; j < c.k; ++j) {
    if (j == c.best) continue;
    const double sj = c.stds[j];
    const double g = c.gaps[j] - 0.5 * dmin;
    const double rlo = rho.arms[j].lower;
    const double rup = rho.arms[j].upper;

    const double a_num = dmin / (2.0 * sj) * std::sqrt((derivation ? rlo * t : rlo) / s_up);
    const double a_den = 1.0 + sq(dmin) * rup * t / (4.0 * sq(sj) * s_lo);
    const double b_num = g * (derivation ? std::sqrt(t) : t) / (sb * std::sqrt(s_up));
    const double b_den = 1.0 + sq(g) * t / (sq(sb) * s_lo);
    const double exponent = sq(dmin) * rup * t / (8.0 * sq(sj) * s_lo) + sq(g) * t / (2.0 * sq(sb) * s_lo);

    const double log_term =
        std::log(a_num) - std::log(a_den) + std::log(b_num) - std::log(b_den) - exponent;
    worst = std::min(worst, log_term);
  }
  return log_prefactor + worst;
}

std::uint64_t checked_floor(const InstanceConstants& c, std::uint64_t n, Ratio a) {
  if (a.den == 0 || a.num == 0) throw ValidationError("fixed-rate bounds: alpha0 must be a positive fraction");
  if (a.num > a.den / c.k) throw ValidationError("fixed-rate bounds: alpha0 must not exceed 1/k");
  if (n != 0 && a.num > std::numeric_limits<std::uint64_t>::max() / n) {
    throw ValidationError("fixed-rate bounds: alpha0 numerator times n overflows");
  }
  const std::uint64_t m = a.num * n / a.den;
  if (m == 0) throw ValidationError("fixed-rate bounds: floor(alpha0 n) must be at least 1");
  return m;
}

std::uint64_t checked_floor(const InstanceConstants& c, std::uint64_t n, double a) {
  if (!(a > 0.0) || a * static_cast<double>(c.k) > 1.0) {
    throw ValidationError("fixed-rate bounds: alpha0 must lie in (0, 1/k]");
  }
  const double m = std::floor(a * static_cast<double>(n));
  if (m < 1.0) throw ValidationError("fixed-rate bounds: floor(alpha0 n) must be at least 1");
  return static_cast<std::uint64_t>(m);
}

FixedRateBounds fixed_rate(const InstanceConstants& c, std::uint64_t n, std::uint64_t m, double log_upper_scale,
                           double log_lower_scale) {
  const double sb = c.stds[c.best];
  const double dmin = c.delta_min;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  std::vector<double> terms;
  terms.push_back(0.5 * kLog2 + std::log(sb) - 0.5 * (kLogPi + std::log(md)) - std::log(dmin) -
                  sq(dmin) * md / (8.0 * sq(sb)));
  double worst = std::numeric_limits<double>::infinity();
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) continue;
    const double si = c.stds[i];
    const double g = c.gaps[i] - 0.5 * dmin;
    terms.push_back(std::log(si) - 0.5 * (kLog2Pi + std::log(md)) - std::log(g) - sq(g) * md / (2.0 * sq(si)));

    const double first = std::log(dmin) - std::log(2.0 * std::sqrt(2.0 * kPi) * si * (1.0 + sq(dmin) * nd / (4.0 * sq(si))));
    const double second = std::log(g * md) - std::log(std::sqrt(2.0 * kPi) * sb * (1.0 + sq(g) * nd / sq(sb)));
    const double exponent = (sq(dmin) / (8.0 * sq(si)) + sq(g) / (2.0 * sq(sb))) * nd;
    worst = std::min(worst, first + second - exponent);
  }
  FixedRateBounds out;
  out.floor_alpha_n = m;
  out.upper = {log_sum_exp(terms) + log_upper_scale};
  out.lower = {worst + log_lower_scale};
  return out;
}

}  // namespace

double log_q_fn(const InstanceConstants& c, double s) {
  if (!(s > 0.0)) throw ValidationError("q: argument must be positive");
  const double k = static_cast<double>(c.k);
  const double smax = c.sigma_max;
  return std::log(4.0 * smax) - 0.125 * std::log(k) - 0.125 * std::log(s) -
         std::pow(k, 0.25) * std::pow(s, 0.25) / (8.0 * sq(smax));
}

double q_fn(const InstanceConstants& c, double s) { return std::exp(log_q_fn(c, s)); }

RhoBound rho_bounds(const InstanceConstants& c, ArmIndex i, double t) {
  if (i >= c.k) throw ValidationError("rho_bounds: arm index out of range");
  if (i == c.best) throw ValidationError("rho_bounds: the best arm has no envelope");
  if (!(t >= 1.0)) throw ValidationError("rho_bounds: t must be >= 1");

  const double k = static_cast<double>(c.k);
  const double sb = c.stds[c.best];
  const double si = c.stds[i];
  const double top_gap = c.means[c.best] - c.second_best_mean;
  const double gap = c.gaps[i];
  const double ln_term = c.log_spread_term;

  const double shift_34 = std::pow(0.75 * t, -0.25);  // (3t/4)^{-1/4}
  const double shift = std::pow(t, -0.25);            // t^{-1/4}
  const double infl_34 = 1.0 + std::pow(0.75 * t / k, -0.75);
  const double infl = 1.0 + std::pow(t / k, -0.75);
  const double extra_34 = 16.0 * k / std::sqrt(3.0 * t) + 8.0 * k * ln_term / (3.0 * t);
  const double extra = 8.0 * k / std::sqrt(t) + 2.0 * k * ln_term / t;

  RhoBound r;
  r.lower1 = (top_gap - shift_34) / (sq(infl_34) * sb) / std::sqrt(sq(gap + shift_34) / sq(si) + extra_34);
  r.lower2 = (top_gap - shift) / (infl * sb) / std::sqrt(sq(gap + shift) / sq(si) + extra);
  r.upper1 = infl * si / (gap - shift) * std::sqrt(sq(top_gap + shift) / sq(sb) + extra);
  r.upper2 = sq(infl_34) * si / (gap - shift_34) * std::sqrt(sq(top_gap + shift_34) / sq(sb) + extra_34);
  r.lower = std::min(r.lower1, r.lower2);
  r.upper = std::max(r.upper1, r.upper2);
  r.valid = top_gap - shift_34 > 0.0 && top_gap - shift > 0.0 && gap - shift > 0.0 && gap - shift_34 > 0.0;
  return r;
}

RhoBounds rho_envelopes(const InstanceConstants& c, double t) {
  RhoBounds rho;
  rho.t = t;
  rho.valid = true;
  rho.arms.resize(c.k);
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) {
      rho.arms[i] = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, true};
      continue;
    }
    rho.arms[i] = rho_bounds(c, i, t);
    rho.sum_lower += rho.arms[i].lower;
    rho.sum_upper += rho.arms[i].upper;
    rho.valid = rho.valid && rho.arms[i].valid;
  }
  return rho;
}

std::optional<AlphaBounds> alpha_bounds(const InstanceConstants& c, const RhoBounds& rho) {
  require_valid(rho, "alpha_bounds");
  if (!rho.valid) return std::nullopt;
  AlphaBounds a;
  a.lower.resize(c.k);
  a.upper.resize(c.k);
  const double den_lo = 1.0 + rho.sum_upper;
  const double den_hi = 1.0 + rho.sum_lower;
  for (ArmIndex i = 0; i < c.k; ++i) {
    a.lower[i] = rho.arms[i].lower / den_lo;
    a.upper[i] = rho.arms[i].upper / den_hi;
  }
  return a;
}

std::optional<LogValue> pe_upper(const InstanceConstants& c, const RhoBounds& rho) {
  require_valid(rho, "pe_upper");
  if (!rho.valid) return std::nullopt;
  return LogValue{log_pe_upper(c, rho, 0.0)};
}

std::optional<LogValue> sr_upper(const InstanceConstants& c, const RhoBounds& rho) {
  require_valid(rho, "sr_upper");
  if (!rho.valid) return std::nullopt;
  return LogValue{log_pe_upper(c, rho, std::log(c.delta_max))};
}

std::optional<LogValue> pe_lower(const InstanceConstants& c, const RhoBounds& rho, PeLowerForm form) {
  require_valid(rho, "pe_lower");
  if (!rho.valid) return std::nullopt;
  return LogValue{log_pe_lower(c, rho, form)};
}

std::optional<LogValue> sr_lower(const InstanceConstants& c, const RhoBounds& rho, PeLowerForm form) {
  require_valid(rho, "sr_lower");
  if (!rho.valid) return std::nullopt;
  return LogValue{log_pe_lower(c, rho, form) + std::log(c.delta_min)};
}

std::optional<double> cr_upper(const InstanceConstants& c, const RhoBounds& rho) {
  require_valid(rho, "cr_upper");
  if (!rho.valid) return std::nullopt;
  const double t = rho.t;
  const double q = q_fn(c, 0.75 * t);
  double weighted = 0.0;
  double gap_sum = 0.0;
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) continue;
    weighted += c.gaps[i] * rho.arms[i].upper;
    gap_sum += c.gaps[i];
  }
  return weighted / (1.0 + rho.sum_lower) * t + static_cast<double>(c.k) * gap_sum * q * t;
}

double cr_rate_limit(const InstanceConstants& c) {
  const double top_gap = c.means[c.best] - c.second_best_mean;
  double sigma_sum = 0.0;
  double den = c.stds[c.best] / top_gap;
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) continue;
    sigma_sum += c.stds[i];
    den += c.stds[i] / c.gaps[i];
  }
  return sigma_sum / den;
}

BoundSet evaluate_bounds(const InstanceConstants& c, std::uint64_t t, PeLowerForm form) {
  if (t == 0) throw ValidationError("evaluate_bounds: t must be >= 1");
  BoundSet out;
  out.t = t;
  const double td = static_cast<double>(t);
  out.rho = rho_envelopes(c, td);
  out.q = q_fn(c, 0.75 * td);
  out.vacuous = out.q >= 1.0;
  out.confidence = out.vacuous ? 0.0 : std::clamp(std::pow(1.0 - out.q, static_cast<double>(c.k)), 0.0, 1.0);
  out.alpha = alpha_bounds(c, out.rho);
  out.pe_upper = pe_upper(c, out.rho);
  out.sr_upper = sr_upper(c, out.rho);
  out.pe_lower = pe_lower(c, out.rho, form);
  out.sr_lower = sr_lower(c, out.rho, form);
  out.cr_upper = cr_upper(c, out.rho);
  return out;
}

AsymptoticProfile asymptotic_profile(const InstanceConstants& c) {
  AsymptoticProfile p;
  const double sb = c.stds[c.best];
  const double top_gap = c.means[c.best] - c.second_best_mean;
  const double dmin = c.delta_min;
  p.ratio_to_best.resize(c.k);
  double total = 0.0;
  for (ArmIndex i = 0; i < c.k; ++i) {
    p.ratio_to_best[i] = i == c.best ? 1.0 : c.stds[i] * top_gap / (sb * c.gaps[i]);
    total += p.ratio_to_best[i];
  }
  p.alpha_limits.resize(c.k);
  for (ArmIndex i = 0; i < c.k; ++i) p.alpha_limits[i] = p.ratio_to_best[i] / total;
  p.cr_rate = cr_rate_limit(c);

  p.pe_upper_rate = sq(dmin) / (8.0 * sq(sb) * total);
  p.pe_lower_rate = 0.0;
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i == c.best) continue;
    const double si = c.stds[i];
    const double g = c.gaps[i] - 0.5 * dmin;
    const double r = p.ratio_to_best[i];
    p.pe_upper_rate = std::min(p.pe_upper_rate, sq(g) * r / (2.0 * sq(si) * total));
    p.pe_lower_rate = std::max(p.pe_lower_rate, sq(dmin) * r / (8.0 * sq(si) * total) + sq(g) / (2.0 * sq(sb) * total));
  }
  return p;
}

double pairwise_ratio_limit(const InstanceConstants& c, ArmIndex i1, ArmIndex i2) {
  if (i1 >= c.k || i2 >= c.k || i1 == c.best || i2 == c.best) {
    throw ValidationError("pairwise_ratio_limit: both arms must be valid non-best arms");
  }
  return c.stds[i1] * c.gaps[i2] / (c.stds[i2] * c.gaps[i1]);
}

FixedRateBounds fixed_rate_pe_bounds(const InstanceConstants& c, std::uint64_t n, Ratio alpha0) {
  return fixed_rate(c, n, checked_floor(c, n, alpha0), 0.0, 0.0);
}

FixedRateBounds fixed_rate_sr_bounds(const InstanceConstants& c, std::uint64_t n, Ratio alpha0) {
  return fixed_rate(c, n, checked_floor(c, n, alpha0), std::log(c.delta_max), std::log(c.delta_min));
}

FixedRateBounds fixed_rate_pe_bounds(const InstanceConstants& c, std::uint64_t n, double alpha0) {
  return fixed_rate(c, n, checked_floor(c, n, alpha0), 0.0, 0.0);
}

FixedRateBounds fixed_rate_sr_bounds(const InstanceConstants& c, std::uint64_t n, double alpha0) {
  return fixed_rate(c, n, checked_floor(c, n, alpha0), std::log(c.delta_max), std::log(c.delta_min));
}

}  // namespace kglab
