#pragma once

// Closed-form finite-time bounds for KG sampling: the pull-ratio envelopes
// rho, sampling-rate bounds, PE/SR upper and lower bounds, the cumulative
// regret bound and its limit rate, the fixed-rate (initial stage) PE/SR
// bounds, and the asymptotic allocation.
//
// All functions are pure in (constants, t). They evaluate the formulas as
// written for any t and report validity instead of deciding whether t is
// past the (uncomputable) threshold beyond which the bounds are claimed.
// Probability-like results come back as LogValue; exponents reach ~1e7 at
// t = 1e9 and are never exponentiated internally.

#include <cstdint>
#include <optional>
#include <vector>

#include "kglab/bandit.hpp"
#include "kglab/math_kernel.hpp"

namespace kglab {

/// q(s) = 4 sigma_max k^{-1/8} s^{-1/8} exp(-k^{1/4} s^{1/4} / (8 sigma_max^2)).
/// Can exceed 1; callers clamp.
double q_fn(const InstanceConstants& c, double s);
double log_q_fn(const InstanceConstants& c, double s);

struct RhoBound {
  double lower1 = 0.0;
  double lower2 = 0.0;
  double upper1 = 0.0;
  double upper2 = 0.0;
  double lower = 0.0;  // min(lower1, lower2)
  double upper = 0.0;  // max(upper1, upper2)
  bool valid = false;  // every numerator/denominator gap term is positive
};

/// Envelope of N_i/N_b for non-best arm i at round t.
RhoBound rho_bounds(const InstanceConstants& c, ArmIndex i, double t);

struct RhoBounds {
  double t = 0.0;
  // Indexed by arm; the best arm's entry is fixed at lower = upper = 1.
  std::vector<RhoBound> arms;
  double sum_lower = 0.0;  // over non-best arms
  double sum_upper = 0.0;
  bool valid = false;  // all non-best entries valid
};

RhoBounds rho_envelopes(const InstanceConstants& c, double t);

struct AlphaBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Sampling-rate bounds; nullopt when rho is not valid.
std::optional<AlphaBounds> alpha_bounds(const InstanceConstants& c, const RhoBounds& rho);

std::optional<LogValue> pe_upper(const InstanceConstants& c, const RhoBounds& rho);
std::optional<LogValue> sr_upper(const InstanceConstants& c, const RhoBounds& rho);

/// The PE lower bound is printed with sqrt(rho_j t / ...) and sqrt(t) factors
/// in its derivation but with sqrt(rho_j / ...) and a bare t in the statement.
/// kDerivation is the default; kStatement is kept for comparison.
enum class PeLowerForm { kDerivation, kStatement };

/// Zero (not nullopt) when q(3t/4) >= 1.
std::optional<LogValue> pe_lower(const InstanceConstants& c, const RhoBounds& rho,
                                 PeLowerForm form = PeLowerForm::kDerivation);
std::optional<LogValue> sr_lower(const InstanceConstants& c, const RhoBounds& rho,
                                 PeLowerForm form = PeLowerForm::kDerivation);

/// R_t < [sum gap_i rho_up_i / (1 + sum rho_lo)] t + k sum gap_i q(3t/4) t.
std::optional<double> cr_upper(const InstanceConstants& c, const RhoBounds& rho);

/// lim R_t / t = sum_{i!=b} sigma_i / (sigma_b / (mu_b - mu_2nd) + sum_{i!=b} sigma_i / gap_i).
double cr_rate_limit(const InstanceConstants& c);

struct BoundSet {
  std::uint64_t t = 0;
  RhoBounds rho;
  std::optional<AlphaBounds> alpha;
  std::optional<LogValue> pe_upper;
  std::optional<LogValue> pe_lower;
  std::optional<LogValue> sr_upper;
  std::optional<LogValue> sr_lower;
  std::optional<double> cr_upper;
  double q = 0.0;           // q(3t/4)
  double confidence = 0.0;  // clamp([1 - q(3t/4)]^k, 0, 1)
  bool vacuous = false;     // q(3t/4) >= 1
};

BoundSet evaluate_bounds(const InstanceConstants& c, std::uint64_t t,
                         PeLowerForm form = PeLowerForm::kDerivation);

struct AsymptoticProfile {
  std::vector<double> ratio_to_best;  // limit N_i / N_b; 1 at the best arm
  std::vector<double> alpha_limits;
  double cr_rate = 0.0;
  // Decay rate of the q-free terms of the PE upper bound. The q-weighted terms
  // of that bound fall off like exp(-c t^{3/4}), so -log(pe_upper)/t itself
  // tends to 0; this field is the rate the remaining terms carry.
  double pe_upper_rate = 0.0;
  double pe_lower_rate = 0.0;  // limit of -log(pe_lower)/t
};

AsymptoticProfile asymptotic_profile(const InstanceConstants& c);

/// Limit of N_{i1}/N_{i2} for two non-best arms.
double pairwise_ratio_limit(const InstanceConstants& c, ArmIndex i1, ArmIndex i2);

/// alpha0 as an exact fraction so floor(alpha0 n) is an integer computation.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

struct FixedRateBounds {
  LogValue lower;
  LogValue upper;
  std::uint64_t floor_alpha_n = 0;
};

/// Two-sided PE/SR bounds for KG with an initial stage guaranteeing
/// N_i >= floor(alpha0 n). Requires 0 < alpha0 <= 1/k and floor(alpha0 n) >= 1.
FixedRateBounds fixed_rate_pe_bounds(const InstanceConstants& c, std::uint64_t n, Ratio alpha0);
FixedRateBounds fixed_rate_sr_bounds(const InstanceConstants& c, std::uint64_t n, Ratio alpha0);
/// Double alpha0: the floor is taken of the nearest-double product alpha0 * n,
/// which can be off by one when alpha0 n lies within half an ulp of an integer.
FixedRateBounds fixed_rate_pe_bounds(const InstanceConstants& c, std::uint64_t n, double alpha0);
FixedRateBounds fixed_rate_sr_bounds(const InstanceConstants& c, std::uint64_t n, double alpha0);

}  // namespace kglab
