#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gen.hpp"
#include "kglab/error.hpp"
#include "kglab/math_kernel.hpp"

using namespace kglab;

namespace {

// Frozen mpmath values (tests/oracles/reference_values.py, 50 digits).
constexpr double kPhi0 = 0.39894228040143267794;
constexpr double kPhi2 = 0.053990966513188051951;
constexpr double kF_m1_41421356 = 0.035535327379859483486;
constexpr double kF_m3 = 0.00038215431704772359565;
constexpr double kF_3 = 3.0003821543170477236;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Independent long-double route for f(-x) used by the consistency property.
long double f_neg_direct(long double x) {
  const long double phi = std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::acos(-1.0L));
  const long double cdf = 0.5L * std::erfc(x / std::sqrt(2.0L));
  return phi - x * cdf;
}

}  // namespace

TEST(NormPdf, KnownValues) {
  EXPECT_NEAR(norm_pdf(0.0), kPhi0, 1e-15);
  EXPECT_NEAR(norm_pdf(2.0), kPhi2, 1e-16);
  EXPECT_DOUBLE_EQ(norm_pdf(-2.0), norm_pdf(2.0));
  EXPECT_EQ(norm_pdf(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(NormPdf, LogMatchesLinear) {
  for (double x : gen::linspace(-30.0, 30.0, 121)) {
    EXPECT_NEAR(norm_log_pdf(x), std::log(norm_pdf(x)), 1e-12 * std::max(1.0, std::fabs(norm_log_pdf(x)))) << x;
  }
}

TEST(NormCdf, QuantileRoundTrip) {
  EXPECT_NEAR(norm_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_DOUBLE_EQ(norm_cdf(0.0), 0.5);
  EXPECT_EQ(norm_cdf(std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_EQ(norm_cdf(-std::numeric_limits<double>::infinity()), 0.0);
}

TEST(NormCdf, SymmetryProperty) {
  for (double x : gen::linspace(-8.0, 8.0, 1601)) {
    EXPECT_NEAR(norm_cdf(x) + norm_cdf(-x), 1.0, 1e-13) << x;
  }
}

TEST(NormCdf, LogDeepTail) {
  EXPECT_NEAR(norm_log_cdf(-40.0), -804.60844201375378817, 1e-10);
  EXPECT_NEAR(norm_log_cdf(-10.0), -53.231285150512470578, 1e-11);
  EXPECT_NEAR(norm_log_cdf(0.0), std::log(0.5), 1e-15);
  // continuity across the series crossover
  EXPECT_NEAR(norm_log_cdf(-kTailCrossover - 1e-9), norm_log_cdf(-kTailCrossover + 1e-9), 1e-7);
}

TEST(FKg, FrozenValues) {
  EXPECT_LT(rel(f_kg(-1.41421356), kF_m1_41421356), 1e-12);
  EXPECT_LT(rel(f_kg(-3.0), kF_m3), 1e-12);
  EXPECT_LT(rel(f_kg(3.0), kF_3), 1e-14);
  EXPECT_NEAR(f_kg(0.0), kPhi0, 1e-16);
}

TEST(FKg, TailLimits) {
  EXPECT_EQ(f_kg(-std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_GT(f_kg(-30.0), 0.0);
  EXPECT_NEAR(f_kg(50.0), 50.0, 1e-12);
}

TEST(FKg, IdentityProperty) {
  for (double x : gen::linspace(-8.0, 8.0, 1000)) {
    EXPECT_NEAR(f_kg(x) - f_kg(-x), x, 1e-10) << x;
  }
}

TEST(FKg, MonotoneProperty) {
  const auto grid = gen::linspace(-10.0, 10.0, 4001);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_GT(f_kg(grid[i]), f_kg(grid[i - 1])) << grid[i];
  }
}

TEST(FKg, NanRejected) {
  EXPECT_THROW(f_kg(std::numeric_limits<double>::quiet_NaN()), ValidationError);
  EXPECT_THROW(norm_cdf(std::numeric_limits<double>::quiet_NaN()), ValidationError);
}

TEST(LogFNeg, FrozenValues) {
  struct Case {
    double x, expected;
  };
  const Case cases[] = {{2.0, -4.7687835239171141569},   {8.0, -37.122364261692633},
                        {10.0, -55.553122036122355927},  {20.0, -206.91783850942509785},
                        {40.0, -808.29856835661996024},  {50.0, -1258.7441828684608531},
                        {100.0, -5010.1295788002497923}, {300.0, -45012.326536814554207}};
  for (const auto& c : cases) {
    EXPECT_NEAR(log_f_neg(c.x).log_magnitude, c.expected, 1e-12 * std::fabs(c.expected)) << c.x;
  }
}

TEST(LogFNeg, LeadingTermIsOnlyAsymptotic) {
  // log phi(40) - 2 log 40 is the leading term; the true value sits 1.87e-3 below it.
  const double leading = norm_log_pdf(40.0) - 2.0 * std::log(40.0);
  EXPECT_NEAR(leading, -808.29669744143254535, 1e-10);
  EXPECT_NEAR(log_f_neg(40.0).log_magnitude - leading, -1.870915e-3, 1e-8);
}

TEST(LogFNeg, ContinuousAtCrossover) {
  const double below = log_f_neg(kTailCrossover - 1e-10).log_magnitude;
  const double above = log_f_neg(kTailCrossover + 1e-10).log_magnitude;
  EXPECT_NEAR(below, above, 1e-8);
}

TEST(LogFNeg, MatchesLongDoubleRouteProperty) {
  gen::Source src(11);
  for (int n = 0; n < 500; ++n) {
    const double x = src.uniform(0.0, 30.0);
    const long double direct = f_neg_direct(x);
    EXPECT_LT(std::fabs(log_f_neg(x).value() / static_cast<double>(direct) - 1.0), 1e-9) << "case " << n << " x=" << x;
    if (x <= 25.0) {
      EXPECT_LT(rel(log_f_neg(x).value(), f_kg(-x)), 1e-9) << x;
    }
  }
}

TEST(LogFNeg, Edges) {
  EXPECT_NEAR(log_f_neg(0.0).value(), kPhi0, 1e-15);
  EXPECT_THROW(log_f_neg(-0.5), ValidationError);
  EXPECT_TRUE(log_f_neg(std::numeric_limits<double>::infinity()).is_zero());
  EXPECT_TRUE(std::isfinite(log_f_neg(1e8).log_magnitude));
}

TEST(FEnvelope, FrozenEnvelopeAtTwo) {
  const auto env = f_envelope(2.0);
  EXPECT_LT(rel(env.lower.value(), 0.0067488708141485064938), 1e-13);
  EXPECT_LT(rel(env.upper.value(), 0.013497741628297012988), 1e-13);
  EXPECT_THROW(f_envelope(1.5), ValidationError);
}

TEST(FEnvelope, DirectSandwichProperty) {
  for (double x : gen::linspace(2.0, 37.0, 351)) {
    const double phi = norm_pdf(x);
    const double f = f_kg(-x);
    EXPECT_LT(phi / (x * x * x), f) << x;
    EXPECT_LT(f, phi / (x * x)) << x;
  }
}

TEST(FEnvelope, LogSandwichProperty) {
  for (double x : gen::linspace(8.0, 300.0, 500)) {
    const auto env = f_envelope(x);
    const auto f = log_f_neg(x);
    EXPECT_LT(env.lower, f) << x;
    EXPECT_LT(f, env.upper) << x;
  }
}

TEST(LogValue, Arithmetic) {
  const auto a = LogValue::from_linear(3.0);
  const auto b = LogValue::from_linear(0.5);
  EXPECT_NEAR((a * b).value(), 1.5, 1e-15);
  EXPECT_TRUE(LogValue::from_linear(0.0).is_zero());
  EXPECT_TRUE(LogValue::zero() < b);
  EXPECT_THROW(LogValue::from_linear(-1.0), ValidationError);
}

TEST(LogSumExp, StableAndExact) {
  const std::vector<double> big = {-1e6, -1e6};
  EXPECT_NEAR(log_sum_exp(big), -1e6 + std::log(2.0), 1e-9);
  const std::vector<double> mixed = {std::log(1.0), std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(mixed), std::log(6.0), 1e-15);
  const std::vector<double> none;
  EXPECT_EQ(log_sum_exp(none), -std::numeric_limits<double>::infinity());
  const std::vector<double> zeros = {-std::numeric_limits<double>::infinity()};
  EXPECT_EQ(log_sum_exp(zeros), -std::numeric_limits<double>::infinity());
}
