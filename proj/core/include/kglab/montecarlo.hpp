#pragma once

// Replication engine for KG runs and the estimators built on top of it.
//
// Replication r always draws from RngStream(seed, r) and the reducer walks
// replications in index order, so every estimate is bit-identical for any
// worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kglab/bandit.hpp"
#include "kglab/bounds.hpp"
#include "kglab/kg_policy.hpp"

namespace kglab {

struct EstimateSeries {
  std::size_t k = 0;
  std::vector<std::uint64_t> checkpoint_rounds;
  std::vector<double> pe_hat;  // share of replications with J_t != b
  std::vector<double> pe_stderr;
  std::vector<double> sr_hat;  // mean of mu_b - mu_{J_t}
  std::vector<double> sr_stderr;
  std::vector<double> cr_hat;  // mean of sum_i gap_i N_{i,t}
  std::vector<double> cr_stderr;
  std::vector<double> alpha_hat;  // checkpoint x arm, mean of N_{i,t}/t
  std::vector<double> alpha_stderr;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  // True when replications < 2; standard errors are then reported as 0.
  bool low_replication = false;
  // Raw traces, kept only when ReplicationOptions::keep_traces is set.
  std::vector<RunTrace> traces;

  double alpha_at(std::size_t checkpoint, ArmIndex arm) const { return alpha_hat[checkpoint * k + arm]; }
  double alpha_stderr_at(std::size_t checkpoint, ArmIndex arm) const { return alpha_stderr[checkpoint * k + arm]; }
};

struct ReplicationOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  bool keep_traces = false;
};

EstimateSeries run_replications(const BanditInstance& inst, std::uint64_t horizon, std::uint64_t n0,
                                std::uint64_t reps, std::uint64_t seed, std::span<const std::uint64_t> checkpoints,
                                ReplicationOptions options = {});

/// Geometric grid of `points` rounds from `start` to `stop` inclusive, floored
/// to integers, deduplicated and sorted.
std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t stop, std::size_t points);

/// Default checkpoint grid: 30 geometric points from k n0 to horizon.
std::vector<std::uint64_t> default_checkpoints(std::size_t k, std::uint64_t n0, std::uint64_t horizon);

/// -log(p)/t, or nullopt when p is zero (log undefined).
std::optional<double> neg_log_rate(double p, std::uint64_t t);
std::optional<double> neg_log_rate(const std::optional<LogValue>& p, std::uint64_t t);

struct TransformedSeries {
  std::vector<std::uint64_t> checkpoint_rounds;
  std::vector<std::optional<double>> pe_rate;  // -log(pe_hat)/t
  std::vector<std::optional<double>> sr_rate;  // -log(sr_hat)/t
  std::vector<double> cr_per_round;            // cr_hat/t
  // -log(3/reps)/t: the rule-of-three band, useful where pe_hat is zero.
  std::vector<double> pe_rule_of_three_rate;
};

TransformedSeries estimate_transforms(const EstimateSeries& series);

struct ConcentrationResult {
  double empirical = 0.0;  // share of replications with |mean - mu| >= eps
  double std_error = 0.0;     // binomial standard error of `empirical`
  double bound = 0.0;      // (2 sigma / (sqrt(m) eps)) exp(-m eps^2 / (2 sigma^2))
};

double concentration_bound(double sigma, std::uint64_t m, double eps);

/// Simulates `reps` sample means of m N(0, sigma^2) draws and compares the
/// exceedance frequency of eps against the Gaussian tail bound.
ConcentrationResult concentration_check(double sigma, std::uint64_t m, double eps, std::uint64_t reps,
                                        std::uint64_t seed, unsigned threads = 0);

/// Worker count from KG_LAB_THREADS (unset or 0 means hardware concurrency).
unsigned threads_from_env();

}  // namespace kglab
