#pragma once

// Gaussian bandit instances and the seeded randomness they are sampled with.
// Arms are indexed from 0 in the API; the CLI prints them 1-based.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kglab/error.hpp"

namespace kglab {

using ArmIndex = std::size_t;

class InstanceError : public ValidationError {
 public:
  enum class Kind { kLengthMismatch, kTooFewArms, kNonFinite, kNonPositiveStd, kNonUniqueBest, kUnknownCatalogId };

  InstanceError(Kind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct InstanceConstants {
  ArmIndex best = 0;
  std::size_t k = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double delta_max = 0.0;  // max |mu_i - mu_j| over all pairs
  double delta_min = 0.0;  // smallest positive |mu_i - mu_j| over all pairs
  double second_best_mean = 0.0;
  std::vector<double> gaps;  // mu_best - mu_i
  // max{ln(27 delta_max^3 / (8 sigma_min^4)), 0}, shared by all rho envelopes.
  double log_spread_term = 0.0;
  // Copies of the instance parameters so bound code only needs the constants.
  std::vector<double> means;
  std::vector<double> stds;
};

/// Immutable Gaussian bandit: arm i yields N(means[i], stds[i]^2).
class BanditInstance {
 public:
  std::size_t k() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  std::span<const double> stds() const noexcept { return stds_; }
  double mean(ArmIndex i) const { return means_.at(i); }
  double std_dev(ArmIndex i) const { return stds_.at(i); }
  ArmIndex best() const noexcept { return constants_.best; }
  const InstanceConstants& constants() const& noexcept { return constants_; }
  // `catalog(1).constants()` must not hand out a reference into a temporary.
  InstanceConstants constants() && { return std::move(constants_); }

  friend BanditInstance make_instance(std::vector<double> means, std::vector<double> stds);

 private:
  BanditInstance(std::vector<double> means, std::vector<double> stds);

  std::vector<double> means_;
  std::vector<double> stds_;
  InstanceConstants constants_;
};

/// Validates and builds an instance. Throws InstanceError on length mismatch,
/// fewer than two arms, non-finite values, non-positive stds, or a tie at the
/// maximum mean.
BanditInstance make_instance(std::vector<double> means, std::vector<double> stds);

/// Derived constants (computed once at construction).
const InstanceConstants& instance_constants(const BanditInstance& inst);

/// Instances 1-5 of the reference experiments.
BanditInstance catalog(int id);
inline constexpr int kCatalogSize = 5;

/// Deterministic normal-variate stream keyed by (seed, replication).
///
/// Each replication gets its own engine seeded through std::seed_seq from the
/// pair, so results depend only on the key and never on worker scheduling.
/// Reproducibility is promised within one build only.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replication);

  double standard_normal();
  double normal(double mean, double std_dev) { return mean + std_dev * standard_normal(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replication() const noexcept { return replication_; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t seed_;
  std::uint64_t replication_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// One reward draw from arm `arm`; advances the stream.
double sample_reward(const BanditInstance& inst, ArmIndex arm, RngStream& rng);

}  // namespace kglab
