#pragma once

// Knowledge-gradient sampling under a non-informative Gaussian prior.
//
// Rounds count total pulls, including the forced initial stage, so the pull
// counts in a state always sum to its round.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kglab/bandit.hpp"
#include "kglab/math_kernel.hpp"

namespace kglab {

class PosteriorState {
 public:
  /// All arms unpulled: precision 0 (prior variance infinite), mean 0.
  explicit PosteriorState(std::span<const double> stds);

  std::size_t k() const noexcept { return post_mean_.size(); }
  std::uint64_t round() const noexcept { return round_; }
  std::span<const double> post_mean() const noexcept { return post_mean_; }
  std::span<const double> post_precision() const noexcept { return post_precision_; }
  std::span<const std::uint64_t> pulls() const noexcept { return pulls_; }
  double noise_variance(ArmIndex i) const { return noise_variance_.at(i); }

  /// Overrides the posterior means, keeping counts and precisions. Used to
  /// probe the acquisition on hand-built states.
  void set_post_mean(std::span<const double> means);

  /// Bayesian update of `arm` with one observed reward:
  ///   theta <- (p theta + s x) / (p + s),  p <- p + s,  s = 1/sigma^2.
  void update(ArmIndex arm, double reward);

 private:
  std::vector<double> post_mean_;
  std::vector<double> post_precision_;
  std::vector<std::uint64_t> pulls_;
  std::vector<double> noise_variance_;
  std::uint64_t round_ = 0;
};

/// Pulls every arm n0 times from `rng` and returns the resulting posterior.
PosteriorState init_state(const BanditInstance& inst, std::uint64_t n0, RngStream& rng);

/// Returns `state` with one more observation of `arm`.
PosteriorState posterior_update(PosteriorState state, ArmIndex arm, double reward);

/// log of v = zeta f(-|theta_i - max_{j!=i} theta_j| / zeta), where
/// zeta^2 = 1/p - 1/(p+s) = s / (p (p + s)).
LogValue kg_value(const PosteriorState& state, ArmIndex arm);

/// Argmax of kg_value; lowest index wins ties.
ArmIndex select_arm(const PosteriorState& state);

/// Argmax of the posterior means; lowest index wins ties.
ArmIndex recommend(const PosteriorState& state);

struct RunTrace {
  std::size_t k = 0;
  std::uint64_t n0 = 0;
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> checkpoint_rounds;
  // Row-major (checkpoint x arm) pull counts N_{i,t}.
  std::vector<std::uint64_t> pulls_at_checkpoints;
  std::vector<ArmIndex> recommendation_at_checkpoints;
  ArmIndex final_recommendation = 0;
  // Only populated in diagnostic mode.
  std::optional<PosteriorState> final_state;
  std::vector<std::vector<double>> reward_log;

  std::span<const std::uint64_t> pulls_at(std::size_t checkpoint) const {
    return std::span<const std::uint64_t>(pulls_at_checkpoints).subspan(checkpoint * k, k);
  }
};

struct RunOptions {
  bool diagnostic = false;
};

/// Initial stage of n0 pulls per arm, then KG selection until `horizon` total
/// pulls. `checkpoints` must be sorted, unique and within [k n0, horizon].
RunTrace run_kg(const BanditInstance& inst, std::uint64_t horizon, std::uint64_t n0, RngStream& rng,
                std::span<const std::uint64_t> checkpoints, RunOptions options = {});

}  // namespace kglab
