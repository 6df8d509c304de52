#include "kglab/kg_policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kglab {
namespace {

struct TopTwo {
  ArmIndex first = 0;
  ArmIndex second = 0;
};

// Indices of the largest and second-largest entries; lowest index on ties.
TopTwo top_two(std::span<const double> v) {
  TopTwo t;
  t.first = 0;
  t.second = 1;
  if (v[1] > v[0]) std::swap(t.first, t.second);
  for (ArmIndex i = 2; i < v.size(); ++i) {
    if (v[i] > v[t.first]) {
      t.second = t.first;
      t.first = i;
    } else if (v[i] > v[t.second]) {
      t.second = i;
    }
  }
  return t;
}

double log_zeta(double precision, double noise_precision) {
  return 0.5 * (std::log(noise_precision) - std::log(precision) - std::log(precision + noise_precision));
}

double kg_log_value(double theta_gap, double log_z) {
  return log_z + log_f_neg(std::fabs(theta_gap) * std::exp(-log_z)).log_magnitude;
}

void require_all_pulled(const PosteriorState& state, const char* fn) {
  for (auto n : state.pulls()) {
    if (n == 0) throw ValidationError(std::string(fn) + ": every arm needs at least one pull");
  }
}

}  // namespace

PosteriorState::PosteriorState(std::span<const double> stds)
    : post_mean_(stds.size(), 0.0), post_precision_(stds.size(), 0.0), pulls_(stds.size(), 0) {
  if (stds.size() < 2) throw ValidationError("PosteriorState: need at least two arms");
  noise_variance_.reserve(stds.size());
  for (double s : stds) noise_variance_.push_back(s * s);
}

void PosteriorState::set_post_mean(std::span<const double> means) {
  if (means.size() != k()) throw ValidationError("set_post_mean: size mismatch");
  std::copy(means.begin(), means.end(), post_mean_.begin());
}

void PosteriorState::update(ArmIndex arm, double reward) {
  if (arm >= k()) throw ValidationError("posterior update: arm index out of range");
  const double s = 1.0 / noise_variance_[arm];
  const double p = post_precision_[arm];
  post_mean_[arm] += s / (p + s) * (reward - post_mean_[arm]);
  ++pulls_[arm];
  ++round_;
  // Under the non-informative prior the accumulated precision is N / sigma^2;
  // computing it in closed form keeps it exact instead of summing s repeatedly.
  post_precision_[arm] = static_cast<double>(pulls_[arm]) / noise_variance_[arm];
}

PosteriorState init_state(const BanditInstance& inst, std::uint64_t n0, RngStream& rng) {
  if (n0 == 0) throw ValidationError("init_state: n0 must be at least 1");
  PosteriorState state(inst.stds());
  for (ArmIndex i = 0; i < inst.k(); ++i) {
    for (std::uint64_t r = 0; r < n0; ++r) state.update(i, sample_reward(inst, i, rng));
  }
  return state;
}

PosteriorState posterior_update(PosteriorState state, ArmIndex arm, double reward) {
  state.update(arm, reward);
  return state;
}

LogValue kg_value(const PosteriorState& state, ArmIndex arm) {
  if (arm >= state.k()) throw ValidationError("kg_value: arm index out of range");
  require_all_pulled(state, "kg_value");
  const auto theta = state.post_mean();
  double best_other = -std::numeric_limits<double>::infinity();
  for (ArmIndex j = 0; j < state.k(); ++j) {
    if (j != arm) best_other = std::max(best_other, theta[j]);
  }
  const double lz = log_zeta(state.post_precision()[arm], 1.0 / state.noise_variance(arm));
  return {kg_log_value(theta[arm] - best_other, lz)};
}

ArmIndex select_arm(const PosteriorState& state) {
  require_all_pulled(state, "select_arm");
  ArmIndex best = 0;
  double best_v = kg_value(state, 0).log_magnitude;
  for (ArmIndex i = 1; i < state.k(); ++i) {
    const double v = kg_value(state, i).log_magnitude;
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

ArmIndex recommend(const PosteriorState& state) {
  require_all_pulled(state, "recommend");
  const auto theta = state.post_mean();
  return static_cast<ArmIndex>(std::max_element(theta.begin(), theta.end()) - theta.begin());
}

RunTrace run_kg(const BanditInstance& inst, std::uint64_t horizon, std::uint64_t n0, RngStream& rng,
                std::span<const std::uint64_t> checkpoints, RunOptions options) {
  const std::size_t k = inst.k();
  if (n0 == 0) throw ValidationError("run_kg: n0 must be at least 1");
  const std::uint64_t initial = k * n0;
  if (horizon < initial) {
    throw ValidationError("run_kg: horizon " + std::to_string(horizon) + " is below k*n0 = " +
                          std::to_string(initial));
  }
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (checkpoints[c] < initial || checkpoints[c] > horizon) {
      throw ValidationError("run_kg: checkpoint " + std::to_string(checkpoints[c]) + " outside [k*n0, horizon]");
    }
    if (c > 0 && checkpoints[c] <= checkpoints[c - 1]) {
      throw ValidationError("run_kg: checkpoints must be strictly increasing");
    }
  }

  RunTrace trace;
  trace.k = k;
  trace.n0 = n0;
  trace.horizon = horizon;
  trace.checkpoint_rounds.assign(checkpoints.begin(), checkpoints.end());
  trace.pulls_at_checkpoints.reserve(checkpoints.size() * k);
  trace.recommendation_at_checkpoints.reserve(checkpoints.size());
  if (options.diagnostic) trace.reward_log.assign(k, {});

  PosteriorState state(inst.stds());
  auto observe = [&](ArmIndex arm) {
    const double x = sample_reward(inst, arm, rng);
    state.update(arm, x);
    if (options.diagnostic) trace.reward_log[arm].push_back(x);
  };

  std::size_t next_checkpoint = 0;
  auto maybe_record = [&] {
    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == state.round()) {
      const auto pulls = state.pulls();
      trace.pulls_at_checkpoints.insert(trace.pulls_at_checkpoints.end(), pulls.begin(), pulls.end());
      trace.recommendation_at_checkpoints.push_back(recommend(state));
      ++next_checkpoint;
    }
  };

  for (ArmIndex i = 0; i < k; ++i) {
    for (std::uint64_t r = 0; r < n0; ++r) observe(i);
  }
  maybe_record();

  // Same arithmetic as select_arm, with log zeta cached per arm; only the
  // pulled arm's zeta changes between rounds.
  std::vector<double> log_z(k);
  std::vector<double> noise_precision(k);
  for (ArmIndex i = 0; i < k; ++i) {
    noise_precision[i] = 1.0 / state.noise_variance(i);
    log_z[i] = log_zeta(state.post_precision()[i], noise_precision[i]);
  }

  while (state.round() < horizon) {
    const auto theta = state.post_mean();
    const TopTwo top = top_two(theta);
    ArmIndex pick = 0;
    double pick_v = -std::numeric_limits<double>::infinity();
    for (ArmIndex i = 0; i < k; ++i) {
      const double rival = theta[i == top.first ? top.second : top.first];
      const double v = kg_log_value(theta[i] - rival, log_z[i]);
      if (i == 0 || v > pick_v) {
        pick_v = v;
        pick = i;
      }
    }
    observe(pick);
    log_z[pick] = log_zeta(state.post_precision()[pick], noise_precision[pick]);
    maybe_record();
  }

  trace.final_recommendation = recommend(state);
  if (options.diagnostic) trace.final_state = std::move(state);
  return trace;
}

}  // namespace kglab
