#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "gen.hpp"
#include "kglab/kg_policy.hpp"
#include "kglab/montecarlo.hpp"

using namespace kglab;

namespace {

// One pull of each arm, then overwrite the means: precision 1/sigma^2 per arm.
PosteriorState single_pull_state(std::vector<double> stds, std::vector<double> theta) {
  PosteriorState s(stds);
  for (ArmIndex i = 0; i < stds.size(); ++i) s.update(i, 0.0);
  s.set_post_mean(theta);
  return s;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(Posterior, FirstSampleAbsorbed) {
  PosteriorState s(std::vector<double>{2.0, 1.0});
  s = posterior_update(s, 0, 1.7);
  EXPECT_DOUBLE_EQ(s.post_mean()[0], 1.7);
  EXPECT_DOUBLE_EQ(s.post_precision()[0], 0.25);
  s = posterior_update(s, 0, 0.3);
  EXPECT_DOUBLE_EQ(s.post_mean()[0], 1.0);
  EXPECT_DOUBLE_EQ(s.post_precision()[0], 0.5);
  EXPECT_EQ(s.post_precision()[1], 0.0);
  EXPECT_EQ(s.pulls()[1], 0u);
  EXPECT_EQ(s.round(), 2u);
}

TEST(Posterior, ArmOutOfRange) {
  PosteriorState s(std::vector<double>{1.0, 1.0});
  EXPECT_THROW(s.update(2, 0.0), ValidationError);
  EXPECT_THROW(PosteriorState(std::vector<double>{1.0}), ValidationError);
}

TEST(Posterior, RunningMeanProperty) {
  gen::Source src(5);
  for (int n = 0; n < 50; ++n) {
    const double sigma = src.uniform(0.2, 4.0);
    PosteriorState s(std::vector<double>{sigma, 1.0});
    const auto m = src.integer(1, 400);
    double sum = 0.0;
    for (std::uint64_t r = 0; r < m; ++r) {
      const double x = src.uniform(-50.0, 50.0);
      sum += x;
      s.update(0, x);
    }
    const double mean = sum / static_cast<double>(m);
    EXPECT_NEAR(s.post_mean()[0], mean, 1e-9 * std::max(1.0, std::fabs(mean))) << n;
    EXPECT_EQ(s.post_precision()[0], static_cast<double>(m) / (sigma * sigma)) << n;
  }
}

TEST(InitState, PullsEveryArm) {
  RngStream rng(0, 0);
  const auto s1 = init_state(catalog(1), 5, rng);
  EXPECT_EQ(s1.round(), 50u);
  for (auto p : s1.pulls()) EXPECT_EQ(p, 5u);
  EXPECT_EQ(init_state(catalog(5), 5, rng).round(), 100u);
  EXPECT_THROW(init_state(catalog(1), 0, rng), ValidationError);
}

TEST(InitState, SinglePullEqualsObservation) {
  const auto inst = make_instance({0.0, 1.0}, {1.0, 2.0});
  RngStream a(3, 0), b(3, 0);
  const auto s = init_state(inst, 1, a);
  const double x1 = sample_reward(inst, 0, b);
  const double x2 = sample_reward(inst, 1, b);
  EXPECT_EQ(s.post_mean()[0], x1);
  EXPECT_EQ(s.post_mean()[1], x2);
  EXPECT_EQ(s.post_precision()[0], 1.0);
  EXPECT_EQ(s.post_precision()[1], 0.25);
}

TEST(KgValue, ZeroGap) {
  for (double c : {-3.0, 0.0, 17.5}) {
    const auto s = single_pull_state({1.0, 1.0}, {c, c});
    EXPECT_LT(rel(kg_value(s, 0).value(), 0.28209479177387814347), 1e-13) << c;
  }
}

TEST(KgValue, UnitGap) {
  const auto s = single_pull_state({1.0, 1.0}, {0.0, 1.0});
  EXPECT_LT(rel(kg_value(s, 0).value(), 0.025127270830006110506), 1e-12);
  EXPECT_LT(rel(kg_value(s, 1).value(), 0.025127270830006110506), 1e-12);
}

TEST(KgValue, DeepTailStaysFinite) {
  // zeta = sqrt(1/2); gap/zeta = 100
  const auto s = single_pull_state({1.0, 1.0}, {0.0, 100.0 * std::sqrt(0.5)});
  const double expected = 0.5 * std::log(0.5) - 5010.1295788002497923;
  EXPECT_NEAR(kg_value(s, 0).log_magnitude, expected, 1e-6);
}

TEST(KgValue, RequiresPulls) {
  PosteriorState s(std::vector<double>{1.0, 1.0});
  s.update(0, 1.0);
  EXPECT_THROW(kg_value(s, 0), ValidationError);
  EXPECT_THROW(select_arm(s), ValidationError);
  EXPECT_THROW(recommend(s), ValidationError);
}

TEST(SelectArm, TiesGoToLowestIndex) {
  EXPECT_EQ(select_arm(single_pull_state({1, 1, 1}, {0, 0, 0})), 0u);
  // arm 2 has the larger noise, hence the larger KG value at equal gaps
  EXPECT_EQ(select_arm(single_pull_state({1, 2}, {0, 0})), 1u);
}

TEST(SelectArm, TranslationInvarianceProperty) {
  gen::Source src(17);
  for (int n = 0; n < 300; ++n) {
    const auto k = static_cast<std::size_t>(src.integer(2, 12));
    std::vector<double> stds(k), theta(k);
    PosteriorState s([&] {
      for (auto& v : stds) v = src.uniform(0.5, 3.0);
      return stds;
    }());
    for (ArmIndex i = 0; i < k; ++i) {
      const auto m = src.integer(1, 30);
      for (std::uint64_t r = 0; r < m; ++r) s.update(i, 0.0);
      theta[i] = static_cast<double>(static_cast<int>(src.integer(0, 512)) - 256) / 64.0;  // dyadic, so shifts are exact
    }
    s.set_post_mean(theta);
    const ArmIndex base = select_arm(s);
    const double c = static_cast<double>(static_cast<int>(src.integer(0, 2000)) - 1000);
    auto shifted = theta;
    for (auto& v : shifted) v += c;
    s.set_post_mean(shifted);
    EXPECT_EQ(select_arm(s), base) << "case " << n << " shift " << c;
  }
}

TEST(Recommend, Argmax) {
  EXPECT_EQ(recommend(single_pull_state({1, 1, 1}, {1.2, 0.4, 3.3})), 2u);
  EXPECT_EQ(recommend(single_pull_state({1, 1}, {2, 2})), 0u);
}

TEST(RunKg, InitialStageOnly) {
  RngStream rng(1, 0);
  const std::vector<std::uint64_t> cps = {50};
  const auto trace = run_kg(catalog(1), 50, 5, rng, cps);
  for (auto p : trace.pulls_at(0)) EXPECT_EQ(p, 5u);
  EXPECT_EQ(rng.draws(), 50u);
}

TEST(RunKg, Validation) {
  RngStream rng(1, 0);
  const std::vector<std::uint64_t> none;
  EXPECT_THROW(run_kg(catalog(1), 49, 5, rng, none), ValidationError);
  EXPECT_THROW(run_kg(catalog(1), 100, 0, rng, none), ValidationError);
  const std::vector<std::uint64_t> early = {40};
  EXPECT_THROW(run_kg(catalog(1), 100, 5, rng, early), ValidationError);
  const std::vector<std::uint64_t> late = {101};
  EXPECT_THROW(run_kg(catalog(1), 100, 5, rng, late), ValidationError);
  const std::vector<std::uint64_t> unsorted = {80, 60};
  EXPECT_THROW(run_kg(catalog(1), 100, 5, rng, unsorted), ValidationError);
}

TEST(RunKg, MatchesStepwiseSelection) {
  // The cached inner loop must make exactly the choices select_arm makes.
  for (int id = 1; id <= kCatalogSize; ++id) {
    const auto inst = catalog(id);
    RngStream a(99, static_cast<std::uint64_t>(id)), b(99, static_cast<std::uint64_t>(id));
    const std::uint64_t horizon = 1500;
    const std::vector<std::uint64_t> cps = {horizon};
    const auto trace = run_kg(inst, horizon, 5, a, cps);
    auto state = init_state(inst, 5, b);
    while (state.round() < horizon) {
      const ArmIndex arm = select_arm(state);
      state.update(arm, sample_reward(inst, arm, b));
    }
    EXPECT_TRUE(std::ranges::equal(trace.pulls_at(0), state.pulls())) << "instance " << id;
    EXPECT_EQ(trace.final_recommendation, recommend(state));
  }
}

TEST(RunKg, TraceInvariantsProperty) {
  gen::Source src(23);
  for (int n = 0; n < 20; ++n) {
    const auto inst = src.instance();
    const auto n0 = src.integer(1, 4);
    const std::uint64_t initial = inst.k() * n0;
    const std::uint64_t horizon = initial + src.integer(0, 3000);
    std::vector<std::uint64_t> cps = {initial};
    for (std::uint64_t t = initial + 1 + src.integer(0, 200); t < horizon; t += 1 + src.integer(0, 400)) cps.push_back(t);
    if (cps.back() != horizon) cps.push_back(horizon);
    RngStream rng(n, 0);
    const auto trace = run_kg(inst, horizon, n0, rng, cps, {.diagnostic = true});
    ASSERT_EQ(trace.recommendation_at_checkpoints.size(), cps.size());
    for (std::size_t c = 0; c < cps.size(); ++c) {
      const auto pulls = trace.pulls_at(c);
      EXPECT_EQ(std::accumulate(pulls.begin(), pulls.end(), std::uint64_t{0}), cps[c]) << n;
      if (c > 0) {
        for (ArmIndex i = 0; i < inst.k(); ++i) EXPECT_GE(pulls[i], trace.pulls_at(c - 1)[i]);
      }
    }
    const auto& state = *trace.final_state;
    for (ArmIndex i = 0; i < inst.k(); ++i) {
      const auto& log = trace.reward_log[i];
      ASSERT_EQ(log.size(), state.pulls()[i]);
      const double mean = std::accumulate(log.begin(), log.end(), 0.0) / static_cast<double>(log.size());
      EXPECT_LE(std::fabs(state.post_mean()[i] - mean), 1e-9 * std::fabs(mean) + 1e-300) << n;
      const double sd = inst.std_dev(i);
      EXPECT_EQ(state.post_precision()[i], static_cast<double>(log.size()) / (sd * sd));
    }
  }
}

TEST(RunKg, DeterministicForFixedStream) {
  const std::vector<std::uint64_t> cps = {50, 500, 2000};
  RngStream a(4, 2), b(4, 2);
  const auto t1 = run_kg(catalog(2), 2000, 5, a, cps);
  const auto t2 = run_kg(catalog(2), 2000, 5, b, cps);
  EXPECT_EQ(t1.pulls_at_checkpoints, t2.pulls_at_checkpoints);
  EXPECT_EQ(t1.recommendation_at_checkpoints, t2.recommendation_at_checkpoints);
}

// The minimum-pull growth guarantee only holds beyond an uncomputable T0: at t >= 2000 a shortfall is a
// failure, below that it is reported.
TEST(RunKg, MinimumPullGrowthMonitor) {
  std::size_t early_violations = 0;
  for (int id = 1; id <= kCatalogSize; ++id) {
    const auto inst = catalog(id);
    const auto cps = default_checkpoints(inst.k(), 5, 10'000);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream rng(seed, 0);
      const auto trace = run_kg(inst, 10'000, 5, rng, cps);
      for (std::size_t c = 0; c < cps.size(); ++c) {
        const double floor = std::pow(static_cast<double>(cps[c]) / static_cast<double>(inst.k()), 0.75);
        for (auto p : trace.pulls_at(c)) {
          if (static_cast<double>(p) >= floor) continue;
          if (cps[c] >= 2000) {
            ADD_FAILURE() << "instance " << id << " seed " << seed << " t=" << cps[c] << " pulls " << p << " < " << floor;
          } else {
            ++early_violations;
          }
        }
      }
    }
  }
  RecordProperty("early_violations", static_cast<int>(early_violations));
  std::cout << "[ monitor  ] pulls below (t/k)^(3/4) before t=2000: " << early_violations << "\n";
}
