#include "kglab/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kglab {
namespace {

InstanceConstants derive_constants(const std::vector<double>& means, const std::vector<double>& stds) {
  InstanceConstants c;
  c.k = means.size();
  c.means = means;
  c.stds = stds;
  c.best = static_cast<ArmIndex>(std::max_element(means.begin(), means.end()) - means.begin());
  c.sigma_max = *std::max_element(stds.begin(), stds.end());
  c.sigma_min = *std::min_element(stds.begin(), stds.end());

  c.second_best_mean = -std::numeric_limits<double>::infinity();
  for (ArmIndex i = 0; i < c.k; ++i) {
    if (i != c.best) c.second_best_mean = std::max(c.second_best_mean, means[i]);
  }

  c.delta_max = 0.0;
  c.delta_min = std::numeric_limits<double>::infinity();
  for (ArmIndex i = 0; i < c.k; ++i) {
    for (ArmIndex j = i + 1; j < c.k; ++j) {
      const double d = std::fabs(means[i] - means[j]);
      c.delta_max = std::max(c.delta_max, d);
      if (d > 0.0) c.delta_min = std::min(c.delta_min, d);
    }
  }

  c.gaps.resize(c.k);
  for (ArmIndex i = 0; i < c.k; ++i) c.gaps[i] = means[c.best] - means[i];

  const double spread = 27.0 * std::pow(c.delta_max, 3) / (8.0 * std::pow(c.sigma_min, 4));
  c.log_spread_term = std::max(std::log(spread), 0.0);
  return c;
}

}  // namespace

BanditInstance::BanditInstance(std::vector<double> means, std::vector<double> stds)
    : means_(std::move(means)), stds_(std::move(stds)), constants_(derive_constants(means_, stds_)) {}

BanditInstance make_instance(std::vector<double> means, std::vector<double> stds) {
  using Kind = InstanceError::Kind;
  if (means.size() != stds.size()) {
    throw InstanceError(Kind::kLengthMismatch, "means and stds differ in length");
  }
  if (means.size() < 2) throw InstanceError(Kind::kTooFewArms, "an instance needs at least two arms");
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!std::isfinite(means[i]) || !std::isfinite(stds[i])) {
      throw InstanceError(Kind::kNonFinite, "arm " + std::to_string(i + 1) + " has a non-finite parameter");
    }
    if (!(stds[i] > 0.0)) {
      throw InstanceError(Kind::kNonPositiveStd, "arm " + std::to_string(i + 1) + " has std <= 0");
    }
  }
  const double top = *std::max_element(means.begin(), means.end());
  if (std::count(means.begin(), means.end(), top) > 1) {
    throw InstanceError(Kind::kNonUniqueBest, "the maximum mean is shared by several arms");
  }
  return BanditInstance(std::move(means), std::move(stds));
}

const InstanceConstants& instance_constants(const BanditInstance& inst) { return inst.constants(); }

BanditInstance catalog(int id) {
  auto filled = [](std::initializer_list<std::pair<std::size_t, double>> runs) {
    std::vector<double> v;
    for (auto [count, value] : runs) v.insert(v.end(), count, value);
    return v;
  };
  switch (id) {
    case 1:
      return make_instance(filled({{9, 1.0}, {1, 2.0}}), filled({{10, 1.0}}));
    case 2:
      return make_instance(filled({{5, 1.0}, {4, 2.0}, {1, 3.0}}), filled({{5, 1.0}, {4, 2.0}, {1, 3.0}}));
    case 3:
      return make_instance(filled({{9, 5.0}, {1, 10.0}}), filled({{10, 1.0}}));
    case 4:
      return make_instance(filled({{9, 1.0}, {1, 2.0}}), filled({{10, 2.0}}));
    case 5:
      return make_instance(filled({{19, 1.0}, {1, 2.0}}), filled({{20, 1.0}}));
    default:
      throw InstanceError(InstanceError::Kind::kUnknownCatalogId,
                          "unknown catalog id " + std::to_string(id) + " (expected 1-5)");
  }
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t replication) : seed_(seed), replication_(replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                    0x6b67u};
  engine_.seed(seq);
}

double RngStream::standard_normal() {
  ++draws_;
  return normal_(engine_);
}

double sample_reward(const BanditInstance& inst, ArmIndex arm, RngStream& rng) {
  if (arm >= inst.k()) throw ValidationError("sample_reward: arm index out of range");
  return rng.normal(inst.mean(arm), inst.std_dev(arm));
}

}  // namespace kglab
