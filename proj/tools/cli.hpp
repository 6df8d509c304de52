#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kglab/bandit.hpp"
#include "kglab/report.hpp"

namespace kglab::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kIo = 2 };

/// Instance source: a catalog id or inline parameters.
struct InstanceSpec {
  std::optional<int> catalog_id;
  std::vector<double> means;
  std::vector<double> stds;

  BanditInstance build() const;
  std::string label() const;
};

/// Settings shared by simulate/figure/bounds. JSON form:
///   {"instance": 1 | {"means": [...], "stds": [...]}, "rounds": 10000,
///    "n0": 5, "reps": 1000, "seed": 42, "checkpoints": "geometric:50:10000:30",
///    "t_grid": "geometric:100:1e9:40", "out": "results", "kind": "pe",
///    "arms": [1, 5, 10]}
struct ExperimentConfig {
  std::optional<InstanceSpec> instance;
  std::uint64_t rounds = 10000;
  std::uint64_t n0 = 5;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 0;
  std::string checkpoints;  // empty = 30 geometric points from k n0 to rounds
  std::string t_grid = "geometric:100:1e9:40";
  std::filesystem::path out = ".";
  FigureKind kind = FigureKind::kPe;
  std::vector<ArmIndex> arms;  // 0-based; empty = default selection
};

/// Reads {"means": [...], "stds": [...]}.
InstanceSpec load_instance_file(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checkpoints for a run: explicit grid if given, clipped to [k n0, rounds].
std::vector<std::uint64_t> resolve_checkpoints(const ExperimentConfig& cfg, std::size_t k);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kglab::cli
