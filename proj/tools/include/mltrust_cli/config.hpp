#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mltrust/graph_builder.hpp"
#include "mltrust/social_score.hpp"
#include "mltrust/stress.hpp"

namespace mltrust::cli {

struct RunConfig {
  std::filesystem::path doctors;
  std::filesystem::path hospitals;
  std::filesystem::path departments;
  BuildOptions build;
  ScoringOptions scoring;
  std::vector<std::size_t> ks = {1, 3, 5};
  std::vector<std::string> baselines = {"social_score"};
  std::vector<std::string> scenarios = {"uniform", "normal", "skewed"};
  // Score CSV to evaluate instead of running the residual scenarios.
  std::optional<std::filesystem::path> eval_scores;
  GeneratorMethod generator = IdentityGenerator{};
  std::vector<std::uint64_t> seeds;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
};

struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
};

// Paths in the file are relative to its directory. Throws Error(InvalidConfig).
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const Overrides& overrides = {});

// Residual configs for one named scenario, seeded like the configured ones.
std::array<ResidualConfig, 3> scenario_residuals(const RunConfig& config,
                                                 const ResidualDistribution& distribution);

}  // namespace mltrust::cli
