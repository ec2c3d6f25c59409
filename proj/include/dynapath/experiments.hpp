#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dynapath/astar.hpp"
#include "dynapath/environment.hpp"
#include "dynapath/hierarchy.hpp"
#include "dynapath/strategy.hpp"

namespace dynapath {

enum class Approach {
  AStarStatic,
  AStarOracle,
  OnlyTrainLeafNodes,
  SingleAgent,
  FedAsynQEqAvg,
  FedAsynQImAvg,
};

inline constexpr std::array<Approach, 6> kAllApproaches{
    Approach::AStarStatic,        Approach::AStarOracle, Approach::OnlyTrainLeafNodes,
    Approach::SingleAgent,        Approach::FedAsynQEqAvg, Approach::FedAsynQImAvg,
};

/// CLI / CSV token, e.g. "astar-static".
std::string_view to_string(Approach a);
Approach parse_approach(std::string_view token);
bool is_learning(Approach a);

struct ExperimentConfig {
  std::vector<int> sizes{20, 50, 100, 200, 300};
  std::vector<Difficulty> difficulties{Difficulty::Easy, Difficulty::Medium, Difficulty::Hard};
  std::vector<Approach> approaches{kAllApproaches.begin(), kAllApproaches.end()};
  std::uint64_t masterSeed = 0;
  std::int64_t seedOffset = 50;
  /// Replace the size x difficulty sweep by the single 50x50 edge-case grid.
  bool edgeCase = false;
  std::filesystem::path outputDir = ".";
  bool policyDump = false;
  StrategyConfig strategy{};
};

inline int time_steps(int size) { return 2 * size; }

struct MetricsRecord {
  Approach approach;
  int size;
  Difficulty difficulty;
  int timeStep;
  int numChanges;
  double successRate;
  std::optional<double> meanPathLength;
  double adaptationSeconds;
  double cumulativeAdaptationSeconds;
  std::optional<double> initialTrainingSeconds; // t = 0 rows only
};

/// What one (size, difficulty) run fed to the approaches, for replay checks.
struct ScenarioTrace {
  int size;
  Difficulty difficulty;
  std::uint64_t streamSeed;
  std::vector<std::vector<ChangeEvent>> changes; // index t-1
  std::vector<std::pair<Approach, std::vector<std::uint64_t>>> snapshotHashes; // index t
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<ScenarioTrace> scenarios;
};

/// Whole-grid score of the root-consolidated policy.
PathEvaluation evaluate_learned(const TreeNode& root, const GridEnvironment& env);

/// Score of stored A* paths on the current grid.
inline PathEvaluation evaluate_astar(const PathTable& table, const GridEnvironment& env) {
  return evaluate_paths(table, env);
}

/// Runs every configured scenario and approach. Writes policy dumps when
/// enabled but no CSV files.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// run_experiment followed by write_results into cfg.outputDir.
ExperimentResult run_full_experiment(const ExperimentConfig& cfg);

/// Per (approach, size, difficulty) aggregate, in first-seen order.
struct SummaryRow {
  Approach approach;
  int size;
  Difficulty difficulty;
  std::size_t timeSteps;                 // rows with t >= 1
  double meanSuccessRate;                // over all rows, t = 0 included
  std::optional<double> meanPathLength;  // over rows that have one
  double meanAdaptationSeconds;          // over rows with t >= 1
  double totalAdaptationSeconds;
  double initialTrainingSeconds;
};

std::vector<SummaryRow> summarize(std::span<const MetricsRecord> records);

/// results.csv (one row per approach/size/difficulty) and
/// results_detailed.csv (one row per record).
void write_results(std::span<const MetricsRecord> records, const std::filesystem::path& dir);

inline constexpr std::string_view kResultsFile = "results.csv";
inline constexpr std::string_view kDetailedFile = "results_detailed.csv";

} // namespace dynapath
