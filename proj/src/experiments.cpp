#include "dynapath/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>

namespace dynapath {

std::string_view to_string(Approach a) {
  switch (a) {
  case Approach::AStarStatic:
    return "astar-static";
  case Approach::AStarOracle:
    return "astar-oracle";
  case Approach::OnlyTrainLeafNodes:
    return "leaf-only";
  case Approach::SingleAgent:
    return "single-agent";
  case Approach::FedAsynQEqAvg:
    return "fed-eqavg";
  case Approach::FedAsynQImAvg:
    return "fed-imavg";
  }
  return "?";
}

Approach parse_approach(std::string_view token) {
  for (Approach a : kAllApproaches)
    if (to_string(a) == token) return a;
  throw std::invalid_argument("unknown approach '" + std::string(token) + "'");
}

bool is_learning(Approach a) { return a != Approach::AStarStatic && a != Approach::AStarOracle; }

PathEvaluation evaluate_learned(const TreeNode& root, const GridEnvironment& env) {
  PathSearcher searcher(root.qtable, env, env.bounds());
  const SearchSummary s = searcher.evaluate_all();
  return {s.success_rate(), s.mean_length()};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finaliser over the running value.
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xBF58476D1CE4E5B9ULL;
  h ^= h >> 27;
  h *= 0x94D049BB133111EBULL;
  h ^= h >> 31;
  return h;
}

int difficulty_index(Difficulty d) { return static_cast<int>(d); }

/// Per-approach adaptation state.
class Runner {
public:
  Runner(Approach approach, const GridEnvironment& env, const ExperimentConfig& cfg, Rng rng)
      : approach_(approach), strategy_(cfg.strategy), rng_(rng) {
    switch (approach) {
    case Approach::SingleAgent:
      strategy_.mode = TrainingMode::SingleAgent;
      break;
    case Approach::FedAsynQEqAvg:
      strategy_.mode = TrainingMode::FedEqAvg;
      break;
    case Approach::FedAsynQImAvg:
      strategy_.mode = TrainingMode::FedImAvg;
      break;
    default:
      break;
    }
    if (is_learning(approach)) root_ = decompose(env.rows(), env.cols());
  }

  void initial(const GridEnvironment& env) {
    if (is_learning(approach_)) {
      adapt_learning(env, {});
    } else {
      table_ = std::make_unique<PathTable>(plan_all(env));
    }
  }

  /// Returns false when the approach does no adaptation work at all.
  bool adapt(const GridEnvironment& env, std::span<const ChangeEvent> events) {
    switch (approach_) {
    case Approach::AStarStatic:
      return false;
    case Approach::AStarOracle:
      table_ = std::make_unique<PathTable>(plan_all(env));
      return true;
    default: {
      std::vector<TreeNode*> changed = leaves_for_changes(*root_, events);
      adapt_learning(env, changed);
      return true;
    }
    }
  }

  PathEvaluation evaluate(const GridEnvironment& env) const {
    if (is_learning(approach_)) return evaluate_learned(*root_, env);
    return evaluate_astar(*table_, env);
  }

  const TreeNode* root() const { return root_.get(); }

private:
  void adapt_learning(const GridEnvironment& env, std::span<TreeNode* const> changed) {
    if (approach_ == Approach::OnlyTrainLeafNodes) {
      only_train_leaf_nodes(*root_, changed, env, strategy_, rng_);
    } else {
      smart_hierarchy(*root_, changed, env, strategy_, rng_);
    }
  }

  Approach approach_;
  StrategyConfig strategy_;
  Rng rng_;
  std::unique_ptr<TreeNode> root_;
  std::unique_ptr<PathTable> table_;
};

void dump_policy(const ExperimentConfig& cfg, Approach a, int size, Difficulty d, int t,
                 const TreeNode& root, const GridEnvironment& env) {
  const std::filesystem::path dir =
      cfg.outputDir / (std::to_string(size) + "_" + std::string(to_string(d)));
  std::filesystem::create_directories(dir);
  const std::filesystem::path file =
      dir / ("policy_" + std::string(to_string(a)) + "_" + std::to_string(t) + ".txt");
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  write_policy(out, extract_policy(root, env.bounds(), env), env);
}

struct Scenario {
  int size;
  Difficulty difficulty;
};

void run_scenario(const ExperimentConfig& cfg, const Scenario& sc, ExperimentResult& result) {
  const std::uint64_t streamSeed = cfg.masterSeed + static_cast<std::uint64_t>(difficulty_index(sc.difficulty)) +
                                   static_cast<std::uint64_t>(cfg.seedOffset);
  Rng stream(streamSeed);
  const GridEnvironment env0 = cfg.edgeCase
                                   ? generate_edge_case(stream, streamSeed)
                                   : generate(stream, streamSeed, sc.size, sc.size, sc.difficulty);

  ScenarioTrace trace{sc.size, sc.difficulty, streamSeed, {}, {}};
  const int steps = time_steps(sc.size);
  {
    GridEnvironment walk = env0;
    for (int t = 1; t <= steps; ++t) {
      const int n = sample_change_count(stream);
      trace.changes.push_back(apply_changes(walk, stream, n));
    }
  }

  for (Approach a : cfg.approaches) {
    GridEnvironment env = env0;
    std::vector<std::uint64_t> hashes{env.content_hash()};
    const Rng learnRng(mix(mix(mix(cfg.masterSeed, static_cast<std::uint64_t>(sc.size)),
                               static_cast<std::uint64_t>(difficulty_index(sc.difficulty))),
                           static_cast<std::uint64_t>(a)));
    Runner runner(a, env, cfg, learnRng);

    const auto t0 = Clock::now();
    runner.initial(env);
    const double initialSeconds = seconds_since(t0);
    PathEvaluation eval = runner.evaluate(env);
    result.records.push_back(
        {a, sc.size, sc.difficulty, 0, 0, eval.successRate, eval.meanLength, 0.0, 0.0, initialSeconds});
    if (cfg.policyDump && runner.root()) dump_policy(cfg, a, sc.size, sc.difficulty, 0, *runner.root(), env);

    double cumulative = 0.0;
    for (int t = 1; t <= steps; ++t) {
      const auto& events = trace.changes[static_cast<std::size_t>(t - 1)];
      for (const ChangeEvent& ev : events) apply_event(env, ev);
      hashes.push_back(env.content_hash());

      const auto start = Clock::now();
      const bool worked = runner.adapt(env, events);
      const double adaptation = worked ? seconds_since(start) : 0.0;
      cumulative += adaptation;

      eval = runner.evaluate(env);
      result.records.push_back({a, sc.size, sc.difficulty, t, static_cast<int>(events.size()),
                                eval.successRate, eval.meanLength, adaptation, cumulative,
                                std::nullopt});
      if (cfg.policyDump && runner.root()) dump_policy(cfg, a, sc.size, sc.difficulty, t, *runner.root(), env);
    }
    trace.snapshotHashes.emplace_back(a, std::move(hashes));
  }
  result.scenarios.push_back(std::move(trace));
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed6(const std::optional<double>& v) { return v ? fixed6(*v) : std::string(); }

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  if (cfg.edgeCase) {
    run_scenario(cfg, {kEdgeCaseSize, Difficulty::Hard}, result);
    return result;
  }
  for (int size : cfg.sizes) {
    if (size < 1) throw std::invalid_argument("grid size must be positive");
    for (Difficulty d : cfg.difficulties) run_scenario(cfg, {size, d}, result);
  }
  return result;
}

ExperimentResult run_full_experiment(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.outputDir);
  ExperimentResult result = run_experiment(cfg);
  write_results(result.records, cfg.outputDir);
  return result;
}

std::vector<SummaryRow> summarize(std::span<const MetricsRecord> records) {
  struct Sums {
    std::size_t rows = 0;
    double success = 0.0;
    std::size_t pathRows = 0;
    double path = 0.0;
  };
  std::vector<SummaryRow> out;
  std::vector<Sums> sums;
  std::map<std::tuple<int, int, int>, std::size_t> slot;
  for (const MetricsRecord& r : records) {
    const auto key = std::make_tuple(static_cast<int>(r.approach), r.size, static_cast<int>(r.difficulty));
    auto [it, fresh] = slot.try_emplace(key, out.size());
    if (fresh) {
      out.push_back({r.approach, r.size, r.difficulty, 0, 0.0, std::nullopt, 0.0, 0.0, 0.0});
      sums.emplace_back();
    }
    SummaryRow& g = out[it->second];
    Sums& s = sums[it->second];
    ++s.rows;
    s.success += r.successRate;
    if (r.meanPathLength) {
      ++s.pathRows;
      s.path += *r.meanPathLength;
    }
    if (r.timeStep > 0) {
      ++g.timeSteps;
      g.totalAdaptationSeconds += r.adaptationSeconds;
    }
    if (r.initialTrainingSeconds) g.initialTrainingSeconds = *r.initialTrainingSeconds;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    SummaryRow& g = out[i];
    g.meanSuccessRate = sums[i].success / static_cast<double>(sums[i].rows);
    if (sums[i].pathRows) g.meanPathLength = sums[i].path / static_cast<double>(sums[i].pathRows);
    if (g.timeSteps) g.meanAdaptationSeconds = g.totalAdaptationSeconds / static_cast<double>(g.timeSteps);
  }
  return out;
}

void write_results(std::span<const MetricsRecord> records, const std::filesystem::path& dir) {
  const std::filesystem::path detailedPath = dir / kDetailedFile;
  const std::filesystem::path summaryPath = dir / kResultsFile;
  std::ofstream detailed(detailedPath);
  if (!detailed) throw std::runtime_error("cannot write " + detailedPath.string());
  std::ofstream summary(summaryPath);
  if (!summary) throw std::runtime_error("cannot write " + summaryPath.string());

  detailed << "approach,size,difficulty,time_step,num_changes,success_rate,mean_path_length,"
              "adaptation_seconds,cumulative_adaptation_seconds,initial_training_seconds\n";
  for (const MetricsRecord& r : records) {
    detailed << to_string(r.approach) << ',' << r.size << ',' << to_string(r.difficulty) << ','
             << r.timeStep << ',' << r.numChanges << ',' << fixed6(r.successRate) << ','
             << fixed6(r.meanPathLength) << ',' << fixed6(r.adaptationSeconds) << ','
             << fixed6(r.cumulativeAdaptationSeconds) << ',' << fixed6(r.initialTrainingSeconds)
             << '\n';
  }

  summary << "approach,size,difficulty,time_steps,mean_success_rate,mean_path_length,"
             "mean_adaptation_seconds,total_adaptation_seconds,initial_training_seconds\n";
  for (const SummaryRow& g : summarize(records)) {
    summary << to_string(g.approach) << ',' << g.size << ',' << to_string(g.difficulty) << ','
            << g.timeSteps << ',' << fixed6(g.meanSuccessRate) << ',' << fixed6(g.meanPathLength)
            << ',' << fixed6(g.meanAdaptationSeconds) << ',' << fixed6(g.totalAdaptationSeconds)
            << ',' << fixed6(g.initialTrainingSeconds) << '\n';
  }
  if (!detailed || !summary) throw std::runtime_error("write failed in " + dir.string());
}

} // namespace dynapath
