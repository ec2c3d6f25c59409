#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/hierarchy.hpp"
#include "dynapath/learning_fed.hpp"
#include "dynapath/learning_single.hpp"
#include "dynapath/parallel.hpp"
#include "dynapath/rng.hpp"

namespace dynapath {

enum class TrainingMode { SingleAgent, FedEqAvg, FedImAvg };

std::string_view to_string(TrainingMode m);

struct StrategyConfig {
  double dropThreshold = 0.01;
  double minSuccessRate = 0.9;
  TrainingMode mode = TrainingMode::SingleAgent;
  LearnerConfig learner{};
  FedConfig fed{};
  unsigned threads = default_thread_budget();
};

/// Retrain when untrained (oldRate < 0), when the rate fell by more than the
/// drop threshold, or when it sits below the minimum.
bool retrain_decision(double oldRate, double newRate, const StrategyConfig& cfg);

/// What the tree strategies need from the outside world.
class StrategyBackend {
public:
  virtual ~StrategyBackend() = default;
  virtual double success_rate(TreeNode& node) = 0;
  /// Train the nodes and make the root table reflect the results.
  virtual void train(std::span<TreeNode* const> nodes, TrainingMode mode) = 0;
};

/// Backend over a real grid: root-policy success rates and the tabular or
/// federated learners. Nodes of a wave train concurrently, each on its own
/// stream forked from `rng` in wave order.
class LearningBackend final : public StrategyBackend {
public:
  LearningBackend(TreeNode& root, const GridEnvironment& env, const StrategyConfig& cfg, Rng& rng)
      : root_(root), env_(env), cfg_(cfg), rng_(rng) {}

  double success_rate(TreeNode& node) override;
  void train(std::span<TreeNode* const> nodes, TrainingMode mode) override;

private:
  TreeNode& root_;
  const GridEnvironment& env_;
  const StrategyConfig& cfg_;
  Rng& rng_;
};

struct StrategyReport {
  /// Nodes trained in each wave, in training order.
  std::vector<std::vector<TreeNode*>> waves;

  std::vector<TreeNode*> retrained() const;
  bool empty() const { return waves.empty(); }
};

/// Retrains every changed leaf (all leaves when the list is empty) with the
/// single-agent learner. No gating, no escalation.
StrategyReport only_train_leaf_nodes(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                                     const StrategyConfig& cfg, StrategyBackend& backend);
StrategyReport only_train_leaf_nodes(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                                     const GridEnvironment& env, const StrategyConfig& cfg, Rng& rng);

/// Gated retraining with escalation to parents whose children stay below the
/// minimum success rate after training.
StrategyReport smart_hierarchy(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                               const StrategyConfig& cfg, StrategyBackend& backend);
StrategyReport smart_hierarchy(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                               const GridEnvironment& env, const StrategyConfig& cfg, Rng& rng);

} // namespace dynapath
