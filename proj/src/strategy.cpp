#include "dynapath/strategy.hpp"

#include <algorithm>

namespace dynapath {

std::string_view to_string(TrainingMode m) {
  switch (m) {
  case TrainingMode::SingleAgent:
    return "single-agent";
  case TrainingMode::FedEqAvg:
    return "fed-eqavg";
  case TrainingMode::FedImAvg:
    return "fed-imavg";
  }
  return "?";
}

bool retrain_decision(double oldRate, double newRate, const StrategyConfig& cfg) {
  if (oldRate < 0.0) return true;
  return (oldRate - newRate > cfg.dropThreshold) || (newRate < cfg.minSuccessRate);
}

double LearningBackend::success_rate(TreeNode& node) {
  return compute_success_rate(node, root_, env_);
}

void LearningBackend::train(std::span<TreeNode* const> nodes, TrainingMode mode) {
  if (nodes.empty()) return;
  std::vector<Rng> streams;
  streams.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) streams.push_back(rng_.fork());

  const unsigned budget = std::max(1u, cfg_.threads);
  const unsigned perNode = std::max<unsigned>(1, budget / static_cast<unsigned>(nodes.size()));
  parallel_for(nodes.size(), budget, [&](std::size_t i) {
    TreeNode& node = *nodes[i];
    switch (mode) {
    case TrainingMode::SingleAgent:
      train_single(node, env_, cfg_.learner, streams[i]);
      break;
    case TrainingMode::FedEqAvg:
      train_fed(node, env_, cfg_.fed, WeightScheme::EqAvg, streams[i], perNode);
      break;
    case TrainingMode::FedImAvg:
      train_fed(node, env_, cfg_.fed, WeightScheme::ImAvg, streams[i], perNode);
      break;
    }
  });

  // Shallowest first: an ancestor trained in the same wave is overridden by
  // its descendants' blocks, not the other way round.
  std::vector<TreeNode*> order(nodes.begin(), nodes.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const TreeNode* a, const TreeNode* b) { return a->depth < b->depth; });
  for (TreeNode* n : order) {
    propagate_up(*n);
    propagate_down(*n);
  }
}

std::vector<TreeNode*> StrategyReport::retrained() const {
  std::vector<TreeNode*> out;
  for (const auto& w : waves) out.insert(out.end(), w.begin(), w.end());
  return out;
}

namespace {

void push_unique(std::vector<TreeNode*>& v, TreeNode* n) {
  if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
}

/// Trains a wave, records it and stores the post-training success rates.
void train_wave(std::vector<TreeNode*> wave, TrainingMode mode, StrategyBackend& backend,
                StrategyReport& report) {
  backend.train(wave, mode);
  for (TreeNode* n : wave) n->successRate = backend.success_rate(*n);
  report.waves.push_back(std::move(wave));
}

/// Applies the retraining condition to an already trained node; on a pass
/// the stored rate is only raised, never lowered.
bool gate(TreeNode& node, const StrategyConfig& cfg, StrategyBackend& backend) {
  if (!node.trained) return true;
  const double oldRate = node.successRate;
  const double newRate = backend.success_rate(node);
  if (retrain_decision(oldRate, newRate, cfg)) return true;
  if (newRate > oldRate) node.successRate = newRate;
  return false;
}

} // namespace

StrategyReport only_train_leaf_nodes(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                                     const StrategyConfig& /*cfg*/, StrategyBackend& backend) {
  std::vector<TreeNode*> wave;
  if (changedLeaves.empty()) {
    wave = leaves(root);
  } else {
    for (TreeNode* n : changedLeaves)
      if (n->is_leaf()) push_unique(wave, n);
  }
  StrategyReport report;
  if (!wave.empty()) train_wave(std::move(wave), TrainingMode::SingleAgent, backend, report);
  return report;
}

StrategyReport only_train_leaf_nodes(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                                     const GridEnvironment& env, const StrategyConfig& cfg, Rng& rng) {
  LearningBackend backend(root, env, cfg, rng);
  return only_train_leaf_nodes(root, changedLeaves, cfg, backend);
}

StrategyReport smart_hierarchy(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                               const StrategyConfig& cfg, StrategyBackend& backend) {
  const bool initial = changedLeaves.empty();
  std::vector<TreeNode*> wave;
  if (initial) {
    wave = leaves(root);
  } else {
    std::vector<TreeNode*> candidates;
    for (TreeNode* n : changedLeaves) push_unique(candidates, n);
    for (TreeNode* leaf : candidates)
      if (gate(*leaf, cfg, backend)) wave.push_back(leaf);
  }

  StrategyReport report;
  while (!wave.empty()) {
    train_wave(wave, cfg.mode, backend, report);
    std::vector<TreeNode*> parents;
    for (TreeNode* n : report.waves.back())
      if (n->successRate < cfg.minSuccessRate && n->parent) push_unique(parents, n->parent);
    wave.clear();
    for (TreeNode* p : parents)
      if (gate(*p, cfg, backend)) wave.push_back(p);
  }
  return report;
}

StrategyReport smart_hierarchy(TreeNode& root, std::span<TreeNode* const> changedLeaves,
                               const GridEnvironment& env, const StrategyConfig& cfg, Rng& rng) {
  LearningBackend backend(root, env, cfg, rng);
  return smart_hierarchy(root, changedLeaves, cfg, backend);
}

} // namespace dynapath
