#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/hierarchy.hpp"
#include "dynapath/learning_single.hpp"
#include "dynapath/qtable.hpp"
#include "dynapath/rng.hpp"

namespace dynapath {

enum class WeightScheme { EqAvg, ImAvg };

struct FedConfig {
  double eta = 0.4;
  double gamma = 0.9;
  std::size_t agents = 12;
  std::size_t syncPeriod = 1000;
  /// Default: 200 x region cells.
  std::optional<std::size_t> totalIterations;
  double epsilonBehavior = 0.2;
  /// Steps before a trajectory is forcibly restarted. Default: 2 x region cells.
  std::optional<std::size_t> trajectoryStepCap;

  std::size_t total_iterations(const Region& r) const {
    return totalIterations.value_or(200 * r.cell_count());
  }
  std::size_t trajectory_cap(const Region& r) const {
    return trajectoryStepCap.value_or(2 * r.cell_count());
  }
};

/// Per-agent visit counts of every (state, action) inside the current sync window.
class VisitCounts {
public:
  VisitCounts(std::size_t agents, const Region& region);

  std::size_t agents() const { return counts_.size(); }
  const Region& region() const { return region_; }

  void increment(std::size_t agent, Cell s, int a) { ++counts_[agent][index(s, a)]; }
  std::uint32_t count(std::size_t agent, Cell s, int a) const { return counts_[agent][index(s, a)]; }
  std::span<const std::uint32_t> agent_counts(std::size_t agent) const { return counts_[agent]; }

  void reset();

private:
  std::size_t index(Cell s, int a) const {
    return region_.local_index(s) * kNumActions + static_cast<std::size_t>(a);
  }

  Region region_;
  std::vector<std::vector<std::uint32_t>> counts_;
};

/// Local update of a single entry: Q <- (1-eta) Q + eta (r + gamma V(s')).
void local_step(QTable& localQ, const Experience& e, double eta, double gamma, VisitCounts& visits,
                std::size_t agent);

/// Importance weights (1-eta)^(-N_k) / sum_k' (1-eta)^(-N_k'). Throws
/// "degenerate weight base" for eta outside (0, 1).
std::vector<double> importance_weights(std::span<const std::uint32_t> visits, double eta);
std::vector<double> importance_weights(const VisitCounts& visits, double eta, Cell s, int a);

/// Entry-wise weighted average of the local tables. The result is broadcast
/// back into every local table and the visit counts are reset.
QTable aggregate(std::span<QTable> localQs, WeightScheme scheme, VisitCounts& visits, double eta);

/// Federated asynchronous Q-learning on node.region for exactly
/// total_iterations steps per agent, averaging every syncPeriod steps.
/// `threads` bounds how many agents run concurrently.
void train_fed(TreeNode& node, const GridEnvironment& env, const FedConfig& config,
               WeightScheme scheme, Rng& rng, unsigned threads = 1);

} // namespace dynapath
