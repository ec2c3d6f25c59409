#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/hierarchy.hpp"
#include "dynapath/qtable.hpp"
#include "dynapath/rng.hpp"

namespace dynapath {

struct Experience {
  Cell s;
  int a;
  double r;
  Cell sNext;
  bool terminal;
};

/// Holds up to `capacity` transitions in insertion order.
class ReplayBuffer {
public:
  static constexpr std::size_t kDefaultCapacity = 1000;

  explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {
    items_.reserve(capacity);
  }

  /// Appends; returns true once the buffer is at capacity.
  bool push(const Experience& e) {
    items_.push_back(e);
    return items_.size() >= capacity_;
  }
  void clear() { items_.clear(); }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Experience>& items() const { return items_; }

private:
  std::size_t capacity_;
  std::vector<Experience> items_;
};

/// Prioritised start-cell sampler. Each non-obstacle cell of the region is
/// drawn with weight 1 - successes / (picks + 1).
class StartSelector {
public:
  StartSelector(const GridEnvironment& env, const Region& region);

  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  /// Weighted draw; increments the drawn cell's pick count.
  Cell select(Rng& rng);
  void record(Cell c, bool success);
  /// Overwrites one cell's counters, e.g. when restoring a saved state.
  void set_counts(Cell c, std::uint32_t picks, std::uint32_t successes);

  std::uint32_t pick_count(Cell c) const { return picks_[slot(c)]; }
  std::uint32_t success_count(Cell c) const { return successes_[slot(c)]; }
  double weight(Cell c) const { return weight_of(slot(c)); }

private:
  std::size_t slot(Cell c) const;
  double weight_of(std::size_t i) const {
    return 1.0 - static_cast<double>(successes_[i]) / (static_cast<double>(picks_[i]) + 1.0);
  }
  void set_weight(std::size_t i, double w);
  std::size_t find_prefix(double target) const;

  Region region_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> slotOf_; // region-local index -> slot, -1 for obstacles
  std::vector<std::uint32_t> picks_;
  std::vector<std::uint32_t> successes_;
  std::vector<double> current_; // weight currently stored in the tree
  std::vector<double> tree_;    // Fenwick tree over slot weights
};

inline Cell select_start(StartSelector& sel, Rng& rng) { return sel.select(rng); }

struct LearnerConfig {
  double alpha = 0.4;
  double gamma = 0.9;
  double epsilon = 0.1;
  double convergenceThreshold = 5e-4;
  std::size_t convergenceCheckPeriod = 50;
  std::size_t convergenceConsecutive = 2;
  /// Default: 200 x region cells.
  std::optional<std::size_t> maxEpisodes;
  /// Default: 4 x region cells.
  std::optional<std::size_t> episodeStepCap;

  std::size_t max_episodes(const Region& r) const { return maxEpisodes.value_or(200 * r.cell_count()); }
  std::size_t step_cap(const Region& r) const { return episodeStepCap.value_or(4 * r.cell_count()); }
};

/// Tabular Q-learning update. Terminal transitions bootstrap from zero.
void q_update(QTable& q, const Experience& e, double alpha, double gamma);

/// One epsilon-greedy episode on q.region(). Returns true when a station was reached.
bool run_episode(QTable& q, const GridEnvironment& env, const LearnerConfig& config,
                 StartSelector& sel, ReplayBuffer& buffer, Rng& rng);

/// True iff every entry moved by strictly less than `threshold`.
bool check_convergence(const QTable& prev, const QTable& cur, double threshold);

/// Trains node.qtable in place until convergence or the episode cap; marks
/// the node trained. Returns the number of episodes run.
std::size_t train_single(TreeNode& node, const GridEnvironment& env, const LearnerConfig& config,
                         Rng& rng);

} // namespace dynapath
