#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/grid.hpp"
#include "dynapath/qtable.hpp"

namespace dynapath {

/// Regions with both sides at or below this size are not split further.
inline constexpr int kMaxLeafSide = 20;

/// Stored success rate of a node that has never been trained.
inline constexpr double kUntrainedRate = -1.0;

struct TreeNode {
  explicit TreeNode(const Region& r, TreeNode* p = nullptr)
      : region(r), parent(p), qtable(r), depth(p ? p->depth + 1 : 0) {}

  TreeNode(const TreeNode&) = delete;
  TreeNode& operator=(const TreeNode&) = delete;

  bool is_leaf() const { return children.empty(); }
  bool is_root() const { return parent == nullptr; }

  Region region;
  TreeNode* parent;
  std::vector<std::unique_ptr<TreeNode>> children;
  QTable qtable;
  double successRate = kUntrainedRate;
  bool trained = false;
  int depth;
};

/// Quadtree over a rows x cols grid. Nodes larger than kMaxLeafSide on either
/// side split at the integer midpoint into four children.
std::unique_ptr<TreeNode> decompose(int rows, int cols);

/// Number of levels; a root without children has height 1.
int tree_height(const TreeNode& root);
std::size_t node_count(const TreeNode& root);

/// Leaves in depth-first child order (top-left, top-right, bottom-left, bottom-right).
std::vector<TreeNode*> leaves(TreeNode& root);
/// Every node in pre-order.
std::vector<TreeNode*> all_nodes(TreeNode& root);

/// Leaf containing the cell; throws "unlocalizable change" when outside the root.
TreeNode& leaf_for(TreeNode& root, Cell c);

/// Distinct leaves touched by the events (both endpoints of every move), in
/// the order leaves() would list them.
std::vector<TreeNode*> leaves_for_changes(TreeNode& root, std::span<const ChangeEvent> changes);
std::vector<TreeNode*> leaves_for_cells(TreeNode& root, std::span<const Cell> cells);

/// Copy the node's table into the matching block of every ancestor.
void propagate_up(TreeNode& node);
/// Copy the node's table into the matching block of every descendant.
void propagate_down(TreeNode& node);

const TreeNode& root_of(const TreeNode& node);

/// Greedy walk, then top-two-action DFS, confined to `region`. Returns the
/// path to a station or nothing.
std::optional<Path> path_search(const QTable& qtable, Cell start, const GridEnvironment& env,
                                const Region& region);

struct SearchSummary {
  std::size_t starts = 0;    // non-obstacle cells examined
  std::size_t successes = 0; // starts with a path
  double lengthSum = 0.0;    // summed lengths of successful paths

  double success_rate() const {
    return starts == 0 ? 1.0 : static_cast<double>(successes) / static_cast<double>(starts);
  }
  std::optional<double> mean_length() const {
    if (successes == 0) return std::nullopt;
    return lengthSum / static_cast<double>(successes);
  }
};

/// Reusable scratch for running path_search from many starts of one region.
class PathSearcher {
public:
  PathSearcher(const QTable& qtable, const GridEnvironment& env, const Region& region);

  std::optional<Path> search(Cell start);

  /// Runs search from every non-obstacle cell of the region. Cells proven
  /// unable to reach a station by an earlier failed search are skipped; the
  /// result is identical to searching each start independently.
  SearchSummary evaluate_all();

private:
  std::optional<Path> greedy(Cell start) const;
  std::optional<Path> two_best(Cell start, bool recordFailures);
  bool walkable(Cell c) const { return region_.contains(c) && !env_.is_obstacle(c); }

  const QTable& qtable_;
  const GridEnvironment& env_;
  Region region_;
  std::vector<std::uint32_t> visitedStamp_;
  std::vector<std::int32_t> parent_;
  std::vector<std::uint8_t> knownFailure_;
  std::vector<Cell> stack_;
  std::uint32_t stamp_ = 0;
};

/// Fraction of non-obstacle cells of node.region from which the root policy
/// reaches a station without leaving the region. 1.0 when the region has no
/// non-obstacle cell.
double compute_success_rate(const TreeNode& node, const TreeNode& root, const GridEnvironment& env);

/// Greedy action per cell; -1 marks obstacle cells.
class Policy {
public:
  Policy(const Region& region, std::vector<std::int8_t> actions)
      : region_(region), actions_(std::move(actions)) {}

  const Region& region() const { return region_; }
  int action(Cell c) const { return actions_[region_.local_index(c)]; }

private:
  Region region_;
  std::vector<std::int8_t> actions_;
};

Policy extract_policy(const TreeNode& root, const Region& region, const GridEnvironment& env);

/// Text grid with one glyph per cell: arrows for actions, '#' for obstacles,
/// 'C' for stations. UTF-8.
void write_policy(std::ostream& out, const Policy& policy, const GridEnvironment& env);

} // namespace dynapath
