#include "dynapath/hierarchy.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace dynapath {

namespace {

void split(TreeNode& node) {
  const Region& r = node.region;
  if (r.rows() <= kMaxLeafSide && r.cols() <= kMaxLeafSide) {
    return;
  }
  const int midRow = (r.startRow + r.endRow) / 2;
  const int midCol = (r.startCol + r.endCol) / 2;
  const Region quads[4] = {
      {r.startRow, r.startCol, midRow, midCol},
      {r.startRow, midCol + 1, midRow, r.endCol},
      {midRow + 1, r.startCol, r.endRow, midCol},
      {midRow + 1, midCol + 1, r.endRow, r.endCol},
  };
  for (const Region& q : quads) {
    node.children.push_back(std::make_unique<TreeNode>(q, &node));
  }
  for (auto& child : node.children) {
    split(*child);
  }
}

void collect_leaves(TreeNode& node, std::vector<TreeNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (auto& c : node.children) collect_leaves(*c, out);
}

void collect_all(TreeNode& node, std::vector<TreeNode*>& out) {
  out.push_back(&node);
  for (auto& c : node.children) collect_all(*c, out);
}

void copy_down(TreeNode& node, const QTable& src) {
  for (auto& c : node.children) {
    c->qtable.copy_block_from(src, c->region);
    copy_down(*c, src);
  }
}

} // namespace

std::unique_ptr<TreeNode> decompose(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("decompose: dimensions must be positive");
  }
  auto root = std::make_unique<TreeNode>(Region{0, 0, rows - 1, cols - 1});
  split(*root);
  return root;
}

int tree_height(const TreeNode& root) {
  int h = 0;
  for (const auto& c : root.children) h = std::max(h, tree_height(*c));
  return h + 1;
}

std::size_t node_count(const TreeNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += node_count(*c);
  return n;
}

std::vector<TreeNode*> leaves(TreeNode& root) {
  std::vector<TreeNode*> out;
  collect_leaves(root, out);
  return out;
}

std::vector<TreeNode*> all_nodes(TreeNode& root) {
  std::vector<TreeNode*> out;
  collect_all(root, out);
  return out;
}

TreeNode& leaf_for(TreeNode& root, Cell c) {
  if (!root.region.contains(c)) {
    throw std::out_of_range("unlocalizable change");
  }
  TreeNode* node = &root;
  while (!node->is_leaf()) {
    TreeNode* next = nullptr;
    for (auto& child : node->children) {
      if (child->region.contains(c)) {
        next = child.get();
        break;
      }
    }
    node = next;
  }
  return *node;
}

std::vector<TreeNode*> leaves_for_cells(TreeNode& root, std::span<const Cell> cells) {
  std::vector<TreeNode*> hit;
  for (Cell c : cells) {
    TreeNode* leaf = &leaf_for(root, c);
    if (std::find(hit.begin(), hit.end(), leaf) == hit.end()) hit.push_back(leaf);
  }
  // Report in canonical leaf order so callers see a deterministic sequence.
  std::vector<TreeNode*> ordered;
  for (TreeNode* leaf : leaves(root)) {
    if (std::find(hit.begin(), hit.end(), leaf) != hit.end()) ordered.push_back(leaf);
  }
  return ordered;
}

std::vector<TreeNode*> leaves_for_changes(TreeNode& root, std::span<const ChangeEvent> changes) {
  std::vector<Cell> cells;
  cells.reserve(changes.size() * 2);
  for (const ChangeEvent& ev : changes) {
    cells.push_back(ev.from);
    cells.push_back(ev.to);
  }
  return leaves_for_cells(root, cells);
}

void propagate_up(TreeNode& node) {
  for (TreeNode* a = node.parent; a != nullptr; a = a->parent) {
    a->qtable.copy_block_from(node.qtable, node.region);
  }
}

void propagate_down(TreeNode& node) { copy_down(node, node.qtable); }

const TreeNode& root_of(const TreeNode& node) {
  const TreeNode* n = &node;
  while (n->parent) n = n->parent;
  return *n;
}

// ---------------------------------------------------------------------------
// Path search

PathSearcher::PathSearcher(const QTable& qtable, const GridEnvironment& env, const Region& region)
    : qtable_(qtable), env_(env), region_(region) {
  if (!qtable.region().contains(region) || !env.bounds().contains(region)) {
    throw std::invalid_argument("PathSearcher: region not covered by table or grid");
  }
  visitedStamp_.assign(region.cell_count(), 0);
  parent_.assign(region.cell_count(), -1);
  knownFailure_.assign(region.cell_count(), 0);
}

std::optional<Path> PathSearcher::greedy(Cell start) const {
  Path path;
  path.cells.push_back(start);
  Cell pos = start;
  const std::size_t cap = region_.cell_count();
  for (std::size_t steps = 0; steps < cap; ++steps) {
    const Cell next = displaced(pos, qtable_.best_action(pos));
    if (!walkable(next)) {
      return std::nullopt;
    }
    pos = next;
    path.cells.push_back(pos);
    if (env_.is_station(pos)) {
      return path;
    }
  }
  return std::nullopt;
}

std::optional<Path> PathSearcher::two_best(Cell start, bool recordFailures) {
  if (++stamp_ == 0) {
    std::fill(visitedStamp_.begin(), visitedStamp_.end(), 0);
    stamp_ = 1;
  }
  auto reconstruct = [this, start](Cell last) {
    Path path;
    for (Cell c = last;;) {
      path.cells.push_back(c);
      if (c == start) break;
      c = region_.cell_at(static_cast<std::size_t>(parent_[region_.local_index(c)]));
    }
    std::reverse(path.cells.begin(), path.cells.end());
    return path;
  };

  stack_.clear();
  stack_.push_back(start);
  visitedStamp_[region_.local_index(start)] = stamp_;
  std::size_t expansions = 0;
  const std::size_t cap = region_.cell_count();
  while (!stack_.empty() && expansions < cap) {
    const Cell pos = stack_.back();
    stack_.pop_back();
    ++expansions;
    const auto [best, second] = qtable_.top_two(pos);
    // Push the runner-up first so the best action is explored first.
    for (int a : {second, best}) {
      const Cell next = displaced(pos, a);
      if (!walkable(next)) continue;
      const std::size_t li = region_.local_index(next);
      if (visitedStamp_[li] == stamp_) continue;
      visitedStamp_[li] = stamp_;
      parent_[li] = static_cast<std::int32_t>(region_.local_index(pos));
      if (env_.is_station(next)) {
        return reconstruct(next);
      }
      stack_.push_back(next);
    }
  }
  if (recordFailures && stack_.empty()) {
    // Everything reachable from start was explored without meeting a station.
    for (std::size_t i = 0; i < visitedStamp_.size(); ++i) {
      if (visitedStamp_[i] == stamp_) knownFailure_[i] = 1;
    }
  }
  return std::nullopt;
}

std::optional<Path> PathSearcher::search(Cell start) {
  if (!region_.contains(start) || env_.is_obstacle(start)) {
    throw std::invalid_argument("path_search: start outside region or on an obstacle");
  }
  if (env_.is_station(start)) {
    return Path{{start}};
  }
  if (auto p = greedy(start)) {
    return p;
  }
  return two_best(start, false);
}

SearchSummary PathSearcher::evaluate_all() {
  SearchSummary summary;
  std::fill(knownFailure_.begin(), knownFailure_.end(), 0);
  for (int row = region_.startRow; row <= region_.endRow; ++row) {
    for (int col = region_.startCol; col <= region_.endCol; ++col) {
      const Cell c{row, col};
      if (env_.is_obstacle(c)) continue;
      ++summary.starts;
      if (knownFailure_[region_.local_index(c)]) continue;
      std::optional<Path> p;
      if (env_.is_station(c)) {
        p = Path{{c}};
      } else {
        p = greedy(c);
        if (!p) p = two_best(c, true);
      }
      if (p) {
        ++summary.successes;
        summary.lengthSum += static_cast<double>(p->length());
      }
    }
  }
  return summary;
}

std::optional<Path> path_search(const QTable& qtable, Cell start, const GridEnvironment& env,
                                const Region& region) {
  PathSearcher searcher(qtable, env, region);
  return searcher.search(start);
}

double compute_success_rate(const TreeNode& node, const TreeNode& root, const GridEnvironment& env) {
  PathSearcher searcher(root.qtable, env, node.region);
  return searcher.evaluate_all().success_rate();
}

// ---------------------------------------------------------------------------
// Policy view

Policy extract_policy(const TreeNode& root, const Region& region, const GridEnvironment& env) {
  if (!root.region.contains(region)) {
    throw std::invalid_argument("extract_policy: region outside root");
  }
  std::vector<std::int8_t> actions(region.cell_count(), -1);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Cell c = region.cell_at(i);
    if (!env.is_obstacle(c)) actions[i] = static_cast<std::int8_t>(root.qtable.best_action(c));
  }
  return Policy(region, std::move(actions));
}

void write_policy(std::ostream& out, const Policy& policy, const GridEnvironment& env) {
  static constexpr const char* kArrows[kNumActions] = {"↑", "↗", "→", "↘", "↓", "↙", "←", "↖"};
  const Region& r = policy.region();
  for (int row = r.startRow; row <= r.endRow; ++row) {
    for (int col = r.startCol; col <= r.endCol; ++col) {
      const Cell c{row, col};
      if (env.is_obstacle(c)) {
        out << '#';
      } else if (env.is_station(c)) {
        out << 'C';
      } else {
        out << kArrows[policy.action(c)];
      }
    }
    out << '\n';
  }
}

} // namespace dynapath
