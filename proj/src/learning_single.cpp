#include "dynapath/learning_single.hpp"

#include <stdexcept>

namespace dynapath {

StartSelector::StartSelector(const GridEnvironment& env, const Region& region)
    : region_(region), slotOf_(region.cell_count(), -1) {
  for (std::size_t i = 0; i < region.cell_count(); ++i) {
    const Cell c = region.cell_at(i);
    if (!env.is_obstacle(c)) {
      slotOf_[i] = static_cast<std::int32_t>(cells_.size());
      cells_.push_back(c);
    }
  }
  picks_.assign(cells_.size(), 0);
  successes_.assign(cells_.size(), 0);
  current_.assign(cells_.size(), 0.0);
  tree_.assign(cells_.size() + 1, 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) set_weight(i, 1.0);
}

std::size_t StartSelector::slot(Cell c) const {
  if (!region_.contains(c)) throw std::out_of_range("StartSelector: cell outside region");
  const std::int32_t s = slotOf_[region_.local_index(c)];
  if (s < 0) throw std::out_of_range("StartSelector: obstacle cell");
  return static_cast<std::size_t>(s);
}

void StartSelector::set_weight(std::size_t i, double w) {
  const double delta = w - current_[i];
  current_[i] = w;
  for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
}

std::size_t StartSelector::find_prefix(double target) const {
  // Smallest slot whose inclusive prefix sum exceeds target.
  std::size_t pos = 0;
  std::size_t step = 1;
  while (step * 2 < tree_.size()) step *= 2;
  for (; step > 0; step /= 2) {
    if (pos + step < tree_.size() && tree_[pos + step] <= target) {
      pos += step;
      target -= tree_[pos];
    }
  }
  return std::min(pos, cells_.size() - 1);
}

Cell StartSelector::select(Rng& rng) {
  if (cells_.empty()) {
    throw std::logic_error("StartSelector: no eligible start cell");
  }
  double total = 0.0;
  for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1)) total += tree_[k];
  const std::size_t i = find_prefix(rng.uniform() * total);
  ++picks_[i];
  set_weight(i, weight_of(i));
  return cells_[i];
}

void StartSelector::record(Cell c, bool success) {
  const std::size_t i = slot(c);
  if (success && successes_[i] < picks_[i]) {
    ++successes_[i];
    set_weight(i, weight_of(i));
  }
}

void StartSelector::set_counts(Cell c, std::uint32_t picks, std::uint32_t successes) {
  if (successes > picks) throw std::invalid_argument("StartSelector: more successes than picks");
  const std::size_t i = slot(c);
  picks_[i] = picks;
  successes_[i] = successes;
  set_weight(i, weight_of(i));
}

void q_update(QTable& q, const Experience& e, double alpha, double gamma) {
  const double bootstrap = e.terminal ? 0.0 : q.max_value(e.sNext);
  double& entry = q.at(e.s, e.a);
  entry += alpha * (e.r + gamma * bootstrap - entry);
}

bool run_episode(QTable& q, const GridEnvironment& env, const LearnerConfig& config,
                 StartSelector& sel, ReplayBuffer& buffer, Rng& rng) {
  const Region& region = q.region();
  const Cell start = sel.select(rng);
  bool success = env.is_station(start);
  Cell pos = start;
  const std::size_t cap = config.step_cap(region);
  for (std::size_t t = 0; t < cap && !success; ++t) {
    int action;
    if (rng.chance(config.epsilon)) {
      action = static_cast<int>(rng.below(kNumActions));
    } else {
      action = q.best_action(pos);
    }
    const StepResult res = step(env, pos, action, region);
    const Experience e{pos, action, res.reward, res.next, res.terminal};
    q_update(q, e, config.alpha, config.gamma);
    if (buffer.push(e)) {
      for (const Experience& old : buffer.items()) q_update(q, old, config.alpha, config.gamma);
      buffer.clear();
    }
    pos = res.next;
    success = res.terminal;
  }
  sel.record(start, success);
  return success;
}

bool check_convergence(const QTable& prev, const QTable& cur, double threshold) {
  return prev.max_abs_diff(cur) < threshold;
}

std::size_t train_single(TreeNode& node, const GridEnvironment& env, const LearnerConfig& config,
                         Rng& rng) {
  StartSelector sel(env, node.region);
  node.trained = true;
  if (sel.empty()) {
    return 0;
  }
  ReplayBuffer buffer;
  QTable snapshot = node.qtable;
  const std::size_t maxEpisodes = config.max_episodes(node.region);
  std::size_t passes = 0;
  std::size_t episodes = 0;
  while (episodes < maxEpisodes) {
    run_episode(node.qtable, env, config, sel, buffer, rng);
    ++episodes;
    if (episodes % config.convergenceCheckPeriod != 0) continue;
    if (check_convergence(snapshot, node.qtable, config.convergenceThreshold)) {
      if (++passes >= config.convergenceConsecutive) break;
    } else {
      passes = 0;
    }
    snapshot = node.qtable;
  }
  return episodes;
}

} // namespace dynapath
