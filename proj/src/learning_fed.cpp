#include "dynapath/learning_fed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynapath/parallel.hpp"

namespace dynapath {

VisitCounts::VisitCounts(std::size_t agents, const Region& region) : region_(region) {
  if (agents == 0) throw std::invalid_argument("VisitCounts: need at least one agent");
  counts_.assign(agents, std::vector<std::uint32_t>(region.cell_count() * kNumActions, 0));
}

void VisitCounts::reset() {
  for (auto& row : counts_) std::fill(row.begin(), row.end(), 0u);
}

void local_step(QTable& localQ, const Experience& e, double eta, double gamma, VisitCounts& visits,
                std::size_t agent) {
  const double v = e.terminal ? 0.0 : localQ.max_value(e.sNext);
  double& entry = localQ.at(e.s, e.a);
  entry = (1.0 - eta) * entry + eta * (e.r + gamma * v);
  visits.increment(agent, e.s, e.a);
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("degenerate weight base: eta must lie in (0, 1)");
  }
}

} // namespace

std::vector<double> importance_weights(std::span<const std::uint32_t> visits, double eta) {
  check_eta(eta);
  if (visits.empty()) throw std::invalid_argument("importance_weights: no agents");
  // Factor out (1-eta)^(-max N) so every term lies in (0, 1].
  const std::uint32_t top = *std::max_element(visits.begin(), visits.end());
  const double base = 1.0 - eta;
  std::vector<double> w(visits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < visits.size(); ++k) {
    w[k] = std::pow(base, static_cast<double>(top - visits[k]));
    total += w[k];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> importance_weights(const VisitCounts& visits, double eta, Cell s, int a) {
  std::vector<std::uint32_t> n(visits.agents());
  for (std::size_t k = 0; k < n.size(); ++k) n[k] = visits.count(k, s, a);
  return importance_weights(n, eta);
}

QTable aggregate(std::span<QTable> localQs, WeightScheme scheme, VisitCounts& visits, double eta) {
  if (localQs.empty()) throw std::invalid_argument("aggregate: no tables");
  const std::size_t agents = localQs.size();
  if (visits.agents() != agents) throw std::invalid_argument("aggregate: agent count mismatch");
  const Region& region = localQs.front().region();
  for (const QTable& q : localQs) {
    if (!(q.region() == region)) throw std::invalid_argument("aggregate: region mismatch");
  }

  // Powers (1-eta)^d for the shifted exponents; d never exceeds the largest count.
  std::vector<double> power;
  if (scheme == WeightScheme::ImAvg) {
    check_eta(eta);
    std::uint32_t top = 0;
    for (std::size_t k = 0; k < agents; ++k) {
      const auto c = visits.agent_counts(k);
      if (!c.empty()) top = std::max(top, *std::max_element(c.begin(), c.end()));
    }
    power.resize(static_cast<std::size_t>(top) + 1);
    for (std::size_t d = 0; d < power.size(); ++d) power[d] = std::pow(1.0 - eta, static_cast<double>(d));
  }

  QTable out(region);
  auto outValues = out.values();
  std::vector<std::span<const std::uint32_t>> counts(agents);
  for (std::size_t k = 0; k < agents; ++k) counts[k] = visits.agent_counts(k);

  for (std::size_t i = 0; i < outValues.size(); ++i) {
    // Running weighted mean: identical inputs reproduce themselves bit for bit.
    double mean = localQs[0].values()[i];
    if (scheme == WeightScheme::EqAvg) {
      for (std::size_t k = 1; k < agents; ++k) {
        mean += (localQs[k].values()[i] - mean) / static_cast<double>(k + 1);
      }
    } else {
      std::uint32_t top = 0;
      for (std::size_t k = 0; k < agents; ++k) top = std::max(top, counts[k][i]);
      double seen = power[top - counts[0][i]];
      for (std::size_t k = 1; k < agents; ++k) {
        const double w = power[top - counts[k][i]];
        seen += w;
        mean += (w / seen) * (localQs[k].values()[i] - mean);
      }
    }
    outValues[i] = mean;
  }

  for (QTable& q : localQs) q = out;
  visits.reset();
  return out;
}

namespace {

struct FedAgent {
  QTable q;
  Rng rng;
  Cell pos{};
  bool active = false;
  std::size_t trajectorySteps = 0;
};

} // namespace

void train_fed(TreeNode& node, const GridEnvironment& env, const FedConfig& config,
               WeightScheme scheme, Rng& rng, unsigned threads) {
  if (config.agents == 0 || config.syncPeriod == 0) {
    throw std::invalid_argument("train_fed: need at least one agent and a positive sync period");
  }
  const Region& region = node.region;
  std::vector<Cell> restarts;
  for (std::size_t i = 0; i < region.cell_count(); ++i) {
    const Cell c = region.cell_at(i);
    if (env.at(c) == CellType::Free) restarts.push_back(c);
  }
  const std::size_t total = config.total_iterations(region);
  node.trained = true;
  if (restarts.empty() || total == 0) {
    return;
  }

  std::vector<FedAgent> agents;
  agents.reserve(config.agents);
  for (std::size_t k = 0; k < config.agents; ++k) agents.push_back({node.qtable, rng.fork()});
  std::vector<QTable> tables(config.agents);
  VisitCounts visits(config.agents, region);
  const std::size_t trajectoryCap = config.trajectory_cap(region);

  auto advance = [&](std::size_t k, std::size_t steps) {
    FedAgent& ag = agents[k];
    for (std::size_t t = 0; t < steps; ++t) {
      if (!ag.active || ag.trajectorySteps >= trajectoryCap) {
        ag.pos = restarts[ag.rng.below(restarts.size())];
        ag.active = true;
        ag.trajectorySteps = 0;
      }
      int action;
      if (ag.rng.chance(config.epsilonBehavior)) {
        action = static_cast<int>(ag.rng.below(kNumActions));
      } else {
        action = ag.q.best_action(ag.pos);
      }
      const StepResult res = step(env, ag.pos, action, region);
      local_step(ag.q, {ag.pos, action, res.reward, res.next, res.terminal}, config.eta,
                 config.gamma, visits, k);
      ++ag.trajectorySteps;
      if (res.terminal) {
        ag.active = false;
      } else {
        ag.pos = res.next;
      }
    }
  };

  for (std::size_t done = 0; done < total;) {
    const std::size_t window = std::min(config.syncPeriod, total - done);
    parallel_for(agents.size(), threads, [&](std::size_t k) { advance(k, window); });
    done += window;
    for (std::size_t k = 0; k < agents.size(); ++k) tables[k] = std::move(agents[k].q);
    node.qtable = aggregate(tables, scheme, visits, config.eta);
    for (std::size_t k = 0; k < agents.size(); ++k) agents[k].q = std::move(tables[k]);
  }
}

} // namespace dynapath
