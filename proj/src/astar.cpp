#include "dynapath/astar.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace dynapath {

namespace {

constexpr int kFar = std::numeric_limits<int>::max() / 4;

} // namespace

StationDistance::StationDistance(const GridEnvironment& env)
    : cols_(static_cast<std::size_t>(env.cols())),
      dist_(static_cast<std::size_t>(env.rows()) * static_cast<std::size_t>(env.cols()), kFar) {
  const int rows = env.rows();
  const int cols = env.cols();
  auto at = [&](int r, int c) -> int& {
    return dist_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (env.is_station({r, c})) {
        at(r, c) = 0;
        hasStation_ = true;
      }
  // Two-pass chessboard distance transform.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int& d = at(r, c);
      if (r > 0) {
        d = std::min(d, at(r - 1, c) + 1);
        if (c > 0) d = std::min(d, at(r - 1, c - 1) + 1);
        if (c + 1 < cols) d = std::min(d, at(r - 1, c + 1) + 1);
      }
      if (c > 0) d = std::min(d, at(r, c - 1) + 1);
    }
  }
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = cols - 1; c >= 0; --c) {
      int& d = at(r, c);
      if (r + 1 < rows) {
        d = std::min(d, at(r + 1, c) + 1);
        if (c > 0) d = std::min(d, at(r + 1, c - 1) + 1);
        if (c + 1 < cols) d = std::min(d, at(r + 1, c + 1) + 1);
      }
      if (c + 1 < cols) d = std::min(d, at(r, c + 1) + 1);
    }
  }
}

namespace {

/// A* with scratch buffers reused across queries on one grid.
class Searcher {
public:
  Searcher(const GridEnvironment& env, const StationDistance& h)
      : env_(env), h_(h), g_(cellCount(env), 0), parent_(cellCount(env), -1),
        seen_(cellCount(env), 0), closed_(cellCount(env), 0) {}

  std::optional<Path> run(Cell start) {
    if (!env_.contains(start) || env_.is_obstacle(start)) {
      throw std::invalid_argument("invalid start");
    }
    if (++stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      std::fill(closed_.begin(), closed_.end(), 0);
      stamp_ = 1;
    }
    lastClosed_.clear();
    if (!h_.has_station()) return std::nullopt;

    using Key = std::tuple<int, int, std::size_t>; // f, h, row-major index
    std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
    const std::size_t s = env_.index(start);
    seen_[s] = stamp_;
    g_[s] = 0;
    parent_[s] = -1;
    open.emplace(h_(start), h_(start), s);
    const auto cols = static_cast<std::size_t>(env_.cols());

    while (!open.empty()) {
      const auto [f, h, idx] = open.top();
      open.pop();
      if (closed_[idx] == stamp_) continue;
      closed_[idx] = stamp_;
      lastClosed_.push_back(idx);
      const Cell cur{static_cast<int>(idx / cols), static_cast<int>(idx % cols)};
      if (env_.is_station(cur)) {
        return reconstruct(idx);
      }
      for (int a = 0; a < kNumActions; ++a) {
        const Cell nb = displaced(cur, a);
        if (!env_.contains(nb) || env_.is_obstacle(nb)) continue;
        const std::size_t ni = env_.index(nb);
        if (closed_[ni] == stamp_) continue;
        const int ng = g_[idx] + 1;
        if (seen_[ni] != stamp_ || ng < g_[ni]) {
          seen_[ni] = stamp_;
          g_[ni] = ng;
          parent_[ni] = static_cast<std::int32_t>(idx);
          const int hn = h_(nb);
          open.emplace(ng + hn, hn, ni);
        }
      }
    }
    return std::nullopt;
  }

  /// Cells expanded by the last run.
  const std::vector<std::size_t>& last_closed() const { return lastClosed_; }

private:
  static std::size_t cellCount(const GridEnvironment& env) {
    return static_cast<std::size_t>(env.rows()) * static_cast<std::size_t>(env.cols());
  }

  Path reconstruct(std::size_t goal) const {
    const auto cols = static_cast<std::size_t>(env_.cols());
    Path p;
    for (std::int64_t i = static_cast<std::int64_t>(goal); i >= 0; i = parent_[static_cast<std::size_t>(i)]) {
      const auto u = static_cast<std::size_t>(i);
      p.cells.push_back({static_cast<int>(u / cols), static_cast<int>(u % cols)});
    }
    std::reverse(p.cells.begin(), p.cells.end());
    return p;
  }

  const GridEnvironment& env_;
  const StationDistance& h_;
  std::vector<int> g_;
  std::vector<std::int32_t> parent_;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> closed_;
  std::vector<std::size_t> lastClosed_;
  std::uint32_t stamp_ = 0;
};

} // namespace

std::optional<Path> astar_path(const GridEnvironment& env, const StationDistance& h, Cell start) {
  Searcher s(env, h);
  return s.run(start);
}

std::optional<Path> astar_path(const GridEnvironment& env, Cell start) {
  const StationDistance h(env);
  return astar_path(env, h, start);
}

PathTable::PathTable(int rows, int cols)
    : rows_(rows), cols_(cols),
      next_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), -1),
      length_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), -1) {}

void PathTable::set(Cell c, std::optional<Cell> next, int length) {
  const std::size_t i = index(c);
  next_[i] = next ? static_cast<std::int32_t>(index(*next)) : -1;
  length_[i] = length;
}

std::optional<Path> PathTable::path(Cell c) const {
  if (!has_path(c)) return std::nullopt;
  Path p;
  std::size_t i = index(c);
  const auto w = static_cast<std::size_t>(cols_);
  for (;;) {
    p.cells.push_back({static_cast<int>(i / w), static_cast<int>(i % w)});
    if (length_[i] == 0) break;
    i = static_cast<std::size_t>(next_[i]);
  }
  return p;
}

std::size_t PathTable::stored_count() const {
  return static_cast<std::size_t>(std::count_if(length_.begin(), length_.end(), [](int l) { return l >= 0; }));
}

PathTable plan_all(const GridEnvironment& env) {
  PathTable table(env.rows(), env.cols());
  const StationDistance h(env);
  Searcher searcher(env, h);
  std::vector<std::uint8_t> unreachable(static_cast<std::size_t>(env.rows()) * static_cast<std::size_t>(env.cols()), 0);
  for (int r = 0; r < env.rows(); ++r) {
    for (int c = 0; c < env.cols(); ++c) {
      const Cell start{r, c};
      if (env.is_obstacle(start) || table.has_path(start) || unreachable[env.index(start)]) continue;
      const std::optional<Path> p = searcher.run(start);
      if (!p) {
        // The search exhausted the start's component without meeting a station.
        for (std::size_t i : searcher.last_closed()) unreachable[i] = 1;
        continue;
      }
      const int len = static_cast<int>(p->length());
      for (int i = 0; i <= len; ++i) {
        const Cell cell = p->cells[static_cast<std::size_t>(i)];
        if (table.has_path(cell)) continue;
        std::optional<Cell> next;
        if (i < len) next = p->cells[static_cast<std::size_t>(i + 1)];
        table.set(cell, next, len - i);
      }
    }
  }
  return table;
}

PathEvaluation evaluate_paths(const PathTable& table, const GridEnvironment& envNow) {
  if (table.rows() != envNow.rows() || table.cols() != envNow.cols()) {
    throw std::invalid_argument("evaluate_paths: table and grid dimensions differ");
  }
  enum : std::uint8_t { kUnknown, kValid, kInvalid };
  std::vector<std::uint8_t> state(static_cast<std::size_t>(envNow.rows()) * static_cast<std::size_t>(envNow.cols()), kUnknown);
  std::vector<Cell> chain;

  auto resolve = [&](Cell start) {
    chain.clear();
    Cell c = start;
    std::uint8_t verdict = kInvalid;
    for (;;) {
      const std::uint8_t known = state[envNow.index(c)];
      if (known != kUnknown) {
        verdict = known;
        break;
      }
      chain.push_back(c);
      if (!table.has_path(c) || envNow.is_obstacle(c)) {
        verdict = kInvalid;
        break;
      }
      if (table.length(c) == 0) {
        verdict = envNow.is_station(c) ? kValid : kInvalid;
        break;
      }
      c = *table.next(c);
    }
    for (Cell x : chain) state[envNow.index(x)] = verdict;
    return verdict == kValid;
  };

  std::size_t starts = 0;
  std::size_t ok = 0;
  double lengthSum = 0.0;
  for (int r = 0; r < envNow.rows(); ++r) {
    for (int c = 0; c < envNow.cols(); ++c) {
      const Cell cell{r, c};
      if (envNow.is_obstacle(cell)) continue;
      ++starts;
      if (resolve(cell)) {
        ++ok;
        lengthSum += table.length(cell);
      }
    }
  }
  PathEvaluation out;
  out.successRate = starts == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(starts);
  if (ok > 0) out.meanLength = lengthSum / static_cast<double>(ok);
  return out;
}

OracleResult oracle_step(const GridEnvironment& envNow) {
  PathTable table = plan_all(envNow);
  const double rate = evaluate_paths(table, envNow).successRate;
  return {std::move(table), rate};
}

} // namespace dynapath
