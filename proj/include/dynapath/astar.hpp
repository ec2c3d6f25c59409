#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/grid.hpp"

namespace dynapath {

constexpr int chebyshev(Cell a, Cell b) {
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr > dc ? dr : dc;
}

/// Chebyshev distance from every cell to its nearest station, ignoring
/// obstacles. Used as the A* heuristic.
class StationDistance {
public:
  explicit StationDistance(const GridEnvironment& env);

  bool has_station() const { return hasStation_; }
  int operator()(Cell c) const { return dist_[static_cast<std::size_t>(c.row) * cols_ + static_cast<std::size_t>(c.col)]; }

private:
  std::size_t cols_;
  bool hasStation_ = false;
  std::vector<int> dist_;
};

/// Shortest 8-connected unit-cost path from start to the nearest station, or
/// nothing when no station is reachable. Throws "invalid start".
std::optional<Path> astar_path(const GridEnvironment& env, Cell start);
std::optional<Path> astar_path(const GridEnvironment& env, const StationDistance& h, Cell start);

/// Shortest path per non-obstacle cell, stored as a successor forest: every
/// cell records the next cell on its path and the remaining length.
class PathTable {
public:
  PathTable(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool has_path(Cell c) const { return length_[index(c)] >= 0; }
  /// Remaining steps to the station; -1 when absent.
  int length(Cell c) const { return length_[index(c)]; }
  std::optional<Path> path(Cell c) const;
  /// Successor on the stored path; nothing at a station or when absent.
  std::optional<Cell> next(Cell c) const {
    const std::int32_t n = next_[index(c)];
    if (n < 0) return std::nullopt;
    return Cell{n / cols_, n % cols_};
  }

  void set(Cell c, std::optional<Cell> next, int length);

  std::size_t stored_count() const;

private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c.col);
  }

  int rows_;
  int cols_;
  std::vector<std::int32_t> next_;
  std::vector<std::int32_t> length_;
};

/// Plans every non-obstacle cell, recording the suffix of each computed path
/// for the cells it passes through instead of searching from them again.
PathTable plan_all(const GridEnvironment& env);

struct PathEvaluation {
  double successRate = 0.0;
  std::optional<double> meanLength;
};

/// Scores stored paths against the current grid: a start counts when its path
/// exists, avoids every current obstacle and still ends on a station.
PathEvaluation evaluate_paths(const PathTable& table, const GridEnvironment& envNow);

inline double static_evaluate(const PathTable& table, const GridEnvironment& envNow) {
  return evaluate_paths(table, envNow).successRate;
}

struct OracleResult {
  PathTable table;
  double successRate;
};

OracleResult oracle_step(const GridEnvironment& envNow);

} // namespace dynapath
