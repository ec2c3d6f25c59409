#pragma once
// Independent reference implementations used as test oracles. None of these
// call into the library's search or planning code.

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dynapath/environment.hpp"
#include "dynapath/qtable.hpp"

namespace oracle {

using dynapath::Cell;
using dynapath::CellType;
using dynapath::GridEnvironment;
using dynapath::Region;

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Grid from rows of '.', '#', 'C'.
inline GridEnvironment grid(const std::vector<std::string>& rows, std::uint64_t seed = 0) {
  GridEnvironment env(static_cast<int>(rows.size()), static_cast<int>(rows.at(0).size()), seed);
  for (int r = 0; r < env.rows(); ++r)
    for (int c = 0; c < env.cols(); ++c) {
      const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      env.set({r, c}, ch == '#' ? CellType::Obstacle : ch == 'C' ? CellType::Station : CellType::Free);
    }
  return env;
}

inline bool inside(const Region& reg, int r, int c) {
  return r >= reg.startRow && r <= reg.endRow && c >= reg.startCol && c <= reg.endCol;
}

/// Multi-source 8-connected BFS from every station, restricted to `reg`.
/// Entry [r][c] is the step count to the nearest station or kUnreachable.
inline std::vector<std::vector<int>> bfs_distance(const GridEnvironment& env, const Region& reg) {
  std::vector<std::vector<int>> d(static_cast<std::size_t>(env.rows()),
                                  std::vector<int>(static_cast<std::size_t>(env.cols()), kUnreachable));
  std::deque<std::pair<int, int>> q;
  for (int r = reg.startRow; r <= reg.endRow; ++r)
    for (int c = reg.startCol; c <= reg.endCol; ++c)
      if (env.at({r, c}) == CellType::Station) {
        d[r][c] = 0;
        q.emplace_back(r, c);
      }
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop_front();
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (!dr && !dc) continue;
        const int nr = r + dr, nc = c + dc;
        if (!inside(reg, nr, nc) || env.at({nr, nc}) == CellType::Obstacle) continue;
        if (d[nr][nc] != kUnreachable) continue;
        d[nr][nc] = d[r][c] + 1;
        q.emplace_back(nr, nc);
      }
  }
  return d;
}

inline std::vector<std::vector<int>> bfs_distance(const GridEnvironment& env) {
  return bfs_distance(env, {0, 0, env.rows() - 1, env.cols() - 1});
}

/// Fraction of non-obstacle cells of `reg` that can reach a station inside it.
inline double reachable_fraction(const GridEnvironment& env, const Region& reg) {
  const auto d = bfs_distance(env, reg);
  std::size_t n = 0, ok = 0;
  for (int r = reg.startRow; r <= reg.endRow; ++r)
    for (int c = reg.startCol; c <= reg.endCol; ++c) {
      if (env.at({r, c}) == CellType::Obstacle) continue;
      ++n;
      if (d[r][c] != kUnreachable) ++ok;
    }
  return n == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(n);
}

inline double reachable_fraction(const GridEnvironment& env) {
  return reachable_fraction(env, {0, 0, env.rows() - 1, env.cols() - 1});
}

// Compass offsets spelled out again rather than taken from the library.
inline constexpr std::array<std::array<int, 2>, 8> kMoves{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

/// Action indices sorted by value descending, index ascending.
inline std::array<int, 8> ranked(const dynapath::QTable& q, int r, int c) {
  std::array<int, 8> idx;
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return q.at({r, c}, a) > q.at({r, c}, b); });
  return idx;
}

/// Greedy walk outcome: path length on success, -1 on failure.
inline int greedy_length(const dynapath::QTable& q, const GridEnvironment& env, const Region& reg,
                         int r, int c) {
  const int cap = reg.rows() * reg.cols();
  for (int steps = 0; steps < cap; ++steps) {
    const int a = ranked(q, r, c)[0];
    const int nr = r + kMoves[a][0], nc = c + kMoves[a][1];
    if (!inside(reg, nr, nc) || env.at({nr, nc}) == CellType::Obstacle) return -1;
    r = nr;
    c = nc;
    if (env.at({r, c}) == CellType::Station) return steps + 1;
  }
  return -1;
}

/// Whether a station is reachable in the graph where every cell may move
/// along its two highest-valued actions. Exhaustive, so it upper-bounds any
/// search over those edges and equals it when nothing is cut off.
inline bool two_best_reachable(const dynapath::QTable& q, const GridEnvironment& env,
                               const Region& reg, int r0, int c0) {
  std::vector<std::vector<char>> seen(static_cast<std::size_t>(env.rows()),
                                      std::vector<char>(static_cast<std::size_t>(env.cols()), 0));
  std::vector<std::pair<int, int>> todo{{r0, c0}};
  seen[r0][c0] = 1;
  while (!todo.empty()) {
    auto [r, c] = todo.back();
    todo.pop_back();
    if (env.at({r, c}) == CellType::Station) return true;
    const auto order = ranked(q, r, c);
    for (int k = 0; k < 2; ++k) {
      const int nr = r + kMoves[order[k]][0], nc = c + kMoves[order[k]][1];
      if (!inside(reg, nr, nc) || env.at({nr, nc}) == CellType::Obstacle || seen[nr][nc]) continue;
      seen[nr][nc] = 1;
      todo.emplace_back(nr, nc);
    }
  }
  return false;
}

/// Success rate of the greedy + two-best search, by enumeration of starts.
inline double search_success_rate(const dynapath::QTable& q, const GridEnvironment& env,
                                  const Region& reg) {
  std::size_t n = 0, ok = 0;
  for (int r = reg.startRow; r <= reg.endRow; ++r)
    for (int c = reg.startCol; c <= reg.endCol; ++c) {
      if (env.at({r, c}) == CellType::Obstacle) continue;
      ++n;
      if (env.at({r, c}) == CellType::Station || greedy_length(q, env, reg, r, c) >= 0 ||
          two_best_reachable(q, env, reg, r, c))
        ++ok;
    }
  return n == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(n);
}

/// Q-table whose greedy action at every cell follows a BFS shortest path.
inline dynapath::QTable shortest_path_table(const GridEnvironment& env, const Region& reg) {
  dynapath::QTable q(reg);
  const auto d = bfs_distance(env, reg);
  for (int r = reg.startRow; r <= reg.endRow; ++r)
    for (int c = reg.startCol; c <= reg.endCol; ++c) {
      if (d[r][c] == kUnreachable || d[r][c] == 0) continue;
      for (int a = 0; a < 8; ++a) {
        const int nr = r + kMoves[a][0], nc = c + kMoves[a][1];
        if (inside(reg, nr, nc) && d[nr][nc] == d[r][c] - 1) {
          q.at({r, c}, a) = 1.0;
          break;
        }
      }
    }
  return q;
}

} // namespace oracle
