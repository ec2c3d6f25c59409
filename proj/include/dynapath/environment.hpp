#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "dynapath/grid.hpp"
#include "dynapath/rng.hpp"

namespace dynapath {

enum class CellType : std::uint8_t { Free, Obstacle, Station };

enum class Difficulty { Easy, Medium, Hard };

struct CellProbabilities {
  double free;
  double obstacle;
  double station;
};

CellProbabilities probabilities(Difficulty d);
std::string_view to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view text);

inline constexpr double kStationReward = 100.0;
inline constexpr double kBumpReward = -10.0;
inline constexpr double kMoveReward = -1.0;

/// Redraw cap for the at-least-one-station rule.
inline constexpr int kMaxGenerationAttempts = 1000;

/// Redraw cap when the sampled obstacle has no free neighbour.
inline constexpr int kMaxObstacleRedraws = 1000;

class GridEnvironment {
public:
  GridEnvironment(int rows, int cols, std::uint64_t seed = 0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::uint64_t seed() const { return seed_; }
  Region bounds() const { return {0, 0, rows_ - 1, cols_ - 1}; }

  bool contains(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }

  CellType at(Cell c) const { return cells_[index(c)]; }
  void set(Cell c, CellType t) { cells_[index(c)] = t; }

  bool is_obstacle(Cell c) const { return at(c) == CellType::Obstacle; }
  bool is_station(Cell c) const { return at(c) == CellType::Station; }

  std::size_t count(CellType t) const;
  std::size_t count(CellType t, const Region& r) const;
  std::vector<Cell> cells_of(CellType t) const;

  /// FNV-1a over dimensions and cell contents; seed excluded.
  std::uint64_t content_hash() const;

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }

  friend bool operator==(const GridEnvironment& a, const GridEnvironment& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
  }

private:
  int rows_;
  int cols_;
  std::uint64_t seed_;
  std::vector<CellType> cells_;
};

/// Seeded per-cell draw. Redraws the whole grid until it holds a station.
GridEnvironment generate(std::uint64_t seed, int rows, int cols, Difficulty difficulty);

/// Same as generate, continuing an existing stream.
GridEnvironment generate(Rng& rng, std::uint64_t seedLabel, int rows, int cols,
                         Difficulty difficulty);

/// 50x50 hard grid whose top-left 25x25 quadrant holds no station.
GridEnvironment generate_edge_case(std::uint64_t seed);
GridEnvironment generate_edge_case(Rng& rng, std::uint64_t seedLabel);

inline constexpr int kEdgeCaseSize = 50;
inline constexpr Region kEdgeCaseEmptyQuadrant{0, 0, 24, 24};

struct StepResult {
  Cell next;
  double reward;
  bool terminal;
};

/// Deterministic transition. Moves that leave `confine` or hit an obstacle
/// keep the agent in place with the bump penalty.
StepResult step(const GridEnvironment& env, Cell state, int action, const Region& confine);
StepResult step(const GridEnvironment& env, Cell state, int action);

/// One obstacle moving onto an adjacent free cell.
struct ChangeEvent {
  Cell from; // Obstacle -> Free
  Cell to;   // Free -> Obstacle

  friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

/// Maps a draw r in [0, 999] onto the skewed change-count table.
int change_count_for(int r);
int sample_change_count(Rng& rng);

std::vector<ChangeEvent> apply_changes(GridEnvironment& env, Rng& rng, int n);

/// Replays a recorded event; throws if the cells no longer match.
void apply_event(GridEnvironment& env, const ChangeEvent& ev);

/// Text form: "rows cols seed" header, then one line per row of '.', '#', 'C'.
void write_environment(std::ostream& out, const GridEnvironment& env);
GridEnvironment read_environment(std::istream& in);

} // namespace dynapath
