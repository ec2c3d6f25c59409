#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dynapath {

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Compass actions. The numeric values index Q-table rows.
enum class Action : std::uint8_t { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr int kNumActions = 8;

inline constexpr std::array<Cell, kNumActions> kActionOffsets{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

constexpr Cell displaced(Cell c, int action) {
  const Cell d = kActionOffsets[static_cast<std::size_t>(action)];
  return {c.row + d.row, c.col + d.col};
}

constexpr Cell displaced(Cell c, Action a) { return displaced(c, static_cast<int>(a)); }

/// Rectangle of grid cells with inclusive bounds.
struct Region {
  int startRow = 0;
  int startCol = 0;
  int endRow = 0;
  int endCol = 0;

  constexpr int rows() const { return endRow - startRow + 1; }
  constexpr int cols() const { return endCol - startCol + 1; }
  constexpr std::size_t cell_count() const {
    return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols());
  }
  constexpr bool valid() const { return startRow <= endRow && startCol <= endCol; }
  constexpr bool contains(Cell c) const {
    return c.row >= startRow && c.row <= endRow && c.col >= startCol && c.col <= endCol;
  }
  constexpr bool contains(const Region& o) const {
    return o.startRow >= startRow && o.endRow <= endRow && o.startCol >= startCol &&
           o.endCol <= endCol;
  }
  constexpr bool overlaps(const Region& o) const {
    return startRow <= o.endRow && o.startRow <= endRow && startCol <= o.endCol &&
           o.startCol <= endCol;
  }
  /// Row-major offset of c inside the region.
  constexpr std::size_t local_index(Cell c) const {
    return static_cast<std::size_t>(c.row - startRow) * static_cast<std::size_t>(cols()) +
           static_cast<std::size_t>(c.col - startCol);
  }
  constexpr Cell cell_at(std::size_t localIndex) const {
    const auto w = static_cast<std::size_t>(cols());
    return {startRow + static_cast<int>(localIndex / w), startCol + static_cast<int>(localIndex % w)};
  }

  friend constexpr bool operator==(const Region&, const Region&) = default;
};

/// Cell sequence from a start cell to a station. length() counts moves.
struct Path {
  std::vector<Cell> cells;

  std::size_t length() const { return cells.empty() ? 0 : cells.size() - 1; }
};

} // namespace dynapath
