#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dynapath/grid.hpp"

namespace dynapath {

/// Dense action values over a region, addressed by global grid coordinates.
class QTable {
public:
  QTable() = default;
  explicit QTable(const Region& region);

  const Region& region() const { return region_; }

  double& at(Cell c, int action) { return values_[offset(c) + static_cast<std::size_t>(action)]; }
  double at(Cell c, int action) const {
    return values_[offset(c) + static_cast<std::size_t>(action)];
  }

  std::span<double, kNumActions> row(Cell c) {
    return std::span<double, kNumActions>(values_.data() + offset(c), kNumActions);
  }
  std::span<const double, kNumActions> row(Cell c) const {
    return std::span<const double, kNumActions>(values_.data() + offset(c), kNumActions);
  }

  double max_value(Cell c) const;

  /// Argmax with ties broken toward the lowest action index.
  int best_action(Cell c) const;

  /// Best and runner-up actions, each tie-broken toward the lowest index.
  std::pair<int, int> top_two(Cell c) const;

  /// Overwrite the entries of `block` with those of `src`. Both tables must
  /// cover the block.
  void copy_block_from(const QTable& src, const Region& block);

  /// Largest |a - b| over all entries. Regions must match.
  double max_abs_diff(const QTable& other) const;

  void fill(double v);

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

private:
  std::size_t offset(Cell c) const { return region_.local_index(c) * kNumActions; }

  Region region_{};
  std::vector<double> values_;
};

int argmax_lowest(std::span<const double, kNumActions> q);

} // namespace dynapath
