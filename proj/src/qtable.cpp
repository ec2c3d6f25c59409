#include "dynapath/qtable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynapath {

QTable::QTable(const Region& region) : region_(region) {
  if (!region.valid()) {
    throw std::invalid_argument("QTable: invalid region");
  }
  values_.assign(region.cell_count() * kNumActions, 0.0);
}

int argmax_lowest(std::span<const double, kNumActions> q) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  return best;
}

double QTable::max_value(Cell c) const {
  const auto q = row(c);
  return *std::max_element(q.begin(), q.end());
}

int QTable::best_action(Cell c) const { return argmax_lowest(row(c)); }

std::pair<int, int> QTable::top_two(Cell c) const {
  const auto q = row(c);
  const int best = argmax_lowest(q);
  int second = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (a == best) continue;
    if (second < 0 || q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(second)]) {
      second = a;
    }
  }
  return {best, second};
}

void QTable::copy_block_from(const QTable& src, const Region& block) {
  if (!region_.contains(block) || !src.region_.contains(block)) {
    throw std::invalid_argument("QTable::copy_block_from: block outside a table");
  }
  const auto width = static_cast<std::size_t>(block.cols()) * kNumActions;
  for (int r = block.startRow; r <= block.endRow; ++r) {
    const Cell first{r, block.startCol};
    std::copy_n(src.values_.begin() + static_cast<std::ptrdiff_t>(src.offset(first)), width,
                values_.begin() + static_cast<std::ptrdiff_t>(offset(first)));
  }
}

double QTable::max_abs_diff(const QTable& other) const {
  if (!(region_ == other.region_)) {
    throw std::invalid_argument("QTable::max_abs_diff: region mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    worst = std::max(worst, std::abs(values_[i] - other.values_[i]));
  }
  return worst;
}

void QTable::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

} // namespace dynapath
