#include "dynapath/rng.hpp"

#include <stdexcept>

namespace dynapath {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("Rng::below: bound must be positive");
  }
  // Reject the low band that would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) {
      return x % bound;
    }
  }
}

} // namespace dynapath
