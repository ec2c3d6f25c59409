#include "dynapath/environment.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dynapath {

CellProbabilities probabilities(Difficulty d) {
  switch (d) {
  case Difficulty::Easy:
    return {0.8, 0.18, 0.02};
  case Difficulty::Medium:
    return {0.7, 0.29, 0.01};
  case Difficulty::Hard:
    return {0.6, 0.395, 0.005};
  }
  throw std::invalid_argument("unknown difficulty");
}

std::string_view to_string(Difficulty d) {
  switch (d) {
  case Difficulty::Easy:
    return "easy";
  case Difficulty::Medium:
    return "medium";
  case Difficulty::Hard:
    return "hard";
  }
  return "?";
}

Difficulty parse_difficulty(std::string_view text) {
  if (text == "easy") return Difficulty::Easy;
  if (text == "medium") return Difficulty::Medium;
  if (text == "hard") return Difficulty::Hard;
  throw std::invalid_argument("unknown difficulty '" + std::string(text) + "'");
}

GridEnvironment::GridEnvironment(int rows, int cols, std::uint64_t seed)
    : rows_(rows), cols_(cols), seed_(seed) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), CellType::Free);
}

std::size_t GridEnvironment::count(CellType t) const {
  std::size_t n = 0;
  for (CellType c : cells_) n += (c == t);
  return n;
}

std::size_t GridEnvironment::count(CellType t, const Region& r) const {
  std::size_t n = 0;
  for (int row = r.startRow; row <= r.endRow; ++row)
    for (int col = r.startCol; col <= r.endCol; ++col) n += (at({row, col}) == t);
  return n;
}

std::vector<Cell> GridEnvironment::cells_of(CellType t) const {
  std::vector<Cell> out;
  for (int row = 0; row < rows_; ++row)
    for (int col = 0; col < cols_; ++col)
      if (at({row, col}) == t) out.push_back({row, col});
  return out;
}

std::uint64_t GridEnvironment::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (int shift = 0; shift < 32; shift += 8) {
    mix((static_cast<std::uint32_t>(rows_) >> shift) & 0xFF);
    mix((static_cast<std::uint32_t>(cols_) >> shift) & 0xFF);
  }
  for (CellType c : cells_) mix(static_cast<std::uint64_t>(c));
  return h;
}

namespace {

void draw_cells(GridEnvironment& env, Rng& rng, const CellProbabilities& p) {
  for (int row = 0; row < env.rows(); ++row) {
    for (int col = 0; col < env.cols(); ++col) {
      const double u = rng.uniform();
      CellType t = CellType::Station;
      if (u < p.free) {
        t = CellType::Free;
      } else if (u < p.free + p.obstacle) {
        t = CellType::Obstacle;
      }
      env.set({row, col}, t);
    }
  }
}

} // namespace

GridEnvironment generate(Rng& rng, std::uint64_t seedLabel, int rows, int cols,
                         Difficulty difficulty) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  const CellProbabilities p = probabilities(difficulty);
  GridEnvironment env(rows, cols, seedLabel);
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    draw_cells(env, rng, p);
    if (env.count(CellType::Station) > 0) {
      return env;
    }
  }
  throw std::runtime_error("degenerate generation: no station after " +
                           std::to_string(kMaxGenerationAttempts) + " attempts");
}

GridEnvironment generate(std::uint64_t seed, int rows, int cols, Difficulty difficulty) {
  Rng rng(seed);
  return generate(rng, seed, rows, cols, difficulty);
}

GridEnvironment generate_edge_case(Rng& rng, std::uint64_t seedLabel) {
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    GridEnvironment env = generate(rng, seedLabel, kEdgeCaseSize, kEdgeCaseSize, Difficulty::Hard);
    const Region& q = kEdgeCaseEmptyQuadrant;
    for (int row = q.startRow; row <= q.endRow; ++row)
      for (int col = q.startCol; col <= q.endCol; ++col)
        if (env.is_station({row, col})) env.set({row, col}, CellType::Free);
    if (env.count(CellType::Station) > 0) {
      return env;
    }
  }
  throw std::runtime_error("degenerate generation: edge case without stations");
}

GridEnvironment generate_edge_case(std::uint64_t seed) {
  Rng rng(seed);
  return generate_edge_case(rng, seed);
}

StepResult step(const GridEnvironment& env, Cell state, int action, const Region& confine) {
  if (!env.contains(state) || !confine.contains(state) || env.is_obstacle(state)) {
    throw std::invalid_argument("invalid state");
  }
  if (action < 0 || action >= kNumActions) {
    throw std::invalid_argument("invalid action");
  }
  const Cell target = displaced(state, action);
  if (!confine.contains(target) || !env.contains(target) || env.is_obstacle(target)) {
    return {state, kBumpReward, false};
  }
  if (env.is_station(target)) {
    return {target, kStationReward, true};
  }
  return {target, kMoveReward, false};
}

StepResult step(const GridEnvironment& env, Cell state, int action) {
  return step(env, state, action, env.bounds());
}

int change_count_for(int r) {
  if (r < 900) return 1;
  if (r < 950) return 2;
  if (r < 970) return 3;
  if (r < 980) return 4;
  if (r < 987) return 5;
  if (r < 992) return 6;
  if (r < 995) return 7;
  if (r < 997) return 8;
  if (r < 999) return 9;
  return 10;
}

int sample_change_count(Rng& rng) { return change_count_for(static_cast<int>(rng.below(1000))); }

std::vector<ChangeEvent> apply_changes(GridEnvironment& env, Rng& rng, int n) {
  if (n < 1) {
    throw std::invalid_argument("apply_changes: n must be at least 1");
  }
  std::vector<Cell> obstacles = env.cells_of(CellType::Obstacle);
  if (obstacles.empty() || env.count(CellType::Free) == 0) {
    throw std::runtime_error("no movable obstacle");
  }
  std::vector<ChangeEvent> events;
  events.reserve(static_cast<std::size_t>(n));
  std::vector<Cell> freeNeighbours;
  for (int i = 0; i < n; ++i) {
    bool moved = false;
    for (int attempt = 0; attempt < kMaxObstacleRedraws && !moved; ++attempt) {
      const std::size_t pick = rng.below(obstacles.size());
      const Cell from = obstacles[pick];
      freeNeighbours.clear();
      for (int a = 0; a < kNumActions; ++a) {
        const Cell nb = displaced(from, a);
        if (env.contains(nb) && env.at(nb) == CellType::Free) freeNeighbours.push_back(nb);
      }
      if (freeNeighbours.empty()) continue;
      const Cell to = freeNeighbours[rng.below(freeNeighbours.size())];
      env.set(from, CellType::Free);
      env.set(to, CellType::Obstacle);
      obstacles[pick] = to;
      events.push_back({from, to});
      moved = true;
    }
    if (!moved) {
      throw std::runtime_error("no movable obstacle");
    }
  }
  return events;
}

void apply_event(GridEnvironment& env, const ChangeEvent& ev) {
  if (!env.contains(ev.from) || !env.contains(ev.to) || env.at(ev.from) != CellType::Obstacle ||
      env.at(ev.to) != CellType::Free) {
    throw std::invalid_argument("change event does not match environment");
  }
  env.set(ev.from, CellType::Free);
  env.set(ev.to, CellType::Obstacle);
}

void write_environment(std::ostream& out, const GridEnvironment& env) {
  out << env.rows() << ' ' << env.cols() << ' ' << env.seed() << '\n';
  for (int row = 0; row < env.rows(); ++row) {
    std::string line(static_cast<std::size_t>(env.cols()), '.');
    for (int col = 0; col < env.cols(); ++col) {
      switch (env.at({row, col})) {
      case CellType::Free:
        break;
      case CellType::Obstacle:
        line[static_cast<std::size_t>(col)] = '#';
        break;
      case CellType::Station:
        line[static_cast<std::size_t>(col)] = 'C';
        break;
      }
    }
    out << line << '\n';
  }
}

GridEnvironment read_environment(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("environment: missing header");
  }
  std::istringstream hs(header);
  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 0;
  if (!(hs >> rows >> cols >> seed) || rows < 1 || cols < 1) {
    throw std::runtime_error("environment: malformed header '" + header + "'");
  }
  GridEnvironment env(rows, cols, seed);
  std::string line;
  for (int row = 0; row < rows; ++row) {
    if (!std::getline(in, line) || line.size() < static_cast<std::size_t>(cols)) {
      throw std::runtime_error("environment: row " + std::to_string(row) + " missing or short");
    }
    for (int col = 0; col < cols; ++col) {
      const char ch = line[static_cast<std::size_t>(col)];
      CellType t;
      if (ch == '.') {
        t = CellType::Free;
      } else if (ch == '#') {
        t = CellType::Obstacle;
      } else if (ch == 'C') {
        t = CellType::Station;
      } else {
        throw std::runtime_error("environment: bad glyph at row " + std::to_string(row));
      }
      env.set({row, col}, t);
    }
  }
  return env;
}

} // namespace dynapath
