#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "dynapath/hierarchy.hpp"
#include "support.hpp"

using namespace dynapath;

namespace {

void check_partition(TreeNode& node) {
  const Region& r = node.region;
  if (node.is_leaf()) {
    CHECK(r.rows() <= kMaxLeafSide);
    CHECK(r.cols() <= kMaxLeafSide);
    return;
  }
  CHECK((r.rows() > kMaxLeafSide || r.cols() > kMaxLeafSide));
  REQUIRE(node.children.size() == 4);
  std::size_t cells = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Region& a = node.children[i]->region;
    CHECK(a.valid());
    CHECK(r.contains(a));
    CHECK(node.children[i]->parent == &node);
    CHECK(node.children[i]->depth == node.depth + 1);
    cells += a.cell_count();
    for (std::size_t j = i + 1; j < 4; ++j) CHECK_FALSE(a.overlaps(node.children[j]->region));
  }
  CHECK(cells == r.cell_count());
  for (auto& c : node.children) check_partition(*c);
}

QTable random_table(const Region& reg, Rng& rng, int levels) {
  QTable q(reg);
  for (double& v : q.values()) v = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
  return q;
}

} // namespace

TEST_CASE("tree heights for the benchmark sizes") {
  CHECK(tree_height(*decompose(20, 20)) == 1);
  CHECK(tree_height(*decompose(50, 50)) == 3);
  CHECK(tree_height(*decompose(100, 100)) == 4);
  CHECK(tree_height(*decompose(200, 200)) == 5);
  CHECK(tree_height(*decompose(300, 300)) == 5);
  CHECK(decompose(20, 20)->is_leaf());
}

TEST_CASE("50x50 splits into 25 then 13 and 12") {
  auto root = decompose(50, 50);
  CHECK(root->children[0]->region == Region{0, 0, 24, 24});
  CHECK(root->children[3]->region == Region{25, 25, 49, 49});
  const Region& leaf = root->children[0]->children[0]->region;
  CHECK(leaf == Region{0, 0, 12, 12});
  CHECK(root->children[0]->children[3]->region == Region{13, 13, 24, 24});
  CHECK(leaves(*root).size() == 16);
}

TEST_CASE("partition, leaf size and node count bound") {
  for (auto [r, c] : {std::pair{1, 1}, {20, 21}, {21, 20}, {37, 5}, {50, 50}, {64, 100}, {300, 300}}) {
    CAPTURE(r);
    CAPTURE(c);
    auto root = decompose(r, c);
    check_partition(*root);
    const std::size_t L = leaves(*root).size();
    CHECK(node_count(*root) <= (4 * L - 1 + 2) / 3);
    CHECK(all_nodes(*root).size() == node_count(*root));
  }
}

TEST_CASE("leaves_for_changes") {
  auto root = decompose(100, 100);
  const auto all = leaves(*root);

  const std::vector<ChangeEvent> corner{{{0, 0}, {0, 1}}};
  auto hit = leaves_for_changes(*root, corner);
  REQUIRE(hit.size() == 1);
  CHECK(hit[0] == all.front());
  CHECK(hit[0]->region.contains(Cell{0, 0}));

  const std::vector<ChangeEvent> same{{{1, 1}, {2, 2}}, {{3, 3}, {4, 4}}};
  CHECK(leaves_for_changes(*root, same).size() == 1);

  const std::vector<ChangeEvent> spread{{{1, 1}, {1, 2}}, {{1, 98}, {1, 97}}, {{98, 1}, {97, 1}}};
  CHECK(leaves_for_changes(*root, spread).size() == 3);

  // A move across a leaf border touches both leaves.
  const std::vector<ChangeEvent> straddle{{{12, 12}, {13, 13}}};
  CHECK(leaves_for_changes(*root, straddle).size() == 2);

  const std::vector<ChangeEvent> outside{{{100, 0}, {99, 0}}};
  CHECK_THROWS_WITH_AS(leaves_for_changes(*root, outside), "unlocalizable change", std::out_of_range);
}

TEST_CASE("propagation copies blocks") {
  auto root = decompose(50, 50);
  auto ls = leaves(*root);
  Rng rng(3);
  TreeNode& a = *ls[0];
  TreeNode& b = *ls[1];
  a.qtable = random_table(a.region, rng, 100);
  b.qtable = random_table(b.region, rng, 100);
  propagate_up(a);
  propagate_up(b);
  for (TreeNode* leaf : {&a, &b}) {
    for (int r = leaf->region.startRow; r <= leaf->region.endRow; ++r)
      for (int c = leaf->region.startCol; c <= leaf->region.endCol; ++c)
        for (int k = 0; k < kNumActions; ++k) {
          CHECK(root->qtable.at({r, c}, k) == leaf->qtable.at({r, c}, k));
          CHECK(leaf->parent->qtable.at({r, c}, k) == leaf->qtable.at({r, c}, k));
        }
  }
  // Outside both blocks the root is untouched.
  CHECK(root->qtable.at({49, 49}, 0) == 0.0);

  SUBCASE("root propagate_up is a no-op") {
    const QTable before = root->qtable;
    propagate_up(*root);
    CHECK(root->qtable == before);
  }
  SUBCASE("downward copy reaches every descendant") {
    TreeNode& mid = *root->children[3];
    mid.qtable = random_table(mid.region, rng, 50);
    propagate_down(mid);
    for (auto& child : mid.children) {
      QTable expect(child->region);
      expect.copy_block_from(mid.qtable, child->region);
      CHECK(child->qtable == expect);
    }
    const QTable rootBefore = root->qtable;
    propagate_down(*mid.children[0]);
    propagate_up(*mid.children[0]);
    QTable expected = rootBefore;
    expected.copy_block_from(mid.qtable, mid.children[0]->region);
    CHECK(root->qtable == expected);
  }
  SUBCASE("leaf propagate_down is a no-op") {
    const QTable before = a.qtable;
    propagate_down(a);
    CHECK(a.qtable == before);
  }
}

TEST_CASE("root coherence after propagating every leaf") {
  auto root = decompose(60, 45);
  Rng rng(8);
  for (TreeNode* leaf : leaves(*root)) {
    leaf->qtable = random_table(leaf->region, rng, 1000);
    propagate_up(*leaf);
  }
  for (TreeNode* leaf : leaves(*root)) {
    QTable view(leaf->region);
    view.copy_block_from(root->qtable, leaf->region);
    CHECK(view == leaf->qtable);
  }
}

TEST_CASE("path_search basics") {
  SUBCASE("start on a station") {
    const auto env = oracle::grid({"C."});
    QTable q(env.bounds());
    auto p = path_search(q, {0, 0}, env, env.bounds());
    REQUIRE(p);
    CHECK(p->length() == 0);
  }
  SUBCASE("boxed in") {
    const auto env = oracle::grid({
        "###C",
        "#.#.",
        "###.",
    });
    QTable q(env.bounds());
    CHECK_FALSE(path_search(q, {1, 1}, env, env.bounds()));
  }
  SUBCASE("zero table walks north") {
    const auto env = oracle::grid({
        "C..",
        "...",
        "...",
    });
    QTable q(env.bounds());
    auto p = path_search(q, {2, 0}, env, env.bounds());
    REQUIRE(p);
    CHECK(p->length() == 2);
  }
  SUBCASE("region border stops the walk") {
    const auto env = oracle::grid({
        "C..",
        "...",
        "...",
    });
    QTable q(env.bounds());
    CHECK_FALSE(path_search(q, {2, 0}, env, Region{1, 0, 2, 2}));
  }
}

TEST_CASE("second-best action rescues a broken greedy step") {
  const auto env = oracle::grid({
      "...C",
      "....",
      ".#..",
      "....",
  });
  const Region reg = env.bounds();
  QTable q = oracle::shortest_path_table(env, reg);
  // (3,1): best action N hits the obstacle, runner-up NE is on a shortest path.
  q.at({3, 1}, 0) = 5.0; // N -> (2,1) obstacle
  q.at({3, 1}, 1) = 4.0; // NE -> (2,2)
  const Cell start{3, 1};
  CHECK(oracle::greedy_length(q, env, reg, start.row, start.col) == -1);
  CHECK(oracle::two_best_reachable(q, env, reg, start.row, start.col));

  auto p = path_search(q, start, env, reg);
  REQUIRE(p);
  CHECK(p->cells.front() == start);
  CHECK(env.is_station(p->cells.back()));
  CHECK(p->cells[1] == Cell{2, 2});
  for (std::size_t i = 1; i < p->cells.size(); ++i) {
    const Cell a = p->cells[i - 1], b = p->cells[i];
    CHECK(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) == 1);
    CHECK_FALSE(env.is_obstacle(b));
  }
}

TEST_CASE("handcrafted 5x5 success rate matches enumeration") {
  const auto env = oracle::grid({
      "..#..",
      ".C#..",
      "..#..",
      "....#",
      "#...C",
  });
  TreeNode root(env.bounds());
  root.qtable = oracle::shortest_path_table(env, env.bounds());
  // Partially trained: wipe the right half and scramble two cells.
  for (int r = 0; r < 5; ++r)
    for (int c = 3; c < 5; ++c)
      for (int a = 0; a < 8; ++a) root.qtable.at({r, c}, a) = 0.0;
  root.qtable.at({3, 1}, 2) = 9.0;
  root.qtable.at({2, 0}, 6) = 9.0;
  const double expected = oracle::search_success_rate(root.qtable, env, env.bounds());
  CHECK(compute_success_rate(root, root, env) == expected);
  CHECK(expected < 1.0);
}

TEST_CASE("success rate edge cases") {
  SUBCASE("all stations") {
    const auto env = oracle::grid({"CC", "CC"});
    TreeNode root(env.bounds());
    CHECK(compute_success_rate(root, root, env) == 1.0);
  }
  SUBCASE("all obstacles") {
    const auto env = oracle::grid({"C..", "...", "..."});
    auto env2 = env;
    TreeNode root(env.bounds());
    TreeNode sub(Region{1, 1, 2, 2}, &root);
    for (int r = 1; r <= 2; ++r)
      for (int c = 1; c <= 2; ++c) env2.set({r, c}, CellType::Obstacle);
    CHECK(compute_success_rate(sub, root, env2) == 1.0);
  }
  SUBCASE("zero table and no station due north") {
    const auto env = oracle::grid({
        "...",
        "...",
        "..C",
    });
    TreeNode root(env.bounds());
    // Ties make N and NE the top two everywhere; neither ever reaches (2,2).
    const double expected = oracle::search_success_rate(root.qtable, env, env.bounds());
    CHECK(compute_success_rate(root, root, env) == expected);
    CHECK(expected == doctest::Approx(1.0 / 9.0));
  }
}

TEST_CASE("success rate equals brute force on random regions") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng.below(8));
    const int cols = 1 + static_cast<int>(rng.below(8));
    const auto d = static_cast<Difficulty>(rng.below(3));
    GridEnvironment env = generate(rng.next(), rows + 4, cols + 4, d);
    // Sprinkle extra stations so both outcomes are common.
    for (int k = 0; k < 3; ++k)
      env.set({static_cast<int>(rng.below(static_cast<std::uint64_t>(env.rows()))),
               static_cast<int>(rng.below(static_cast<std::uint64_t>(env.cols())))},
              CellType::Station);
    TreeNode root(env.bounds());
    root.qtable = random_table(env.bounds(), rng, 4);
    const int r0 = static_cast<int>(rng.below(5));
    const int c0 = static_cast<int>(rng.below(5));
    TreeNode sub(Region{r0, c0, r0 + rows - 1, c0 + cols - 1}, &root);
    CAPTURE(trial);
    CHECK(compute_success_rate(sub, root, env) ==
          oracle::search_success_rate(root.qtable, env, sub.region));
  }
}

TEST_CASE("batch evaluation agrees with independent searches") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto env = generate(rng.next(), 20, 20, Difficulty::Hard);
    QTable q = random_table(env.bounds(), rng, 3);
    PathSearcher batch(q, env, env.bounds());
    const SearchSummary s = batch.evaluate_all();
    std::size_t ok = 0, n = 0;
    double len = 0;
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c) {
        if (env.is_obstacle({r, c})) continue;
        ++n;
        if (auto p = path_search(q, {r, c}, env, env.bounds())) {
          ++ok;
          len += static_cast<double>(p->length());
        }
      }
    CHECK(s.starts == n);
    CHECK(s.successes == ok);
    CHECK(s.lengthSum == len);
  }
}

TEST_CASE("extract_policy") {
  const auto env = oracle::grid({
      "..#",
      ".C.",
  });
  TreeNode root(env.bounds());
  auto zero = extract_policy(root, env.bounds(), env);
  CHECK(zero.action({0, 0}) == 0);
  CHECK(zero.action({1, 2}) == 0);
  CHECK(zero.action({0, 2}) == -1);

  root.qtable.at({1, 0}, 6) = 9.5;
  auto p = extract_policy(root, env.bounds(), env);
  CHECK(p.action({1, 0}) == 6);

  for (int a = 0; a < 8; ++a) root.qtable.at({1, 0}, a) += 42.0;
  CHECK(extract_policy(root, env.bounds(), env).action({1, 0}) == 6);

  std::ostringstream out;
  write_policy(out, p, env);
  CHECK(out.str() == "↑↑#\n←C↑\n");

  CHECK_THROWS(extract_policy(root, Region{0, 0, 2, 2}, env));
}
