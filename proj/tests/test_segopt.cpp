#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "srlab/errors.hpp"
#include "srlab/rng.hpp"
#include "srlab/segopt.hpp"
#include "srlab/srpath.hpp"

using namespace srlab;

namespace {

SegmentationProblem chain_problem() {
  // eight-node chain, depth limit 4
  SegmentationProblem prob;
  prob.path_nodes = {0, 1, 2, 3, 4, 5, 6, 7};
  prob.cdelay_ms = {20, 25, 28, 41, 35, 27, 38, 27};
  prob.max_depth = 4;
  return prob;
}

SegmentationProblem random_problem(Rng& rng, int max_links, int M) {
  const int k = 2 + static_cast<int>(rng.uniform_int(max_links - 1));
  SegmentationProblem prob;
  for (int i = 0; i <= k; ++i) {
    prob.path_nodes.push_back(i);
    prob.cdelay_ms.push_back(rng.uniform(0.0, 60.0));
  }
  prob.max_depth = M;
  return prob;
}

}  // namespace

TEST_CASE("optimal segmentation of the eight-node chain") {
  const auto result = segment_optimal(chain_problem());
  CHECK(result.delay_ms == 28.0);
  CHECK(result.heads == std::vector<int>{0, 2, 5});
}

TEST_CASE("greedy segmentation of the eight-node chain") {
  const auto heads = segment_greedy(chain_problem());
  CHECK(heads == std::vector<int>{0, 3, 6});
  double worst = 0.0;
  const auto prob = chain_problem();
  for (int h : heads) worst = std::max(worst, prob.cdelay_ms[h]);
  CHECK(worst == 41.0);
}

TEST_CASE("single stack when the path fits the depth limit") {
  SegmentationProblem prob;
  prob.path_nodes = {4, 2, 9};
  prob.cdelay_ms = {13, 99, 99};
  prob.max_depth = 4;
  const auto result = segment_optimal(prob);
  CHECK(result.heads == std::vector<int>{0});
  CHECK(result.delay_ms == 13.0);
  CHECK(segment_greedy(prob) == std::vector<int>{0});
}

TEST_CASE("constant controller delays make every segmentation equal") {
  SegmentationProblem prob;
  for (int i = 0; i < 9; ++i) {
    prob.path_nodes.push_back(i);
    prob.cdelay_ms.push_back(7.5);
  }
  prob.max_depth = 3;
  CHECK(segment_optimal(prob).delay_ms == 7.5);
  CHECK(segment_bruteforce(prob).delay_ms == 7.5);
}

TEST_CASE("greedy cuts an eight-link path every two links at depth three") {
  SegmentationProblem prob;
  for (int i = 0; i < 9; ++i) {
    prob.path_nodes.push_back(i);
    prob.cdelay_ms.push_back(1.0);
  }
  prob.max_depth = 3;
  const auto heads = segment_greedy(prob);
  CHECK(heads == std::vector<int>{0, 2, 4, 6});
  CHECK(check_feasibility(prob.path_nodes, heads, prob.max_depth).valid);
}

TEST_CASE("brute force agrees with the chain optimum") {
  const auto result = segment_bruteforce(chain_problem());
  CHECK(result.delay_ms == 28.0);
  CHECK(result.heads == std::vector<int>{0, 2, 5});
}

TEST_CASE("brute force on a single-link path") {
  SegmentationProblem prob{{3, 8}, {5.0, 6.0}, 4};
  CHECK(segment_bruteforce(prob).heads == std::vector<int>{0});
}

TEST_CASE("dynamic program matches exhaustive enumeration") {
  Rng rng(20240811);
  for (int m : {2, 3, 4, 5}) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto prob = random_problem(rng, 12, m);
      const auto dp = segment_optimal(prob);
      const auto brute = segment_bruteforce(prob);
      REQUIRE(dp.delay_ms == brute.delay_ms);
      REQUIRE(dp.heads == brute.heads);
    }
  }
}

TEST_CASE("optimal never beats greedy from below") {
  Rng rng(77);
  for (int trial = 0; trial < 80; ++trial) {
    const auto prob = random_problem(rng, 14, 2 + static_cast<int>(rng.uniform_int(4)));
    const auto opt = segment_optimal(prob);
    const auto greedy = segment_greedy(prob);
    double greedy_delay = 0.0;
    for (int h : greedy) greedy_delay = std::max(greedy_delay, prob.cdelay_ms[h]);
    CHECK(opt.delay_ms <= greedy_delay);
    CHECK(opt.heads.front() == 0);
    CHECK(check_feasibility(prob.path_nodes, opt.heads, prob.max_depth).valid);
    CHECK(check_feasibility(prob.path_nodes, greedy, prob.max_depth).valid);
  }
}

TEST_CASE("depth limit below two is rejected") {
  SegmentationProblem prob{{0, 1, 2}, {1, 1, 1}, 1};
  CHECK_THROWS_AS(segment_optimal(prob), ValidationError);
}

TEST_CASE("composition counts follow the doubling rule below the limit") {
  for (int m : {4, 6}) {
    CHECK(count_segmentations(1, m) == 1);
    CHECK(count_segmentations(2, m) == 2);
    CHECK(count_segmentations(3, m) == 4);
    CHECK(count_segmentations(4, m) == 8);
  }
  CHECK(count_segmentations(0, 3) == 1);
}

TEST_CASE("bounded-part counts match hand enumeration") {
  CHECK(count_segmentations(3, 2) == 3);
  CHECK(count_segmentations(4, 2) == 5);
  CHECK(count_segmentations(5, 2) == 8);
  CHECK(count_segmentations(4, 3) == 7);
}

TEST_CASE("enumeration lists every bounded composition") {
  const auto lists = enumerate_segmentations(3, 2);
  std::vector<std::vector<int>> expected{{1, 1, 1}, {1, 2}, {2, 1}};
  auto sorted = lists;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == expected);
  CHECK(enumerate_segmentations(3, 3).size() == 4);
  CHECK(enumerate_segmentations(0, 2) == std::vector<std::vector<int>>{{}});
}

TEST_CASE("count equals enumeration size") {
  for (int m = 1; m <= 6; ++m) {
    for (int n = 0; n <= 12; ++n) {
      const auto lists = enumerate_segmentations(n, m);
      REQUIRE(count_segmentations(n, m) == BigInt(lists.size()));
      for (const auto& parts : lists) {
        int total = 0;
        for (int p : parts) {
          REQUIRE(p >= 1);
          REQUIRE(p <= m);
          total += p;
        }
        REQUIRE(total == n);
      }
    }
  }
}

TEST_CASE("prefix sums reproduce the next count") {
  for (int m = 2; m <= 6; ++m) {
    BigInt prefix = 0;
    for (int i = 0; i < m; ++i) prefix += count_segmentations(i, m);
    CHECK(prefix == count_segmentations(m, m));
  }
}

TEST_CASE("counting stays exact far beyond 64 bits") {
  const BigInt big = count_segmentations(300, 6);
  CHECK(big > BigInt("18446744073709551615"));
}
