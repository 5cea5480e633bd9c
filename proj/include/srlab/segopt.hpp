#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace srlab {

using BigInt = boost::multiprecision::cpp_int;

/// Swap-node placement on a fixed path: choose heads so the worst
/// controller delay over the chosen heads is minimal, under the depth
/// limit (non-final segments span at most M-1 links, the final one at
/// most M).
struct SegmentationProblem {
  std::vector<int> path_nodes;
  std::vector<double> cdelay_ms;  // one per path node
  int max_depth = 0;              // M >= 2
};

struct SegmentationResult {
  std::vector<int> heads;
  double delay_ms = 0.0;
};

/// Exact minimizer via dynamic programming. Ties broken by fewest
/// segments, then lexicographically smallest head list.
SegmentationResult segment_optimal(const SegmentationProblem& prob);

/// Cut at maximum depth: a head every M-1 links while more than M-1 links
/// remain. The staged-pipeline division scheme used as a baseline.
std::vector<int> segment_greedy(const SegmentationProblem& prob);

/// Exhaustive enumeration over all feasible head subsets; same objective
/// and tie-breaks as segment_optimal. Guards against paths over 20 links.
SegmentationResult segment_bruteforce(const SegmentationProblem& prob);

/// Number of ordered compositions of n into parts of size at most M,
/// by the recurrence f(n) = f(n-1) + ... + f(n-M) with f(0) = 1 and
/// f(n) = 2^(n-1) for 1 <= n <= M.
BigInt count_segmentations(int n, int M);

/// All ordered part lists summing to n with each part at most M.
std::vector<std::vector<int>> enumerate_segmentations(int n, int M);

}  // namespace srlab
