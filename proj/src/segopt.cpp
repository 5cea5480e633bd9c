#include "srlab/segopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "srlab/errors.hpp"

namespace srlab {

namespace {

void validate(const SegmentationProblem& prob) {
  if (prob.path_nodes.size() < 2) throw ValidationError("path needs at least two nodes");
  if (prob.cdelay_ms.size() != prob.path_nodes.size())
    throw ValidationError("controller delay list does not match path length");
  if (prob.max_depth < 2)
    throw ValidationError("depth limit must be at least 2 (a one-entry stack cannot hold a link "
                          "label and a swap label)");
  for (double c : prob.cdelay_ms)
    if (c < 0.0) throw ValidationError("negative controller delay");
  std::set<int> distinct(prob.path_nodes.begin(), prob.path_nodes.end());
  if (distinct.size() != prob.path_nodes.size()) throw ValidationError("path repeats a node");
}

bool better(const SegmentationResult& a, const SegmentationResult& b) {
  if (a.delay_ms != b.delay_ms) return a.delay_ms < b.delay_ms;
  if (a.heads.size() != b.heads.size()) return a.heads.size() < b.heads.size();
  return a.heads < b.heads;
}

// Greedy reachability: can heads restricted to `allowed` positions cover
// the path? Jumps of at most M-1 links between heads, final stretch of at
// most M links.
bool coverable(const std::vector<char>& allowed, int k, int M) {
  if (!allowed[0]) return false;
  int pos = 0;
  while (k - pos > M) {
    int next = -1;
    for (int j = std::min(pos + M - 1, k - 1); j > pos; --j) {
      if (allowed[j]) {
        next = j;
        break;
      }
    }
    if (next < 0) return false;
    pos = next;
  }
  return true;
}

}  // namespace

SegmentationResult segment_optimal(const SegmentationProblem& prob) {
  validate(prob);
  const int k = static_cast<int>(prob.path_nodes.size()) - 1;
  const int M = prob.max_depth;

  // the ingress delay is always part of the objective, so a single stack
  // is optimal whenever it is feasible
  if (k <= M) return {{0}, prob.cdelay_ms[0]};

  // Phase 1: smallest worst-head delay. Candidates are the head delays
  // themselves; feasibility for a cap D is a greedy reachability check
  // over positions with cdelay <= D (position 0 is always required).
  std::vector<double> candidates(prob.cdelay_ms.begin(), prob.cdelay_ms.begin() + k);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best_delay = std::numeric_limits<double>::quiet_NaN();
  std::vector<char> allowed(k, 0);
  for (double cap : candidates) {
    if (cap < prob.cdelay_ms[0]) continue;  // the ingress delay is always counted
    for (int i = 0; i < k; ++i) allowed[i] = prob.cdelay_ms[i] <= cap ? 1 : 0;
    if (coverable(allowed, k, M)) {
      best_delay = cap;
      break;
    }
  }
  // cutting every M-1 links is always feasible for M >= 2, so the largest
  // candidate must have succeeded
  if (std::isnan(best_delay)) throw std::logic_error("no feasible delay cap found");
  for (int i = 0; i < k; ++i) allowed[i] = prob.cdelay_ms[i] <= best_delay ? 1 : 0;

  // Phase 2: fewest segments within the delay cap. seg_from[i] = minimal
  // number of stacks covering links i..k with a head at i.
  constexpr int kUnreachable = std::numeric_limits<int>::max() / 2;
  std::vector<int> seg_from(k, kUnreachable);
  for (int i = k - 1; i >= 0; --i) {
    if (!allowed[i]) continue;
    if (k - i <= M) seg_from[i] = 1;
    for (int j = i + 1; j <= std::min(i + M - 1, k - 1); ++j)
      if (allowed[j]) seg_from[i] = std::min(seg_from[i], seg_from[j] + 1);
  }
  const int segments = seg_from[0];

  // Phase 3: lexicographically smallest head list among optimal ones.
  // can_exact[i][r]: a head at i can finish with exactly r more stacks.
  std::vector<std::vector<char>> can_exact(k, std::vector<char>(segments + 1, 0));
  for (int i = k - 1; i >= 0; --i) {
    if (!allowed[i]) continue;
    if (k - i <= M) can_exact[i][1] = 1;
    for (int j = i + 1; j <= std::min(i + M - 1, k - 1); ++j) {
      if (!allowed[j]) continue;
      for (int r = 2; r <= segments; ++r)
        if (can_exact[j][r - 1]) can_exact[i][r] = 1;
    }
  }

  SegmentationResult result{{0}, best_delay};
  int pos = 0;
  for (int remaining = segments; remaining > 1; --remaining) {
    for (int j = pos + 1; j <= std::min(pos + M - 1, k - 1); ++j) {
      if (allowed[j] && can_exact[j][remaining - 1]) {
        result.heads.push_back(j);
        pos = j;
        break;
      }
    }
  }
  return result;
}

std::vector<int> segment_greedy(const SegmentationProblem& prob) {
  validate(prob);
  const int k = static_cast<int>(prob.path_nodes.size()) - 1;
  const int M = prob.max_depth;
  std::vector<int> heads{0};
  while (k - heads.back() > M - 1) heads.push_back(heads.back() + M - 1);
  return heads;
}

SegmentationResult segment_bruteforce(const SegmentationProblem& prob) {
  validate(prob);
  const int k = static_cast<int>(prob.path_nodes.size()) - 1;
  if (k > 20) throw ValidationError("instance too large for exhaustive segmentation");
  const int M = prob.max_depth;

  SegmentationResult best;
  best.delay_ms = std::numeric_limits<double>::infinity();
  std::vector<int> heads{0};
  auto extend = [&](auto&& self, double worst) -> void {
    const int pos = heads.back();
    if (k - pos <= M) {
      SegmentationResult cand{heads, worst};
      if (better(cand, best)) best = cand;
    }
    for (int j = pos + 1; j <= std::min(pos + M - 1, k - 1); ++j) {
      heads.push_back(j);
      self(self, std::max(worst, prob.cdelay_ms[j]));
      heads.pop_back();
    }
  };
  extend(extend, prob.cdelay_ms[0]);
  return best;
}

BigInt count_segmentations(int n, int M) {
  if (n < 0) throw ValidationError("length must be nonnegative");
  if (M < 1) throw ValidationError("part size limit must be at least 1");
  std::vector<BigInt> f(static_cast<std::size_t>(n) + 1);
  f[0] = 1;
  for (int i = 1; i <= n; ++i) {
    BigInt total = 0;
    for (int part = 1; part <= std::min(i, M); ++part) total += f[i - part];
    f[i] = total;
  }
  return f[n];
}

std::vector<std::vector<int>> enumerate_segmentations(int n, int M) {
  if (n < 0) throw ValidationError("length must be nonnegative");
  if (M < 1) throw ValidationError("part size limit must be at least 1");
  if (n > 20) throw ValidationError("instance too large for exhaustive enumeration");
  std::vector<std::vector<int>> out;
  std::vector<int> parts;
  auto extend = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(parts);
      return;
    }
    for (int part = 1; part <= std::min(remaining, M); ++part) {
      parts.push_back(part);
      self(self, remaining - part);
      parts.pop_back();
    }
  };
  extend(extend, n);
  return out;
}

}  // namespace srlab
