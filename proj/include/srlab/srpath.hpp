#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "srlab/linkstate.hpp"
#include "srlab/topology.hpp"

namespace srlab {

/// Simple path plus the positions of its segment heads.
///
/// heads[0] is always 0 (the ingress installs the first stack); every later
/// head is a swap node. A non-final segment spanning g links encodes as
/// g link labels plus one swap label, so feasibility demands g + 1 <= M;
/// the final segment holds only its link labels, at most M of them.
struct SegmentedPath {
  std::vector<int> nodes;
  std::vector<int> heads;
};

struct Feasibility {
  bool valid = true;
  std::string violation;  // names the first violated invariant
};

/// Check the SegmentedPath invariants for depth limit M. Edge existence is
/// checked only when a topology is supplied.
Feasibility check_feasibility(std::span<const int> nodes, std::span<const int> heads, int M,
                              const Topology* t = nullptr);

struct Label {
  enum class Kind { Link, Swap };
  Kind kind = Kind::Link;
  int from = -1, to = -1;  // link labels
  int swap_id = -1;        // swap labels
};

struct LabelStack {
  int installed_at = -1;
  std::vector<Label> entries;
};

/// One stack per segment head. Every non-final stack ends in a swap label
/// whose id maps to the index of the follow-on stack.
struct LabelStackPlan {
  std::vector<LabelStack> stacks;
  std::vector<std::pair<int, int>> swap_to_stack;  // (swap id, stack index)

  int stack_for_swap(int swap_id) const;
};

/// Split a feasible segmented path into per-head label stacks. Swap label
/// ids count up from 100.
LabelStackPlan encode_label_stacks(const SegmentedPath& p, int M);

/// Replay the data-plane forwarding of a plan: pop link labels to traverse
/// edges, replace a swap label with its associated stack, stop on empty
/// stack. Returns the visited node sequence.
std::vector<int> forward_packet(const LabelStackPlan& plan, const Topology& t);

/// Minimum residual bandwidth over the path's links.
double bottleneck_bw(const SegmentedPath& p, const LinkStateSnapshot& snap);

/// Sum of link delays over the path.
double path_delay(const SegmentedPath& p, const LinkStateSnapshot& snap);

/// End-to-end loss: 1 - prod(1 - loss_e).
double path_loss(const SegmentedPath& p, const LinkStateSnapshot& snap);

/// Time for the controller to finish installing every stack: the maximum
/// controller delay over the segment heads (ingress included).
double delivery_delay(const SegmentedPath& p, const LinkStateSnapshot& snap);

/// Scalar route quality to maximize, from metrics normalized into [0, 1]:
/// b1*(bw-1) + b2*(1-delay) + b3*(1-loss) + b4*(1-cdelay).
double path_score(double bw_n, double delay_n, double loss_n, double cdelay_n,
                  const std::array<double, 4>& beta);

std::string plan_to_json(const LabelStackPlan& plan);
LabelStackPlan plan_from_json(const std::string& text);

}  // namespace srlab
