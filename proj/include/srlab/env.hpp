#pragma once

#include <array>
#include <string>
#include <vector>

#include "srlab/linkstate.hpp"
#include "srlab/srpath.hpp"
#include "srlab/topology.hpp"

namespace srlab {

struct EnvConfig {
  int src = 0;
  int dst = 0;
  int max_depth = 4;                           // label stack depth M
  std::array<double, 4> beta{0.25, 0.25, 0.25, 0.25};
  int horizon = 0;                             // 0 = 4 * node count
  double invalid_penalty = -2.0;
  double terminal_bonus = 10.0;
};

struct DecodedAction {
  bool valid = false;
  int target = -1;
  bool swap = false;
  std::string reason;  // "degree", "revisit" or "depth" when invalid
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

/// Episode environment for joint path construction and swap-node selection.
///
/// The observation is six n-by-n channels [bw, delay, loss, cdelay, stack,
/// location]. The first four are frozen metric channels of the snapshot;
/// stack holds a single diagonal 1 at the open-segment node count sn, and
/// location a single diagonal 1 at the node the path currently ends on.
///
/// Actions index 2d slots over the sorted neighbor list of the current
/// node, d being the topology's maximum degree: slot a picks neighbor
/// a mod d, and a >= d additionally declares the hop's target a swap node.
/// Invalid slots (beyond the degree, revisiting, or breaking the depth
/// budget) leave the path unchanged and cost a fixed penalty. Depth guards
/// keep every reachable episode encodable, so a finished episode always
/// yields a feasible SegmentedPath.
class Env {
 public:
  Env(Topology topology, EnvConfig cfg, NormalizedSnapshot snap);

  void reset();
  DecodedAction decode_action(int action) const;
  StepResult step(int action);

  /// The constructed segmented path; only valid once the destination was
  /// reached.
  SegmentedPath extract_path() const;

  int action_count() const { return 2 * topology_.max_degree(); }
  int observation_size() const;
  /// Flattened channels in the order bw, delay, loss, cdelay, stack, location.
  std::vector<double> observation() const;

  const std::vector<int>& path() const { return path_; }
  const std::vector<int>& heads() const { return heads_; }
  int open_segment_nodes() const { return sn_; }
  bool done() const { return done_; }
  bool reached_destination() const { return !path_.empty() && path_.back() == cfg_.dst; }
  int steps_taken() const { return steps_; }
  const Topology& topology() const { return topology_; }
  const MetricChannels& metric() const { return metric_; }

  /// FNV-1a digest of the observation, for replayable episode traces.
  std::string state_digest() const;
  std::string trace_json_line(int step, int action, double reward, bool done) const;

 private:
  Topology topology_;
  EnvConfig cfg_;
  NormalizedSnapshot snap_;
  MetricChannels metric_;

  std::vector<int> path_;
  std::vector<int> heads_;
  int sn_ = 1;
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace srlab
