#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "srlab/env.hpp"
#include "srlab/linkstate.hpp"
#include "srlab/sac.hpp"
#include "srlab/segopt.hpp"
#include "srlab/srpath.hpp"
#include "srlab/topology.hpp"

namespace srlab {

enum class PathWeight { Delay, Hops };

/// Least-cost path under the chosen weight; equal-cost ties resolve to the
/// lexicographically smallest node sequence.
std::vector<int> dijkstra_shortest_path(const Topology& t, const LinkStateSnapshot& snap,
                                        int src, int dst, PathWeight weight);

/// The staged pipeline under comparison: delay-shortest path, then
/// maximum-depth greedy segmentation.
SegmentedPath baseline_route(const Topology& t, const LinkStateSnapshot& snap, int src, int dst,
                             int M);

/// Path-level score inputs, all in [0, 1]: bottleneck of normalized
/// residuals; normalized delays summed and divided by the worst-case hop
/// count; raw end-to-end loss; worst normalized controller delay over the
/// heads.
struct ScoredPath {
  double bw_n = 0.0, delay_n = 0.0, loss_n = 0.0, cdelay_n = 0.0;
  double score = 0.0;
};
ScoredPath score_segmented_path(const Topology& t, const LinkStateSnapshot& snap,
                                const NormalizedSnapshot& norm, const SegmentedPath& p,
                                const std::array<double, 4>& beta);

/// Exact score maximizer: every simple path, each with its optimal heads.
/// Ties resolve to the shorter, then lexicographically smaller path.
/// Guards against topologies over 12 nodes.
SegmentedPath oracle_route(const Topology& t, const LinkStateSnapshot& snap, int src, int dst,
                           int M, const std::array<double, 4>& beta);

struct ComparisonRow {
  int step = 0;
  std::string method;  // drl_sr | ospf_greedy | optimal_oracle
  double bottleneck_bw = 0.0;
  double path_delay = 0.0;
  double path_loss = 0.0;
  double delivery_delay = 0.0;
  SegmentedPath path;

  bool operator==(const ComparisonRow&) const = default;
};

struct ExperimentConfig {
  Topology topology;
  int src = 0, dst = 0;
  int max_depth = 4;
  std::array<double, 4> beta{0.25, 0.25, 0.25, 0.25};
  SacConfig sac;
  int horizon = 0;
  int traffic_steps = 24;
  double peak_mbps = 400.0;
  double poll_interval_s = 5.0;
  std::uint64_t seed = 1;
  bool include_oracle = true;  // ignored above 12 nodes

  EnvConfig env_config() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

/// The simulated day: per-step raw and normalized snapshots from chained
/// telemetry polls under the diurnal profile.
struct TrafficTrace {
  TrafficProfile profile;
  std::vector<LinkStateSnapshot> snapshots;
  std::vector<NormalizedSnapshot> normalized;
};
TrafficTrace build_traffic_trace(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<ComparisonRow> rows;
  std::string summary_json;
  Checkpoint checkpoint;
  std::vector<EpisodeLog> training_log;
  int drl_fallbacks = 0;  // greedy rollouts that failed to reach dst
};

/// Train on the trace, then per step roll out the greedy policy, the
/// staged baseline, and (on small graphs) the exact oracle, evaluating
/// every method with the same snapshot metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Re-evaluate an existing checkpoint on the config's traffic trace.
ExperimentResult evaluate_policy(const ExperimentConfig& cfg, const Checkpoint& checkpoint);

std::string rows_to_csv(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> rows_from_csv(const std::string& text);

/// Write <stem>.csv and <stem>_summary.json.
void export_results(const std::vector<ComparisonRow>& rows, const std::string& summary_json,
                    const std::string& stem);

std::string format_path(const SegmentedPath& p);
SegmentedPath parse_path(const std::string& text);

}  // namespace srlab
