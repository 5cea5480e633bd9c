#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srlab/matrix.hpp"
#include "srlab/topology.hpp"

namespace srlab {

struct LinkMetrics {
  double residual_bw_mbps = 0.0;
  double delay_ms = 0.0;
  double loss = 0.0;
  double capacity_mbps = 0.0;
};

/// Per-edge link metrics plus per-node controller delay, as estimated from
/// one pair of telemetry polls. Edge keys are stored with u < v.
struct LinkStateSnapshot {
  std::map<std::pair<int, int>, LinkMetrics> links;
  std::vector<double> controller_delay_ms;

  const LinkMetrics& link(int u, int v) const;
  bool has_link(int u, int v) const;
};

/// Snapshot with every metric mapped into [0, 1]. Residual bandwidth is
/// scaled by the largest link capacity; delay, loss and controller delay
/// are min-max normalized over the snapshot.
struct NormalizedSnapshot {
  std::map<std::pair<int, int>, LinkMetrics> links;  // capacity_mbps unused here
  std::vector<double> controller_delay_ms;

  const LinkMetrics& link(int u, int v) const;
};

/// Absolute throughput seen by a port between two polls, in Mbit/s.
double used_bandwidth(const PortSample& prev_poll, const PortSample& curr_poll);

/// Residual capacity, clamped at zero under overload.
double residual_bandwidth(double capacity_mbps, double used_mbps);

/// Loss fraction from packet count deltas; zero when nothing was sent.
double packet_loss_ratio(double tx_p_delta, double rx_p_delta);

/// Controller-to-switch delay from the two echo round trips.
double controller_delay(double echo_send_ms, double echo_receive_ms);

/// Link delay from both LLDP traversals with the endpoint round trips
/// cancelled out, clamped at zero.
double link_delay(double lldp_uv_ms, double lldp_vu_ms, double echo_rtt_u_ms,
                  double echo_rtt_v_ms);

/// Min-max map onto [0, 1]; an all-equal input maps to all zeros.
std::vector<double> normalize_minmax(std::span<const double> values);

/// Recompute all link metrics from two successive polls.
LinkStateSnapshot snapshot_from_counters(const Topology& t, const PortCounters& prev,
                                         const PortCounters& curr);

NormalizedSnapshot normalize_snapshot(const LinkStateSnapshot& snap);

struct MetricChannels {
  Matrix bw, delay, loss, cdelay;
};

/// The four metric channels of the agent state: symmetric bw/delay/loss
/// adjacency matrices (zero where no edge) and a diagonal cdelay matrix.
MetricChannels metric_channels(const NormalizedSnapshot& snap, const Topology& t);
MetricChannels assemble_metric_channels(const LinkStateSnapshot& snap, const Topology& t);

std::string snapshot_to_json(const LinkStateSnapshot& snap);

}  // namespace srlab
