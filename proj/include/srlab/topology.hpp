#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srlab/errors.hpp"

namespace srlab {

struct EdgeAttr {
  double capacity_mbps = 0.0;
  double base_delay_ms = 0.0;
  double base_loss = 0.0;
};

/// Undirected connected graph with per-link capacity/delay/loss and a
/// per-node controller delay. Node ids are contiguous 0..n-1; edges are
/// stored once with u < v.
class Topology {
 public:
  Topology(int node_count, std::vector<double> controller_delay_ms,
           std::vector<std::pair<int, int>> edges, std::vector<EdgeAttr> attrs);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int max_degree() const { return max_degree_; }

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const EdgeAttr& edge_attr(int edge_index) const { return attrs_[edge_index]; }
  double controller_delay_ms(int v) const { return controller_delay_ms_[v]; }
  const std::vector<double>& controller_delays() const { return controller_delay_ms_; }

  bool has_node(int v) const { return v >= 0 && v < node_count_; }
  bool has_edge(int u, int v) const { return edge_index(u, v).has_value(); }
  std::optional<int> edge_index(int u, int v) const;

  /// Neighbors of v in ascending node-id order.
  const std::vector<int>& neighbors(int v) const;

  double max_capacity_mbps() const { return max_capacity_mbps_; }

 private:
  int node_count_ = 0;
  std::vector<double> controller_delay_ms_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<EdgeAttr> attrs_;
  std::vector<std::vector<int>> adjacency_;
  std::map<std::pair<int, int>, int> edge_lookup_;
  int max_degree_ = 0;
  double max_capacity_mbps_ = 0.0;
};

/// Neighbors of v in strictly ascending node-id order.
const std::vector<int>& neighbors_sorted(const Topology& t, int v);

/// Parse and validate a topology document.
///
/// Document shape:
///   {"nodes":[{"id":int,"cdelay_ms":float}],
///    "edges":[{"u":int,"v":int,"bw_mbps":float,"delay_ms":float,"loss":float}]}
/// Node ids are renumbered to 0..n-1 preserving input order.
Topology load_topology(std::istream& source);
Topology load_topology(const std::string& text);
Topology load_topology_file(const std::string& path);
std::string topology_to_json(const Topology& t);

/// Random connected topology: spanning tree plus extra edges. Link
/// parameters: capacity uniform in [50, 500] Mbit/s, delay uniform in
/// [1, 10] ms, loss uniform in [0, 0.02], controller delay uniform in
/// [5, 50] ms.
Topology make_random_topology(int node_count, double extra_edge_prob, std::uint64_t seed);

/// Per-step offered load as a fraction of peak.
struct TrafficProfile {
  std::vector<double> load_factor;  // one entry per step, each in [0, 1]
  double peak_mbps = 0.0;
};

/// Diurnal curve: 0.5 + 0.4 sin(2*pi*h/steps - pi/2) + noise, noise uniform
/// in [-0.1, 0.1], clamped to [0, 1]. Deterministic under seed.
TrafficProfile gen_traffic_profile(int steps, double peak_mbps, std::uint64_t seed);

/// One poll of one directed port (the port on `node` facing `peer`).
struct PortSample {
  std::uint64_t tx_p = 0, rx_p = 0;
  std::uint64_t tx_b = 0, rx_b = 0;
  std::uint64_t tx_drop = 0, rx_drop = 0;  // carried, consumed by nothing
  std::uint64_t tx_err = 0, rx_err = 0;
  double t_dur_s = 0.0;
};

/// Full telemetry poll: every directed port, per-node echo round trips,
/// and per-directed-edge controller->u->v->controller traversal times.
struct PortCounters {
  std::map<std::pair<int, int>, PortSample> ports;  // key (node, peer)
  std::vector<double> echo_send_ms;
  std::vector<double> echo_receive_ms;
  std::map<std::pair<int, int>, double> lldp_ms;
};

/// Advance counters by one poll interval under the given per-edge offered
/// load (total for both directions; each direction carries half).
///
/// Byte counters grow by load*interval on both ends; packet counters apply
/// the link loss on the receiving side; overload beyond capacity is counted
/// as extra loss. Echo and LLDP times carry the realized +-2% jitter of the
/// poll: both measurements of a node share one realized controller delay,
/// so per-poll estimates cancel exactly the way the live measurement does.
PortCounters simulate_counters(const Topology& t,
                               const std::vector<double>& offered_load_mbps,
                               double poll_interval_s, const PortCounters* prev,
                               std::uint64_t seed);

}  // namespace srlab
