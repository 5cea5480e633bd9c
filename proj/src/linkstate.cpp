#include "srlab/linkstate.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "srlab/errors.hpp"

namespace srlab {

namespace {

std::pair<int, int> ordered(int u, int v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

}  // namespace

const LinkMetrics& LinkStateSnapshot::link(int u, int v) const {
  auto it = links.find(ordered(u, v));
  if (it == links.end())
    throw ValidationError("snapshot has no metrics for edge (" + std::to_string(u) + "," +
                          std::to_string(v) + ")");
  return it->second;
}

bool LinkStateSnapshot::has_link(int u, int v) const { return links.count(ordered(u, v)) > 0; }

const LinkMetrics& NormalizedSnapshot::link(int u, int v) const {
  auto it = links.find(ordered(u, v));
  if (it == links.end())
    throw ValidationError("snapshot has no metrics for edge (" + std::to_string(u) + "," +
                          std::to_string(v) + ")");
  return it->second;
}

double used_bandwidth(const PortSample& prev_poll, const PortSample& curr_poll) {
  const double dt = curr_poll.t_dur_s - prev_poll.t_dur_s;
  if (!(dt > 0.0)) throw ValidationError("poll duration did not advance");
  const double prev_bytes = static_cast<double>(prev_poll.tx_b) + static_cast<double>(prev_poll.rx_b);
  const double curr_bytes = static_cast<double>(curr_poll.tx_b) + static_cast<double>(curr_poll.rx_b);
  const double delta = std::max(curr_bytes - prev_bytes, 0.0);
  return delta * 8.0 / dt / 1e6;
}

double residual_bandwidth(double capacity_mbps, double used_mbps) {
  return std::max(capacity_mbps - used_mbps, 0.0);
}

double packet_loss_ratio(double tx_p_delta, double rx_p_delta) {
  if (tx_p_delta <= 0.0) return 0.0;
  return std::clamp((tx_p_delta - rx_p_delta) / tx_p_delta, 0.0, 1.0);
}

double controller_delay(double echo_send_ms, double echo_receive_ms) {
  return (echo_send_ms + echo_receive_ms) / 2.0;
}

double link_delay(double lldp_uv_ms, double lldp_vu_ms, double echo_rtt_u_ms,
                  double echo_rtt_v_ms) {
  return std::max((lldp_uv_ms + lldp_vu_ms - echo_rtt_u_ms - echo_rtt_v_ms) / 2.0, 0.0);
}

std::vector<double> normalize_minmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot normalize an empty list");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(values.size(), 0.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
  }
  return out;
}

LinkStateSnapshot snapshot_from_counters(const Topology& t, const PortCounters& prev,
                                         const PortCounters& curr) {
  LinkStateSnapshot snap;
  const int n = t.node_count();
  if (static_cast<int>(curr.echo_send_ms.size()) != n)
    throw ValidationError("counters do not match topology");

  snap.controller_delay_ms.resize(n);
  std::vector<double> echo_rtt(n);
  for (int v = 0; v < n; ++v) {
    snap.controller_delay_ms[v] = controller_delay(curr.echo_send_ms[v], curr.echo_receive_ms[v]);
    echo_rtt[v] = snap.controller_delay_ms[v];
  }

  for (int e = 0; e < t.edge_count(); ++e) {
    const auto& [u, v] = t.edges()[e];
    auto port = [&](const PortCounters& c, int a, int b) -> const PortSample& {
      auto it = c.ports.find({a, b});
      if (it == c.ports.end())
        throw ValidationError("counters missing port (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
      return it->second;
    };
    const PortSample& uv_prev = port(prev, u, v);
    const PortSample& uv_curr = port(curr, u, v);
    const PortSample& vu_prev = port(prev, v, u);
    const PortSample& vu_curr = port(curr, v, u);

    LinkMetrics m;
    m.capacity_mbps = t.edge_attr(e).capacity_mbps;
    m.residual_bw_mbps = residual_bandwidth(m.capacity_mbps, used_bandwidth(uv_prev, uv_curr));

    const double loss_uv =
        packet_loss_ratio(static_cast<double>(uv_curr.tx_p - uv_prev.tx_p),
                          static_cast<double>(vu_curr.rx_p - vu_prev.rx_p));
    const double loss_vu =
        packet_loss_ratio(static_cast<double>(vu_curr.tx_p - vu_prev.tx_p),
                          static_cast<double>(uv_curr.rx_p - uv_prev.rx_p));
    m.loss = (loss_uv + loss_vu) / 2.0;

    auto lldp = [&](int a, int b) {
      auto it = curr.lldp_ms.find({a, b});
      if (it == curr.lldp_ms.end())
        throw ValidationError("counters missing lldp time (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
      return it->second;
    };
    m.delay_ms = link_delay(lldp(u, v), lldp(v, u), echo_rtt[u], echo_rtt[v]);

    snap.links[{u, v}] = m;
  }
  return snap;
}

NormalizedSnapshot normalize_snapshot(const LinkStateSnapshot& snap) {
  NormalizedSnapshot out;
  double max_capacity = 0.0;
  for (const auto& [key, m] : snap.links) max_capacity = std::max(max_capacity, m.capacity_mbps);

  std::vector<double> delays, losses;
  delays.reserve(snap.links.size());
  losses.reserve(snap.links.size());
  for (const auto& [key, m] : snap.links) {
    delays.push_back(m.delay_ms);
    losses.push_back(m.loss);
  }
  const std::vector<double> delays_n = normalize_minmax(delays);
  const std::vector<double> losses_n = normalize_minmax(losses);
  const std::vector<double> cdelay_n = normalize_minmax(snap.controller_delay_ms);

  std::size_t i = 0;
  for (const auto& [key, m] : snap.links) {
    LinkMetrics nm;
    nm.residual_bw_mbps = max_capacity > 0.0 ? m.residual_bw_mbps / max_capacity : 0.0;
    nm.delay_ms = delays_n[i];
    nm.loss = losses_n[i];
    out.links[key] = nm;
    ++i;
  }
  out.controller_delay_ms = cdelay_n;
  return out;
}

MetricChannels metric_channels(const NormalizedSnapshot& snap, const Topology& t) {
  const int n = t.node_count();
  if (static_cast<int>(snap.controller_delay_ms.size()) != n)
    throw ValidationError("snapshot does not match topology");
  MetricChannels ch{Matrix(n), Matrix(n), Matrix(n), Matrix(n)};
  for (const auto& [u, v] : t.edges()) {
    const LinkMetrics& m = snap.link(u, v);
    ch.bw.at(u, v) = ch.bw.at(v, u) = m.residual_bw_mbps;
    ch.delay.at(u, v) = ch.delay.at(v, u) = m.delay_ms;
    ch.loss.at(u, v) = ch.loss.at(v, u) = m.loss;
  }
  for (int v = 0; v < n; ++v) ch.cdelay.at(v, v) = snap.controller_delay_ms[v];
  return ch;
}

MetricChannels assemble_metric_channels(const LinkStateSnapshot& snap, const Topology& t) {
  for (const auto& [u, v] : t.edges()) {
    if (!snap.has_link(u, v))
      throw ValidationError("snapshot missing edge (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
  }
  return metric_channels(normalize_snapshot(snap), t);
}

std::string snapshot_to_json(const LinkStateSnapshot& snap) {
  nlohmann::json doc;
  doc["links"] = nlohmann::json::array();
  for (const auto& [key, m] : snap.links) {
    doc["links"].push_back({{"u", key.first},
                            {"v", key.second},
                            {"residual_bw_mbps", m.residual_bw_mbps},
                            {"delay_ms", m.delay_ms},
                            {"loss", m.loss},
                            {"capacity_mbps", m.capacity_mbps}});
  }
  doc["controller_delay_ms"] = snap.controller_delay_ms;
  return doc.dump(2);
}

}  // namespace srlab
