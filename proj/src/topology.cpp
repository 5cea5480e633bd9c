#include "srlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srlab/rng.hpp"

namespace srlab {

namespace {

using json = nlohmann::json;

// nominal packet size used to derive packet counters from byte counters
constexpr double kPacketBytes = 1250.0;
constexpr double kJitter = 0.02;

std::string edge_name(int u, int v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

Topology::Topology(int node_count, std::vector<double> controller_delay_ms,
                   std::vector<std::pair<int, int>> edges, std::vector<EdgeAttr> attrs)
    : node_count_(node_count),
      controller_delay_ms_(std::move(controller_delay_ms)),
      edges_(std::move(edges)),
      attrs_(std::move(attrs)) {
  if (node_count_ <= 0) throw ValidationError("topology needs at least one node");
  if (static_cast<int>(controller_delay_ms_.size()) != node_count_)
    throw ValidationError("controller delay list does not match node count");
  for (int v = 0; v < node_count_; ++v) {
    if (controller_delay_ms_[v] < 0.0)
      throw ValidationError("negative controller delay at node " + std::to_string(v));
  }
  if (edges_.size() != attrs_.size())
    throw ValidationError("edge attribute list does not match edge count");

  adjacency_.assign(node_count_, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto& [u, v] = edges_[i];
    if (u > v) std::swap(u, v);
    if (!has_node(u) || !has_node(v))
      throw ValidationError("unknown node in edge " + edge_name(u, v));
    if (u == v) throw ValidationError("self-loop at node " + std::to_string(u));
    if (!edge_lookup_.emplace(edges_[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate edge " + edge_name(u, v));
    const EdgeAttr& a = attrs_[i];
    if (!(a.capacity_mbps > 0.0))
      throw ValidationError("missing capacity or non-positive capacity on edge " + edge_name(u, v));
    if (a.base_delay_ms < 0.0)
      throw ValidationError("negative delay on edge " + edge_name(u, v));
    if (a.base_loss < 0.0 || a.base_loss >= 1.0)
      throw ValidationError("loss outside [0,1) on edge " + edge_name(u, v));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    max_degree_ = std::max(max_degree_, static_cast<int>(nbrs.size()));
  }
  for (const EdgeAttr& a : attrs_) max_capacity_mbps_ = std::max(max_capacity_mbps_, a.capacity_mbps);

  // connectivity check
  std::vector<char> seen(node_count_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  if (reached != node_count_) throw ValidationError("disconnected topology");
}

std::optional<int> Topology::edge_index(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = edge_lookup_.find({u, v});
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

const std::vector<int>& Topology::neighbors(int v) const {
  if (!has_node(v)) throw ValidationError("unknown node " + std::to_string(v));
  return adjacency_[v];
}

const std::vector<int>& neighbors_sorted(const Topology& t, int v) { return t.neighbors(v); }

Topology load_topology(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed topology document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
    throw ValidationError("malformed topology document: expected {nodes, edges}");

  std::map<std::int64_t, int> renumber;
  std::vector<double> cdelay;
  for (const auto& node : doc.at("nodes")) {
    if (!node.contains("id")) throw ValidationError("node missing id");
    if (!node.contains("cdelay_ms")) throw ValidationError("node missing cdelay_ms");
    const auto id = node.at("id").get<std::int64_t>();
    if (!renumber.emplace(id, static_cast<int>(cdelay.size())).second)
      throw ValidationError("duplicate node id " + std::to_string(id));
    cdelay.push_back(node.at("cdelay_ms").get<double>());
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeAttr> attrs;
  for (const auto& edge : doc.at("edges")) {
    if (!edge.contains("u") || !edge.contains("v"))
      throw ValidationError("edge missing endpoint");
    const auto u_raw = edge.at("u").get<std::int64_t>();
    const auto v_raw = edge.at("v").get<std::int64_t>();
    auto u_it = renumber.find(u_raw);
    auto v_it = renumber.find(v_raw);
    if (u_it == renumber.end() || v_it == renumber.end())
      throw ValidationError("unknown node in edge " +
                            edge_name(static_cast<int>(u_raw), static_cast<int>(v_raw)));
    if (!edge.contains("bw_mbps"))
      throw ValidationError("missing capacity on edge " + edge_name(u_it->second, v_it->second));
    if (!edge.contains("delay_ms"))
      throw ValidationError("missing delay on edge " + edge_name(u_it->second, v_it->second));
    EdgeAttr attr;
    attr.capacity_mbps = edge.at("bw_mbps").get<double>();
    attr.base_delay_ms = edge.at("delay_ms").get<double>();
    attr.base_loss = edge.value("loss", 0.0);
    edges.emplace_back(u_it->second, v_it->second);
    attrs.push_back(attr);
  }
  return Topology(static_cast<int>(cdelay.size()), std::move(cdelay), std::move(edges),
                  std::move(attrs));
}

Topology load_topology(const std::string& text) {
  std::istringstream in(text);
  return load_topology(in);
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open topology file: " + path);
  return load_topology(in);
}

std::string topology_to_json(const Topology& t) {
  json doc;
  doc["nodes"] = json::array();
  for (int v = 0; v < t.node_count(); ++v)
    doc["nodes"].push_back({{"id", v}, {"cdelay_ms", t.controller_delay_ms(v)}});
  doc["edges"] = json::array();
  for (int e = 0; e < t.edge_count(); ++e) {
    const auto& [u, v] = t.edges()[e];
    const EdgeAttr& a = t.edge_attr(e);
    doc["edges"].push_back({{"u", u},
                            {"v", v},
                            {"bw_mbps", a.capacity_mbps},
                            {"delay_ms", a.base_delay_ms},
                            {"loss", a.base_loss}});
  }
  return doc.dump(2);
}

Topology make_random_topology(int node_count, double extra_edge_prob, std::uint64_t seed) {
  if (node_count < 2) throw ValidationError("random topology needs at least two nodes");
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeAttr> attrs;
  auto add_edge = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
    attrs.push_back(EdgeAttr{rng.uniform(50.0, 500.0), rng.uniform(1.0, 10.0),
                             rng.uniform(0.0, 0.02)});
  };
  // random spanning tree: attach each node to a uniformly chosen earlier one
  for (int v = 1; v < node_count; ++v)
    add_edge(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(v))), v);
  for (int u = 0; u < node_count; ++u) {
    for (int v = u + 1; v < node_count; ++v) {
      bool present = false;
      for (const auto& e : edges)
        if (e == std::make_pair(u, v)) present = true;
      if (!present && rng.uniform() < extra_edge_prob) add_edge(u, v);
    }
  }
  std::vector<double> cdelay(node_count);
  for (double& c : cdelay) c = rng.uniform(5.0, 50.0);
  return Topology(node_count, std::move(cdelay), std::move(edges), std::move(attrs));
}

TrafficProfile gen_traffic_profile(int steps, double peak_mbps, std::uint64_t seed) {
  if (steps < 1) throw ValidationError("traffic profile needs at least one step");
  if (!(peak_mbps > 0.0)) throw ValidationError("peak rate must be positive");
  Rng rng(seed);
  TrafficProfile profile;
  profile.peak_mbps = peak_mbps;
  profile.load_factor.resize(steps);
  for (int h = 0; h < steps; ++h) {
    const double phase = 2.0 * std::numbers::pi * (static_cast<double>(h) / steps) -
                         std::numbers::pi / 2.0;
    double f = 0.5 + 0.4 * std::sin(phase) + rng.uniform(-0.1, 0.1);
    profile.load_factor[h] = std::clamp(f, 0.0, 1.0);
  }
  return profile;
}

PortCounters simulate_counters(const Topology& t,
                               const std::vector<double>& offered_load_mbps,
                               double poll_interval_s, const PortCounters* prev,
                               std::uint64_t seed) {
  if (!(poll_interval_s > 0.0)) throw ValidationError("poll interval must be positive");
  if (static_cast<int>(offered_load_mbps.size()) != t.edge_count())
    throw ValidationError("offered load list does not match edge count");

  PortCounters out;
  if (prev) {
    out.ports = prev->ports;
  } else {
    for (const auto& [u, v] : t.edges()) {
      out.ports[{u, v}] = PortSample{};
      out.ports[{v, u}] = PortSample{};
    }
  }

  Rng rng(seed);
  // realized per-poll values shared by every measurement in the poll
  const int n = t.node_count();
  std::vector<double> realized_cdelay(n);
  out.echo_send_ms.resize(n);
  out.echo_receive_ms.resize(n);
  for (int v = 0; v < n; ++v) {
    realized_cdelay[v] = t.controller_delay_ms(v) * (1.0 + rng.uniform(-kJitter, kJitter));
    const double asym = rng.uniform(-kJitter, kJitter);
    out.echo_send_ms[v] = 2.0 * realized_cdelay[v] * (1.0 + asym);
    out.echo_receive_ms[v] = 2.0 * realized_cdelay[v] * (1.0 - asym);
  }

  for (int e = 0; e < t.edge_count(); ++e) {
    const auto& [u, v] = t.edges()[e];
    const EdgeAttr& attr = t.edge_attr(e);
    const double realized_delay = attr.base_delay_ms * (1.0 + rng.uniform(-kJitter, kJitter));
    out.lldp_ms[{u, v}] = realized_cdelay[u] + realized_delay + realized_cdelay[v];
    out.lldp_ms[{v, u}] = realized_cdelay[v] + realized_delay + realized_cdelay[u];

    const double load = offered_load_mbps[e];
    if (load < 0.0) throw ValidationError("negative offered load on edge " + edge_name(u, v));
    // each direction carries half of the offered load; overload is loss
    const double dir_load = load / 2.0;
    const double delivered_frac =
        (dir_load > attr.capacity_mbps / 2.0) ? (attr.capacity_mbps / 2.0) / dir_load : 1.0;
    const double loss_eff = 1.0 - (1.0 - attr.base_loss) * delivered_frac;
    const auto bytes = static_cast<std::uint64_t>(
        std::llround(dir_load * 1e6 / 8.0 * poll_interval_s));
    const auto pkts = static_cast<std::uint64_t>(std::llround(bytes / kPacketBytes));
    const auto pkts_through =
        static_cast<std::uint64_t>(std::llround(pkts * (1.0 - loss_eff)));
    for (auto [from, to] : {std::pair{u, v}, std::pair{v, u}}) {
      PortSample& tx_port = out.ports[{from, to}];
      PortSample& rx_port = out.ports[{to, from}];
      tx_port.tx_b += bytes;
      tx_port.tx_p += pkts;
      rx_port.rx_b += bytes;
      rx_port.rx_p += pkts_through;
      tx_port.tx_drop += pkts - pkts_through;
    }
  }
  for (auto& [key, port] : out.ports) port.t_dur_s += poll_interval_s;
  return out;
}

}  // namespace srlab
