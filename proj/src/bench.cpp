#include "srlab/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srlab/errors.hpp"

namespace srlab {

namespace {

using json = nlohmann::json;

double edge_weight(const LinkStateSnapshot& snap, int u, int v, PathWeight weight) {
  return weight == PathWeight::Delay ? snap.link(u, v).delay_ms : 1.0;
}

std::string join_ints(const std::vector<int>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

}  // namespace

std::vector<int> dijkstra_shortest_path(const Topology& t, const LinkStateSnapshot& snap,
                                        int src, int dst, PathWeight weight) {
  if (!t.has_node(src) || !t.has_node(dst))
    throw ValidationError("source or destination is not in the topology");
  const int n = t.node_count();
  const double inf = std::numeric_limits<double>::infinity();

  // distances to dst, so the walk below can stay on tight edges
  std::vector<double> dist(n, inf);
  std::vector<char> settled(n, 0);
  dist[dst] = 0.0;
  for (int round = 0; round < n; ++round) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!settled[v] && (best < 0 || dist[v] < dist[best])) best = v;
    if (best < 0 || dist[best] == inf) break;
    settled[best] = 1;
    for (int w : t.neighbors(best))
      dist[w] = std::min(dist[w], dist[best] + edge_weight(snap, best, w, weight));
  }
  if (dist[src] == inf) throw ValidationError("destination unreachable from source");

  // lexicographically smallest tight walk; backtracking covers zero-weight
  // edge groups where a greedy choice can dead-end
  const double slack = 1e-9 * std::max(1.0, dist[src]);
  std::vector<int> path{src};
  std::vector<char> visited(n, 0);
  visited[src] = 1;
  auto dfs = [&](auto&& self, int cur, double cost) -> bool {
    if (cur == dst) return true;
    for (int w : t.neighbors(cur)) {
      if (visited[w]) continue;
      const double cand = cost + edge_weight(snap, cur, w, weight) + dist[w];
      if (cand > dist[src] + slack) continue;
      visited[w] = 1;
      path.push_back(w);
      if (self(self, w, cost + edge_weight(snap, cur, w, weight))) return true;
      path.pop_back();
      visited[w] = 0;
    }
    return false;
  };
  if (!dfs(dfs, src, 0.0)) throw ValidationError("destination unreachable from source");
  return path;
}

SegmentedPath baseline_route(const Topology& t, const LinkStateSnapshot& snap, int src, int dst,
                             int M) {
  SegmentedPath p;
  p.nodes = dijkstra_shortest_path(t, snap, src, dst, PathWeight::Delay);
  SegmentationProblem prob;
  prob.path_nodes = p.nodes;
  for (int v : p.nodes) prob.cdelay_ms.push_back(snap.controller_delay_ms[v]);
  prob.max_depth = M;
  p.heads = segment_greedy(prob);
  return p;
}

ScoredPath score_segmented_path(const Topology& t, const LinkStateSnapshot& snap,
                                const NormalizedSnapshot& norm, const SegmentedPath& p,
                                const std::array<double, 4>& beta) {
  ScoredPath s;
  s.bw_n = 1.0;
  double delay_sum = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    const LinkMetrics& m = norm.link(p.nodes[i], p.nodes[i + 1]);
    s.bw_n = std::min(s.bw_n, m.residual_bw_mbps);
    delay_sum += m.delay_ms;
  }
  s.delay_n = std::clamp(delay_sum / std::max(1, t.node_count() - 1), 0.0, 1.0);
  s.loss_n = path_loss(p, snap);
  s.cdelay_n = 0.0;
  for (int h : p.heads) s.cdelay_n = std::max(s.cdelay_n, norm.controller_delay_ms[p.nodes[h]]);
  s.score = path_score(s.bw_n, s.delay_n, s.loss_n, s.cdelay_n, beta);
  return s;
}

SegmentedPath oracle_route(const Topology& t, const LinkStateSnapshot& snap, int src, int dst,
                           int M, const std::array<double, 4>& beta) {
  if (t.node_count() > 12)
    throw ValidationError("graph too large for exhaustive path enumeration");
  if (!t.has_node(src) || !t.has_node(dst))
    throw ValidationError("source or destination is not in the topology");
  const NormalizedSnapshot norm = normalize_snapshot(snap);

  SegmentedPath best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> nodes{src};
  std::vector<char> visited(t.node_count(), 0);
  visited[src] = 1;

  auto consider = [&]() {
    SegmentationProblem prob;
    prob.path_nodes = nodes;
    for (int v : nodes) prob.cdelay_ms.push_back(snap.controller_delay_ms[v]);
    prob.max_depth = M;
    SegmentedPath cand{nodes, segment_optimal(prob).heads};
    const double score = score_segmented_path(t, snap, norm, cand, beta).score;
    const bool wins =
        score > best_score ||
        (score == best_score &&
         (best.nodes.empty() || cand.nodes.size() < best.nodes.size() ||
          (cand.nodes.size() == best.nodes.size() && cand.nodes < best.nodes)));
    if (wins) {
      best = std::move(cand);
      best_score = score;
    }
  };

  auto dfs = [&](auto&& self, int cur) -> void {
    if (cur == dst) {
      consider();
      return;
    }
    for (int w : t.neighbors(cur)) {
      if (visited[w]) continue;
      visited[w] = 1;
      nodes.push_back(w);
      self(self, w);
      nodes.pop_back();
      visited[w] = 0;
    }
  };
  dfs(dfs, src);
  if (best.nodes.empty()) throw ValidationError("destination unreachable from source");
  return best;
}

EnvConfig ExperimentConfig::env_config() const {
  EnvConfig e;
  e.src = src;
  e.dst = dst;
  e.max_depth = max_depth;
  e.beta = beta;
  e.horizon = horizon;
  return e;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.topology = load_topology_file(doc.at("topology").get<std::string>());
    cfg.src = doc.at("src").get<int>();
    cfg.dst = doc.at("dst").get<int>();
    cfg.max_depth = doc.at("M").get<int>();
    cfg.beta = doc.at("betas").get<std::array<double, 4>>();
    cfg.sac.gamma = doc.at("gamma").get<double>();
    cfg.sac.tau = doc.at("tau").get<double>();
    cfg.sac.actor_lr = doc.at("actor_lr").get<double>();
    cfg.sac.critic_lr = doc.at("critic_lr").get<double>();
    cfg.sac.alpha_lr = doc.at("alpha_lr").get<double>();
    cfg.sac.batch_size = doc.at("batch_size").get<int>();
    cfg.sac.episodes = doc.at("episodes").get<int>();
    cfg.horizon = doc.at("horizon").get<int>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.sac.seed = cfg.seed;
    const json& traffic = doc.at("traffic");
    cfg.traffic_steps = traffic.at("steps").get<int>();
    cfg.peak_mbps = traffic.at("peak_mbps").get<double>();
    // optional knobs
    cfg.poll_interval_s = doc.value("poll_interval_s", cfg.poll_interval_s);
    cfg.sac.hidden = doc.value("hidden", cfg.sac.hidden);
    cfg.sac.updates_per_step = doc.value("updates_per_step", cfg.sac.updates_per_step);
    cfg.sac.optimizer = doc.value("optimizer", cfg.sac.optimizer);
    cfg.sac.buffer_capacity = doc.value("buffer_capacity", cfg.sac.buffer_capacity);
    cfg.sac.initial_alpha = doc.value("initial_alpha", cfg.sac.initial_alpha);
    cfg.sac.target_entropy = doc.value("target_entropy", cfg.sac.target_entropy);
    cfg.include_oracle = doc.value("include_oracle", cfg.include_oracle);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

TrafficTrace build_traffic_trace(const ExperimentConfig& cfg) {
  TrafficTrace trace;
  Rng master(cfg.seed);
  const std::uint64_t traffic_seed = master.next_u64();
  const std::uint64_t share_seed = master.next_u64();
  Rng telemetry(master.next_u64());

  trace.profile = gen_traffic_profile(cfg.traffic_steps, cfg.peak_mbps, traffic_seed);

  // fixed per-link share of the offered peak, so links load unevenly
  Rng share_rng(share_seed);
  std::vector<double> share(cfg.topology.edge_count());
  for (double& s : share) s = share_rng.uniform(0.1, 1.0);

  std::vector<double> loads(cfg.topology.edge_count(), 0.0);
  PortCounters prev = simulate_counters(cfg.topology, loads, cfg.poll_interval_s, nullptr,
                                        telemetry.next_u64());
  for (int step = 0; step < cfg.traffic_steps; ++step) {
    for (int e = 0; e < cfg.topology.edge_count(); ++e)
      loads[e] = trace.profile.load_factor[step] * cfg.peak_mbps * share[e];
    PortCounters curr = simulate_counters(cfg.topology, loads, cfg.poll_interval_s, &prev,
                                          telemetry.next_u64());
    LinkStateSnapshot snap = snapshot_from_counters(cfg.topology, prev, curr);
    trace.normalized.push_back(normalize_snapshot(snap));
    trace.snapshots.push_back(std::move(snap));
    prev = std::move(curr);
  }
  return trace;
}

namespace {

ExperimentResult evaluate_trace(const ExperimentConfig& cfg, const TrafficTrace& trace,
                                Checkpoint checkpoint, std::vector<EpisodeLog> log) {
  ExperimentResult result;
  result.checkpoint = std::move(checkpoint);
  result.training_log = std::move(log);

  const bool with_oracle = cfg.include_oracle && cfg.topology.node_count() <= 12;
  struct Accum {
    double bw = 0, delay = 0, loss = 0, delivery = 0, score = 0;
    int count = 0;
  };
  std::map<std::string, Accum> per_method;

  for (int step = 0; step < cfg.traffic_steps; ++step) {
    const LinkStateSnapshot& snap = trace.snapshots[step];
    const NormalizedSnapshot& norm = trace.normalized[step];

    std::vector<std::pair<std::string, SegmentedPath>> methods;

    Env env(cfg.topology, cfg.env_config(), norm);
    greedy_rollout(env, result.checkpoint.policy);
    if (env.reached_destination()) {
      methods.emplace_back("drl_sr", env.extract_path());
    } else {
      ++result.drl_fallbacks;
      methods.emplace_back("drl_sr",
                           baseline_route(cfg.topology, snap, cfg.src, cfg.dst, cfg.max_depth));
    }
    methods.emplace_back("ospf_greedy",
                         baseline_route(cfg.topology, snap, cfg.src, cfg.dst, cfg.max_depth));
    if (with_oracle)
      methods.emplace_back("optimal_oracle",
                           oracle_route(cfg.topology, snap, cfg.src, cfg.dst, cfg.max_depth,
                                        cfg.beta));

    for (auto& [name, path] : methods) {
      ComparisonRow row;
      row.step = step;
      row.method = name;
      row.bottleneck_bw = bottleneck_bw(path, snap);
      row.path_delay = path_delay(path, snap);
      row.path_loss = path_loss(path, snap);
      row.delivery_delay = delivery_delay(path, snap);
      row.path = path;
      result.rows.push_back(row);

      Accum& acc = per_method[name];
      acc.bw += row.bottleneck_bw;
      acc.delay += row.path_delay;
      acc.loss += row.path_loss;
      acc.delivery += row.delivery_delay;
      acc.score += score_segmented_path(cfg.topology, snap, norm, path, cfg.beta).score;
      acc.count += 1;
    }
  }

  json summary;
  for (const auto& [name, acc] : per_method) {
    summary["methods"][name] = {{"bottleneck_bw", acc.bw / acc.count},
                                {"path_delay", acc.delay / acc.count},
                                {"path_loss", acc.loss / acc.count},
                                {"delivery_delay", acc.delivery / acc.count},
                                {"path_score", acc.score / acc.count}};
  }
  if (per_method.count("drl_sr") && per_method.count("ospf_greedy")) {
    const Accum& drl = per_method["drl_sr"];
    const Accum& base = per_method["ospf_greedy"];
    auto rel = [](double ours, double theirs) {
      return theirs != 0.0 ? (ours - theirs) / theirs : 0.0;
    };
    summary["drl_vs_baseline"] = {
        {"bottleneck_bw", rel(drl.bw / drl.count, base.bw / base.count)},
        {"path_delay", rel(drl.delay / drl.count, base.delay / base.count)},
        {"path_loss", rel(drl.loss / drl.count, base.loss / base.count)},
        {"delivery_delay", rel(drl.delivery / drl.count, base.delivery / base.count)}};
  }
  summary["drl_fallbacks"] = result.drl_fallbacks;
  summary["steps"] = cfg.traffic_steps;
  result.summary_json = summary.dump(2);
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const TrafficTrace trace = build_traffic_trace(cfg);
  TrainResult trained = train(cfg.topology, cfg.env_config(), trace.normalized, cfg.sac);
  Checkpoint checkpoint{cfg.env_config(), cfg.sac, std::move(trained.policy),
                        std::move(trained.q1), std::move(trained.q2), trained.alpha};
  return evaluate_trace(cfg, trace, std::move(checkpoint), std::move(trained.log));
}

ExperimentResult evaluate_policy(const ExperimentConfig& cfg, const Checkpoint& checkpoint) {
  const TrafficTrace trace = build_traffic_trace(cfg);
  return evaluate_trace(cfg, trace, checkpoint, {});
}

std::string format_path(const SegmentedPath& p) {
  return join_ints(p.nodes, '-') + ";heads=" + join_ints(p.heads, ',');
}

SegmentedPath parse_path(const std::string& text) {
  const auto semi = text.find(";heads=");
  if (semi == std::string::npos) throw ValidationError("malformed path field: " + text);
  SegmentedPath p;
  auto parse_list = [](const std::string& s, char sep) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
      if (!item.empty()) out.push_back(std::stoi(item));
    return out;
  };
  p.nodes = parse_list(text.substr(0, semi), '-');
  p.heads = parse_list(text.substr(semi + 7), ',');
  return p;
}

std::string rows_to_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "step,method,bottleneck_bw,path_delay,path_loss,delivery_delay,path\n";
  for (const ComparisonRow& r : rows) {
    out += std::to_string(r.step);
    out += ',';
    out += r.method;
    out += ',';
    out += format_double(r.bottleneck_bw);
    out += ',';
    out += format_double(r.path_delay);
    out += ',';
    out += format_double(r.path_loss);
    out += ',';
    out += format_double(r.delivery_delay);
    out += ',';
    out += format_path(r.path);
    out += '\n';
  }
  return out;
}

std::vector<ComparisonRow> rows_from_csv(const std::string& text) {
  std::vector<ComparisonRow> rows;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    // the path field contains commas between head indices; re-join
    if (fields.size() < 7) throw ValidationError("malformed csv row: " + line);
    std::string path_field = fields[6];
    for (std::size_t i = 7; i < fields.size(); ++i) path_field += "," + fields[i];
    ComparisonRow r;
    r.step = std::stoi(fields[0]);
    r.method = fields[1];
    r.bottleneck_bw = std::stod(fields[2]);
    r.path_delay = std::stod(fields[3]);
    r.path_loss = std::stod(fields[4]);
    r.delivery_delay = std::stod(fields[5]);
    r.path = parse_path(path_field);
    rows.push_back(std::move(r));
  }
  return rows;
}

void export_results(const std::vector<ComparisonRow>& rows, const std::string& summary_json,
                    const std::string& stem) {
  std::ofstream csv(stem + ".csv");
  if (!csv) throw ValidationError("cannot write results: " + stem + ".csv");
  csv << rows_to_csv(rows);
  std::ofstream summary(stem + "_summary.json");
  if (!summary) throw ValidationError("cannot write summary: " + stem + "_summary.json");
  summary << summary_json;
}

}  // namespace srlab
