#include "srlab/srpath.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "srlab/errors.hpp"

namespace srlab {

namespace {

constexpr int kFirstSwapId = 100;

}  // namespace

Feasibility check_feasibility(std::span<const int> nodes, std::span<const int> heads, int M,
                              const Topology* t) {
  auto fail = [](std::string why) { return Feasibility{false, std::move(why)}; };
  if (nodes.size() < 2) return fail("path needs at least two nodes");
  std::set<int> distinct(nodes.begin(), nodes.end());
  if (distinct.size() != nodes.size()) return fail("path repeats a node");
  if (t) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (!t->has_node(nodes[i]) || !t->has_node(nodes[i + 1]) ||
          !t->has_edge(nodes[i], nodes[i + 1]))
        return fail("no edge between consecutive nodes " + std::to_string(nodes[i]) + " and " +
                    std::to_string(nodes[i + 1]));
    }
  }
  const int k = static_cast<int>(nodes.size()) - 1;  // link count
  if (heads.empty() || heads[0] != 0) return fail("first head must be index 0");
  for (std::size_t j = 0; j + 1 < heads.size(); ++j) {
    if (heads[j + 1] <= heads[j]) return fail("heads must be strictly increasing");
  }
  if (heads.back() >= k) return fail("head index must precede the last node");
  for (std::size_t j = 0; j + 1 < heads.size(); ++j) {
    const int gap = heads[j + 1] - heads[j];
    if (gap + 1 > M)
      return fail("non-final segment " + std::to_string(gap) + "+1 > " + std::to_string(M));
  }
  const int final_gap = k - heads.back();
  if (final_gap > M)
    return fail("final segment " + std::to_string(final_gap) + " > " + std::to_string(M));
  return {};
}

int LabelStackPlan::stack_for_swap(int swap_id) const {
  for (const auto& [id, idx] : swap_to_stack)
    if (id == swap_id) return idx;
  return -1;
}

LabelStackPlan encode_label_stacks(const SegmentedPath& p, int M) {
  const Feasibility f = check_feasibility(p.nodes, p.heads, M);
  if (!f.valid) throw ValidationError("infeasible segmentation: " + f.violation);

  LabelStackPlan plan;
  const int k = static_cast<int>(p.nodes.size()) - 1;
  int next_swap_id = kFirstSwapId;
  for (std::size_t j = 0; j < p.heads.size(); ++j) {
    const bool last = j + 1 == p.heads.size();
    const int begin = p.heads[j];
    const int end = last ? k : p.heads[j + 1];
    LabelStack stack;
    stack.installed_at = p.nodes[begin];
    for (int i = begin; i < end; ++i) {
      Label l;
      l.kind = Label::Kind::Link;
      l.from = p.nodes[i];
      l.to = p.nodes[i + 1];
      stack.entries.push_back(l);
    }
    if (!last) {
      Label l;
      l.kind = Label::Kind::Swap;
      l.swap_id = next_swap_id++;
      stack.entries.push_back(l);
      plan.swap_to_stack.emplace_back(l.swap_id, static_cast<int>(j) + 1);
    }
    plan.stacks.push_back(std::move(stack));
  }
  return plan;
}

std::vector<int> forward_packet(const LabelStackPlan& plan, const Topology& t) {
  if (plan.stacks.empty() || plan.stacks[0].entries.empty())
    throw ValidationError("empty label stack plan");

  std::vector<int> trace;
  int current = plan.stacks[0].installed_at;
  if (!t.has_node(current)) throw ValidationError("plan ingress is not in the topology");
  trace.push_back(current);

  std::vector<Label> stack = plan.stacks[0].entries;  // front = top of stack
  std::size_t top = 0;
  std::size_t hops = 0;
  const std::size_t hop_limit = plan.stacks.size() * t.node_count() + 1;
  while (top < stack.size()) {
    const Label label = stack[top];
    if (label.kind == Label::Kind::Link) {
      if (label.from != current)
        throw ValidationError("link label does not start at the current node");
      if (!t.has_edge(label.from, label.to))
        throw ValidationError("link label references nonexistent edge (" +
                              std::to_string(label.from) + "," + std::to_string(label.to) + ")");
      ++top;
      current = label.to;
      trace.push_back(current);
      if (++hops > hop_limit) throw ValidationError("forwarding did not terminate");
    } else {
      const int next = plan.stack_for_swap(label.swap_id);
      if (next < 0 || next >= static_cast<int>(plan.stacks.size()))
        throw ValidationError("unassociated swap label " + std::to_string(label.swap_id));
      if (plan.stacks[next].installed_at != current)
        throw ValidationError("swap label " + std::to_string(label.swap_id) +
                              " resolved away from its swap node");
      stack = plan.stacks[next].entries;
      top = 0;
    }
  }
  return trace;
}

namespace {

const LinkMetrics& path_edge_metrics(const LinkStateSnapshot& snap, int u, int v) {
  return snap.link(u, v);  // throws on a missing edge metric
}

}  // namespace

double bottleneck_bw(const SegmentedPath& p, const LinkStateSnapshot& snap) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
    best = std::min(best, path_edge_metrics(snap, p.nodes[i], p.nodes[i + 1]).residual_bw_mbps);
  return best;
}

double path_delay(const SegmentedPath& p, const LinkStateSnapshot& snap) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
    total += path_edge_metrics(snap, p.nodes[i], p.nodes[i + 1]).delay_ms;
  return total;
}

double path_loss(const SegmentedPath& p, const LinkStateSnapshot& snap) {
  double through = 1.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
    through *= 1.0 - path_edge_metrics(snap, p.nodes[i], p.nodes[i + 1]).loss;
  return 1.0 - through;
}

double delivery_delay(const SegmentedPath& p, const LinkStateSnapshot& snap) {
  double worst = 0.0;
  for (int h : p.heads) worst = std::max(worst, snap.controller_delay_ms[p.nodes[h]]);
  return worst;
}

double path_score(double bw_n, double delay_n, double loss_n, double cdelay_n,
                  const std::array<double, 4>& beta) {
  for (double x : {bw_n, delay_n, loss_n, cdelay_n}) {
    if (x < 0.0 || x > 1.0) throw ValidationError("path score inputs must lie in [0,1]");
  }
  return beta[0] * (bw_n - 1.0) + beta[1] * (1.0 - delay_n) + beta[2] * (1.0 - loss_n) +
         beta[3] * (1.0 - cdelay_n);
}

std::string plan_to_json(const LabelStackPlan& plan) {
  nlohmann::json doc;
  doc["stacks"] = nlohmann::json::array();
  for (const LabelStack& s : plan.stacks) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Label& l : s.entries) {
      if (l.kind == Label::Kind::Link)
        entries.push_back({{"link", {l.from, l.to}}});
      else
        entries.push_back({{"swap", l.swap_id}});
    }
    doc["stacks"].push_back({{"installed_at", s.installed_at}, {"entries", entries}});
  }
  doc["swap_associations"] = nlohmann::json::array();
  for (const auto& [id, idx] : plan.swap_to_stack)
    doc["swap_associations"].push_back({{"swap", id}, {"stack", idx}});
  return doc.dump(2);
}

LabelStackPlan plan_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed plan document: ") + e.what());
  }
  LabelStackPlan plan;
  try {
    for (const auto& s : doc.at("stacks")) {
      LabelStack stack;
      stack.installed_at = s.at("installed_at").get<int>();
      for (const auto& entry : s.at("entries")) {
        Label l;
        if (entry.contains("link")) {
          l.kind = Label::Kind::Link;
          l.from = entry.at("link").at(0).get<int>();
          l.to = entry.at("link").at(1).get<int>();
        } else {
          l.kind = Label::Kind::Swap;
          l.swap_id = entry.at("swap").get<int>();
        }
        stack.entries.push_back(l);
      }
      plan.stacks.push_back(std::move(stack));
    }
    for (const auto& assoc : doc.at("swap_associations"))
      plan.swap_to_stack.emplace_back(assoc.at("swap").get<int>(), assoc.at("stack").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed plan document: ") + e.what());
  }
  return plan;
}

}  // namespace srlab
