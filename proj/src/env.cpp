#include "srlab/env.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "srlab/errors.hpp"

namespace srlab {

Env::Env(Topology topology, EnvConfig cfg, NormalizedSnapshot snap)
    : topology_(std::move(topology)), cfg_(cfg), snap_(std::move(snap)) {
  if (!topology_.has_node(cfg_.src) || !topology_.has_node(cfg_.dst))
    throw ValidationError("source or destination is not in the topology");
  if (cfg_.src == cfg_.dst) throw ValidationError("source and destination must differ");
  if (cfg_.max_depth < 2) throw ValidationError("depth limit must be at least 2");
  if (cfg_.max_depth > topology_.node_count() - 1)
    throw ValidationError("depth limit exceeds the stack channel range");
  for (double b : cfg_.beta)
    if (b < 0.0 || b > 1.0) throw ValidationError("reward weights must lie in [0,1]");
  if (cfg_.horizon == 0) cfg_.horizon = 4 * topology_.node_count();
  if (cfg_.horizon < 1) throw ValidationError("horizon must be at least 1");
  if (static_cast<int>(snap_.controller_delay_ms.size()) != topology_.node_count())
    throw ValidationError("snapshot does not match topology");
  metric_ = metric_channels(snap_, topology_);
  reset();
}

void Env::reset() {
  path_ = {cfg_.src};
  heads_ = {0};
  sn_ = 1;
  steps_ = 0;
  done_ = false;
}

DecodedAction Env::decode_action(int action) const {
  if (action < 0 || action >= action_count())
    throw ValidationError("action id outside [0, 2*max_degree)");
  const int degree_slots = topology_.max_degree();
  const int slot = action % degree_slots;
  const bool swap = action >= degree_slots;
  const int current = path_.back();
  const auto& nbrs = topology_.neighbors(current);
  if (slot >= static_cast<int>(nbrs.size())) return {false, -1, swap, "degree"};
  const int target = nbrs[slot];
  if (std::find(path_.begin(), path_.end(), target) != path_.end())
    return {false, target, swap, "revisit"};
  if (target == cfg_.dst) {
    // the final stack carries sn link labels after this hop
    if (sn_ > cfg_.max_depth) return {false, target, swap, "depth"};
    return {true, target, swap, ""};
  }
  if (swap) {
    // closing the open segment costs sn link labels plus the swap label
    if (sn_ + 1 > cfg_.max_depth) return {false, target, swap, "depth"};
    return {true, target, swap, ""};
  }
  // a plain hop must leave room to close the segment later
  if (sn_ + 1 > cfg_.max_depth - 1) return {false, target, swap, "depth"};
  return {true, target, swap, ""};
}

StepResult Env::step(int action) {
  if (done_) throw ValidationError("episode is already finished");
  const DecodedAction decoded = decode_action(action);
  ++steps_;
  if (!decoded.valid) {
    done_ = steps_ >= cfg_.horizon;
    return {cfg_.invalid_penalty, done_};
  }

  const int current = path_.back();
  const int target = decoded.target;
  const LinkMetrics& m = snap_.link(current, target);
  double reward = cfg_.beta[0] * (m.residual_bw_mbps - 1.0) + cfg_.beta[1] * (1.0 - m.delay_ms) +
                  cfg_.beta[2] * (1.0 - m.loss);

  path_.push_back(target);
  if (target == cfg_.dst) {
    sn_ += 1;
    reward += cfg_.terminal_bonus;
    done_ = true;
  } else if (decoded.swap) {
    heads_.push_back(static_cast<int>(path_.size()) - 1);
    sn_ = 1;
    reward += cfg_.beta[3] * (1.0 - snap_.controller_delay_ms[target]);
  } else {
    sn_ += 1;
  }
  if (!done_ && steps_ >= cfg_.horizon) done_ = true;
  return {reward, done_};
}

SegmentedPath Env::extract_path() const {
  if (!done_ || !reached_destination())
    throw ValidationError("episode did not finish at the destination");
  return {path_, heads_};
}

int Env::observation_size() const {
  const int n = topology_.node_count();
  return 6 * n * n;
}

std::vector<double> Env::observation() const {
  const int n = topology_.node_count();
  std::vector<double> obs;
  obs.reserve(observation_size());
  for (const Matrix* ch : {&metric_.bw, &metric_.delay, &metric_.loss, &metric_.cdelay})
    obs.insert(obs.end(), ch->data().begin(), ch->data().end());
  std::vector<double> stack(static_cast<std::size_t>(n) * n, 0.0);
  stack[static_cast<std::size_t>(sn_) * n + sn_] = 1.0;
  obs.insert(obs.end(), stack.begin(), stack.end());
  std::vector<double> location(static_cast<std::size_t>(n) * n, 0.0);
  const int vc = path_.back();
  location[static_cast<std::size_t>(vc) * n + vc] = 1.0;
  obs.insert(obs.end(), location.begin(), location.end());
  return obs;
}

std::string Env::state_digest() const {
  const std::vector<double> obs = observation();
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const unsigned char* bytes, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  mix(reinterpret_cast<const unsigned char*>(obs.data()), obs.size() * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string Env::trace_json_line(int step, int action, double reward, bool done) const {
  nlohmann::json line{{"step", step},
                      {"state_digest", state_digest()},
                      {"action", action},
                      {"reward", reward},
                      {"done", done}};
  return line.dump();
}

}  // namespace srlab
