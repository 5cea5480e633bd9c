#include "srlab/sac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srlab/errors.hpp"
#include "srlab/rng.hpp"

namespace srlab {

namespace {

using json = nlohmann::json;

struct Layout {
  // offsets into the flat parameter vector
  std::size_t w1, b1, w2, b2, w3, b3, total;
};

Layout layout_of(int in, int hidden, int out) {
  Layout l{};
  l.w1 = 0;
  l.b1 = l.w1 + static_cast<std::size_t>(hidden) * in;
  l.w2 = l.b1 + hidden;
  l.b2 = l.w2 + static_cast<std::size_t>(hidden) * hidden;
  l.w3 = l.b2 + hidden;
  l.b3 = l.w3 + static_cast<std::size_t>(out) * hidden;
  l.total = l.b3 + out;
  return l;
}

std::vector<double> softmax(std::vector<double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    total += z;
  }
  for (double& z : logits) z /= total;
  return logits;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

// Plain SGD or Adam over one parameter vector.
class Optimizer {
 public:
  Optimizer(std::string kind, double lr, std::size_t size)
      : adam_(kind == "adam"), lr_(lr) {
    if (adam_) {
      m_.assign(size, 0.0);
      v_.assign(size, 0.0);
    }
  }

  void step(std::vector<double>& params, std::span<const double> grad) {
    if (!adam_) {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
      return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  bool adam_;
  double lr_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace

Mlp::Mlp(int input, int hidden, int output, std::uint64_t seed)
    : in_(input), hidden_(hidden), out_(output) {
  if (input < 1 || hidden < 1 || output < 1)
    throw ValidationError("approximator sizes must be positive");
  const Layout l = layout_of(in_, hidden_, out_);
  params_.assign(l.total, 0.0);
  Rng rng(seed);
  auto init = [&rng, this](std::size_t offset, std::size_t count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = rng.uniform(-bound, bound);
  };
  init(l.w1, static_cast<std::size_t>(hidden_) * in_, in_);
  init(l.w2, static_cast<std::size_t>(hidden_) * hidden_, hidden_);
  init(l.w3, static_cast<std::size_t>(out_) * hidden_, hidden_);
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Cache cache;
  return forward_cached(x, cache);
}

std::vector<double> Mlp::forward_cached(std::span<const double> x, Cache& cache) const {
  if (static_cast<int>(x.size()) != in_) throw ValidationError("state shape mismatch");
  const Layout l = layout_of(in_, hidden_, out_);
  const double* p = params_.data();

  cache.x.assign(x.begin(), x.end());
  cache.a1.resize(hidden_);
  for (int h = 0; h < hidden_; ++h) {
    double z = p[l.b1 + h];
    const double* row = p + l.w1 + static_cast<std::size_t>(h) * in_;
    for (int i = 0; i < in_; ++i) z += row[i] * x[i];
    cache.a1[h] = std::tanh(z);
  }
  cache.a2.resize(hidden_);
  for (int h = 0; h < hidden_; ++h) {
    double z = p[l.b2 + h];
    const double* row = p + l.w2 + static_cast<std::size_t>(h) * hidden_;
    for (int i = 0; i < hidden_; ++i) z += row[i] * cache.a1[i];
    cache.a2[h] = std::tanh(z);
  }
  std::vector<double> y(out_);
  for (int o = 0; o < out_; ++o) {
    double z = p[l.b3 + o];
    const double* row = p + l.w3 + static_cast<std::size_t>(o) * hidden_;
    for (int i = 0; i < hidden_; ++i) z += row[i] * cache.a2[i];
    y[o] = z;
  }
  return y;
}

void Mlp::backward(const Cache& cache, std::span<const double> dy,
                   std::span<double> grad) const {
  if (static_cast<int>(dy.size()) != out_ || grad.size() != params_.size())
    throw ValidationError("gradient shape mismatch");
  const Layout l = layout_of(in_, hidden_, out_);
  const double* p = params_.data();

  std::vector<double> da2(hidden_, 0.0);
  for (int o = 0; o < out_; ++o) {
    const double g = dy[o];
    if (g == 0.0) continue;
    double* wrow = grad.data() + l.w3 + static_cast<std::size_t>(o) * hidden_;
    const double* row = p + l.w3 + static_cast<std::size_t>(o) * hidden_;
    for (int h = 0; h < hidden_; ++h) {
      wrow[h] += g * cache.a2[h];
      da2[h] += g * row[h];
    }
    grad[l.b3 + o] += g;
  }

  std::vector<double> da1(hidden_, 0.0);
  for (int h = 0; h < hidden_; ++h) {
    const double dz = da2[h] * (1.0 - cache.a2[h] * cache.a2[h]);
    if (dz == 0.0) continue;
    double* wrow = grad.data() + l.w2 + static_cast<std::size_t>(h) * hidden_;
    const double* row = p + l.w2 + static_cast<std::size_t>(h) * hidden_;
    for (int i = 0; i < hidden_; ++i) {
      wrow[i] += dz * cache.a1[i];
      da1[i] += dz * row[i];
    }
    grad[l.b2 + h] += dz;
  }

  for (int h = 0; h < hidden_; ++h) {
    const double dz = da1[h] * (1.0 - cache.a1[h] * cache.a1[h]);
    if (dz == 0.0) continue;
    double* wrow = grad.data() + l.w1 + static_cast<std::size_t>(h) * in_;
    for (int i = 0; i < in_; ++i) wrow[i] += dz * cache.x[i];
    grad[l.b1 + h] += dz;
  }
}

std::vector<double> policy_distribution(const Mlp& policy, std::span<const double> state) {
  return softmax(policy.forward(state));
}

double soft_state_value(std::span<const double> probs, std::span<const double> q1,
                        std::span<const double> q2, double alpha) {
  double value = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    const double qmin = std::min(q1[a], q2[a]);
    value += probs[a] * (qmin - alpha * std::log(probs[a]));
  }
  return value;
}

double q_target(double reward, bool done, std::span<const double> next_state,
                const Mlp& target_q1, const Mlp& target_q2, const Mlp& policy, double alpha,
                double gamma) {
  if (done || gamma == 0.0) return reward;
  const std::vector<double> probs = policy_distribution(policy, next_state);
  const std::vector<double> q1 = target_q1.forward(next_state);
  const std::vector<double> q2 = target_q2.forward(next_state);
  return reward + gamma * soft_state_value(probs, q1, q2, alpha);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ValidationError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch > data_.size())
    throw ValidationError("cannot sample a batch larger than the buffer");
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i)
    out.push_back(&data_[rng.uniform_int(data_.size())]);
  return out;
}

QLossResult q_loss(std::span<const Transition* const> batch, const Mlp& q1, const Mlp& q2,
                   const Mlp& target_q1, const Mlp& target_q2, const Mlp& policy, double alpha,
                   double gamma) {
  if (batch.empty()) throw ValidationError("empty batch");
  QLossResult result;
  result.grad1.assign(q1.params().size(), 0.0);
  result.grad2.assign(q2.params().size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());

  Mlp::Cache cache1, cache2;
  std::vector<double> dy(q1.output_size(), 0.0);
  for (const Transition* tr : batch) {
    const double y =
        q_target(tr->reward, tr->done, tr->next_state, target_q1, target_q2, policy, alpha, gamma);
    const std::vector<double> out1 = q1.forward_cached(tr->state, cache1);
    const std::vector<double> out2 = q2.forward_cached(tr->state, cache2);

    const double err1 = out1[tr->action] - y;
    const double err2 = out2[tr->action] - y;
    result.loss1 += 0.5 * err1 * err1 * scale;
    result.loss2 += 0.5 * err2 * err2 * scale;

    std::fill(dy.begin(), dy.end(), 0.0);
    dy[tr->action] = err1 * scale;
    q1.backward(cache1, dy, result.grad1);
    dy[tr->action] = err2 * scale;
    q2.backward(cache2, dy, result.grad2);
  }
  return result;
}

PolicyLossResult policy_loss(std::span<const Transition* const> batch, const Mlp& policy,
                             const Mlp& q1, const Mlp& q2, double alpha) {
  if (batch.empty()) throw ValidationError("empty batch");
  PolicyLossResult result;
  result.grad.assign(policy.params().size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());

  Mlp::Cache cache;
  const int actions = policy.output_size();
  std::vector<double> dz(actions);
  for (const Transition* tr : batch) {
    const std::vector<double> probs = softmax(policy.forward_cached(tr->state, cache));
    const std::vector<double> out1 = q1.forward(tr->state);
    const std::vector<double> out2 = q2.forward(tr->state);

    double per_state = 0.0;
    for (int a = 0; a < actions; ++a)
      per_state += probs[a] * (alpha * std::log(probs[a]) - std::min(out1[a], out2[a]));
    result.loss += per_state * scale;
    result.mean_entropy += entropy(probs) * scale;

    // d/dz_k of sum_a p_a (alpha log p_a - qmin_a) = p_k (g_k - L) with
    // g_k = alpha log p_k - qmin_k; the alpha log-prob term contributes
    // nothing extra because sum_a p_a (delta_ak - p_k) = 0
    for (int a = 0; a < actions; ++a) {
      const double g = alpha * std::log(probs[a]) - std::min(out1[a], out2[a]);
      dz[a] = probs[a] * (g - per_state) * scale;
    }
    policy.backward(cache, dz, result.grad);
  }
  return result;
}

TemperatureLossResult temperature_loss(std::span<const Transition* const> batch,
                                       const Mlp& policy, double alpha, double target_entropy) {
  if (batch.empty()) throw ValidationError("empty batch");
  double mean_h = 0.0;
  for (const Transition* tr : batch)
    mean_h += entropy(policy_distribution(policy, tr->state));
  mean_h /= static_cast<double>(batch.size());
  TemperatureLossResult result;
  result.loss = alpha * (mean_h - target_entropy);
  result.grad_log_alpha = alpha * (mean_h - target_entropy);
  return result;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.params().size() != online.params().size())
    throw ValidationError("parameter shape mismatch");
  if (!(tau > 0.0) || tau > 1.0) throw ValidationError("soft update rate must lie in (0,1]");
  auto& t = target.params();
  const auto& o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

int greedy_action(const Mlp& policy, std::span<const double> state) {
  const std::vector<double> logits = policy.forward(state);
  int best = 0;
  for (int a = 1; a < static_cast<int>(logits.size()); ++a)
    if (logits[a] > logits[best]) best = a;
  return best;
}

TrainResult train(const Topology& topology, const EnvConfig& env_cfg,
                  const std::vector<NormalizedSnapshot>& stash, const SacConfig& cfg,
                  const StopCallback& stop) {
  if (stash.empty()) throw ValidationError("training needs at least one snapshot");
  if (cfg.batch_size < 1) throw ValidationError("batch size must be positive");
  if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) throw ValidationError("discount must lie in [0,1)");

  std::vector<Env> envs;
  envs.reserve(stash.size());
  for (const NormalizedSnapshot& snap : stash) envs.emplace_back(topology, env_cfg, snap);

  const int obs_size = envs.front().observation_size();
  const int action_count = envs.front().action_count();
  const double target_entropy =
      cfg.target_entropy < 0.0 ? 0.6 * std::log(static_cast<double>(action_count))
                               : cfg.target_entropy;

  Rng master(cfg.seed);
  TrainResult result;
  result.policy = Mlp(obs_size, cfg.hidden, action_count, master.next_u64());
  result.q1 = Mlp(obs_size, cfg.hidden, action_count, master.next_u64());
  result.q2 = Mlp(obs_size, cfg.hidden, action_count, master.next_u64());
  Mlp target_q1 = result.q1;
  Mlp target_q2 = result.q2;
  result.alpha = cfg.initial_alpha;
  double log_alpha = std::log(cfg.initial_alpha);

  Rng action_rng = master.fork();
  Rng sample_rng = master.fork();
  ReplayBuffer buffer(cfg.buffer_capacity);
  Optimizer opt_q1(cfg.optimizer, cfg.critic_lr, result.q1.params().size());
  Optimizer opt_q2(cfg.optimizer, cfg.critic_lr, result.q2.params().size());
  Optimizer opt_pi(cfg.optimizer, cfg.actor_lr, result.policy.params().size());

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    Env& env = envs[episode % envs.size()];
    env.reset();
    std::vector<double> state = env.observation();
    double episode_return = 0.0;
    double q_loss_total = 0.0, pi_loss_total = 0.0;
    int updates = 0;

    while (!env.done()) {
      const std::vector<double> probs = policy_distribution(result.policy, state);
      const int action = static_cast<int>(action_rng.categorical(probs));
      const StepResult sr = env.step(action);
      std::vector<double> next_state = env.observation();
      buffer.push(Transition{state, next_state, action, sr.reward, sr.done});
      episode_return += sr.reward;
      state = std::move(next_state);

      if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        for (int k = 0; k < cfg.updates_per_step; ++k) {
          const auto batch = buffer.sample(cfg.batch_size, sample_rng);
          const QLossResult ql = q_loss(batch, result.q1, result.q2, target_q1, target_q2,
                                        result.policy, result.alpha, cfg.gamma);
          opt_q1.step(result.q1.params(), ql.grad1);
          opt_q2.step(result.q2.params(), ql.grad2);

          const PolicyLossResult pl =
              policy_loss(batch, result.policy, result.q1, result.q2, result.alpha);
          opt_pi.step(result.policy.params(), pl.grad);

          log_alpha -= cfg.alpha_lr * result.alpha * (pl.mean_entropy - target_entropy);
          result.alpha = std::exp(log_alpha);

          soft_update(target_q1, result.q1, cfg.tau);
          soft_update(target_q2, result.q2, cfg.tau);

          q_loss_total += (ql.loss1 + ql.loss2) / 2.0;
          pi_loss_total += pl.loss;
          ++updates;
        }
      }
    }

    EpisodeLog entry;
    entry.episode = episode + 1;
    entry.episode_return = episode_return;
    entry.steps = env.steps_taken();
    entry.alpha = result.alpha;
    entry.mean_q_loss = updates > 0 ? q_loss_total / updates : 0.0;
    entry.mean_pi_loss = updates > 0 ? pi_loss_total / updates : 0.0;
    result.log.push_back(entry);

    if (stop && stop(episode + 1, result.policy)) break;
  }
  return result;
}

double greedy_rollout(Env& env, const Mlp& policy) {
  env.reset();
  double total = 0.0;
  while (!env.done()) {
    const int action = greedy_action(policy, env.observation());
    total += env.step(action).reward;
  }
  return total;
}

namespace {

json mlp_to_json(const Mlp& m) {
  return json{{"input", m.input_size()},
              {"hidden", m.hidden_size()},
              {"output", m.output_size()},
              {"params", m.params()}};
}

Mlp mlp_from_json(const json& j) {
  Mlp m(j.at("input").get<int>(), j.at("hidden").get<int>(), j.at("output").get<int>(), 0);
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != m.params().size())
    throw ValidationError("checkpoint parameter count mismatch");
  m.params() = params;
  return m;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  json doc;
  doc["format"] = "srlab-checkpoint-v1";
  doc["env"] = {{"src", c.env.src},
                {"dst", c.env.dst},
                {"M", c.env.max_depth},
                {"betas", c.env.beta},
                {"horizon", c.env.horizon},
                {"invalid_penalty", c.env.invalid_penalty},
                {"terminal_bonus", c.env.terminal_bonus}};
  doc["sac"] = {{"gamma", c.sac.gamma},
                {"tau", c.sac.tau},
                {"actor_lr", c.sac.actor_lr},
                {"critic_lr", c.sac.critic_lr},
                {"alpha_lr", c.sac.alpha_lr},
                {"batch_size", c.sac.batch_size},
                {"target_entropy", c.sac.target_entropy},
                {"buffer_capacity", c.sac.buffer_capacity},
                {"episodes", c.sac.episodes},
                {"seed", c.sac.seed},
                {"hidden", c.sac.hidden},
                {"updates_per_step", c.sac.updates_per_step},
                {"initial_alpha", c.sac.initial_alpha},
                {"optimizer", c.sac.optimizer}};
  doc["alpha"] = c.alpha;
  doc["policy"] = mlp_to_json(c.policy);
  doc["q1"] = mlp_to_json(c.q1);
  doc["q2"] = mlp_to_json(c.q2);
  return doc.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
  if (doc.value("format", "") != "srlab-checkpoint-v1")
    throw ValidationError("unrecognized checkpoint format");
  Checkpoint c;
  const json& e = doc.at("env");
  c.env.src = e.at("src").get<int>();
  c.env.dst = e.at("dst").get<int>();
  c.env.max_depth = e.at("M").get<int>();
  c.env.beta = e.at("betas").get<std::array<double, 4>>();
  c.env.horizon = e.at("horizon").get<int>();
  c.env.invalid_penalty = e.at("invalid_penalty").get<double>();
  c.env.terminal_bonus = e.at("terminal_bonus").get<double>();
  const json& s = doc.at("sac");
  c.sac.gamma = s.at("gamma").get<double>();
  c.sac.tau = s.at("tau").get<double>();
  c.sac.actor_lr = s.at("actor_lr").get<double>();
  c.sac.critic_lr = s.at("critic_lr").get<double>();
  c.sac.alpha_lr = s.at("alpha_lr").get<double>();
  c.sac.batch_size = s.at("batch_size").get<int>();
  c.sac.target_entropy = s.at("target_entropy").get<double>();
  c.sac.buffer_capacity = s.at("buffer_capacity").get<std::size_t>();
  c.sac.episodes = s.at("episodes").get<int>();
  c.sac.seed = s.at("seed").get<std::uint64_t>();
  c.sac.hidden = s.at("hidden").get<int>();
  c.sac.updates_per_step = s.at("updates_per_step").get<int>();
  c.sac.initial_alpha = s.at("initial_alpha").get<double>();
  c.sac.optimizer = s.at("optimizer").get<std::string>();
  c.alpha = doc.at("alpha").get<double>();
  c.policy = mlp_from_json(doc.at("policy"));
  c.q1 = mlp_from_json(doc.at("q1"));
  c.q2 = mlp_from_json(doc.at("q2"));
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint: " + path);
  out << checkpoint_to_json(c);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

std::string training_log_csv(const std::vector<EpisodeLog>& log) {
  std::string out = "episode,return,steps,alpha,mean_q_loss,mean_pi_loss\n";
  char buf[160];
  for (const EpisodeLog& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g,%.17g,%.17g\n", e.episode,
                  e.episode_return, e.steps, e.alpha, e.mean_q_loss, e.mean_pi_loss);
    out += buf;
  }
  return out;
}

}  // namespace srlab
