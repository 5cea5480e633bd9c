#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srlab/env.hpp"
#include "srlab/linkstate.hpp"
#include "srlab/topology.hpp"

namespace srlab {

/// Two-hidden-layer tanh perceptron over a flat parameter vector, with
/// hand-written backpropagation so gradients stay finite-difference exact.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input, int hidden, int output, std::uint64_t seed);

  int input_size() const { return in_; }
  int hidden_size() const { return hidden_; }
  int output_size() const { return out_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const;

  struct Cache {
    std::vector<double> x, a1, a2;
  };
  std::vector<double> forward_cached(std::span<const double> x, Cache& cache) const;

  /// Accumulate dLoss/dparams into grad given dLoss/doutput.
  void backward(const Cache& cache, std::span<const double> dy, std::span<double> grad) const;

 private:
  int in_ = 0, hidden_ = 0, out_ = 0;
  std::vector<double> params_;
};

/// Softmax policy over the approximator's logits.
std::vector<double> policy_distribution(const Mlp& policy, std::span<const double> state);

/// Expected soft value sum_a p(a) * (min(q1,q2)(a) - alpha * log p(a)).
double soft_state_value(std::span<const double> probs, std::span<const double> q1,
                        std::span<const double> q2, double alpha);

/// Bootstrap target r + gamma * (1-done) * soft value of the next state,
/// taking the exact expectation over the categorical policy.
double q_target(double reward, bool done, std::span<const double> next_state,
                const Mlp& target_q1, const Mlp& target_q2, const Mlp& policy, double alpha,
                double gamma);

struct Transition {
  std::vector<double> state, next_state;
  int action = 0;
  double reward = 0.0;
  bool done = false;
};

class Rng;

/// Fixed-capacity ring buffer with seed-deterministic uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

struct QLossResult {
  double loss1 = 0.0, loss2 = 0.0;
  std::vector<double> grad1, grad2;
};

/// Mean over the batch of 0.5 * (Q_j(s,a) - y)^2 for each critic, with
/// targets treated as constants.
QLossResult q_loss(std::span<const Transition* const> batch, const Mlp& q1, const Mlp& q2,
                   const Mlp& target_q1, const Mlp& target_q2, const Mlp& policy, double alpha,
                   double gamma);

struct PolicyLossResult {
  double loss = 0.0;
  std::vector<double> grad;
  double mean_entropy = 0.0;
};

/// Mean over the batch of sum_a p(a|s) * (alpha log p(a|s) - min_j Q_j(s,a)),
/// with the critics treated as constants.
PolicyLossResult policy_loss(std::span<const Transition* const> batch, const Mlp& policy,
                             const Mlp& q1, const Mlp& q2, double alpha);

struct TemperatureLossResult {
  double loss = 0.0;
  double grad_log_alpha = 0.0;
};

/// alpha * (mean policy entropy - target entropy); the gradient is taken
/// with respect to log alpha so descent keeps alpha positive.
TemperatureLossResult temperature_loss(std::span<const Transition* const> batch,
                                       const Mlp& policy, double alpha, double target_entropy);

/// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

/// Argmax action under the policy; ties go to the lowest id.
int greedy_action(const Mlp& policy, std::span<const double> state);

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double alpha_lr = 1e-3;
  int batch_size = 64;
  double target_entropy = -1.0;  // negative = 0.6 * ln(action count)
  std::size_t buffer_capacity = 100000;
  int episodes = 500;
  std::uint64_t seed = 1;
  int hidden = 256;
  int updates_per_step = 1;
  double initial_alpha = 0.2;
  std::string optimizer = "sgd";  // "sgd" or "adam"
};

struct EpisodeLog {
  int episode = 0;
  double episode_return = 0.0;
  int steps = 0;
  double alpha = 0.0;
  double mean_q_loss = 0.0;
  double mean_pi_loss = 0.0;
};

struct TrainResult {
  Mlp policy, q1, q2;
  double alpha = 0.0;
  std::vector<EpisodeLog> log;
};

/// Stop callback: called after each episode with (episode index, policy);
/// returning true ends training early.
using StopCallback = std::function<bool(int, const Mlp&)>;

/// Off-policy training over the snapshot stash: episode e runs on snapshot
/// e mod stash size, one batch of critic/actor/temperature updates per
/// environment step once the buffer can fill a batch, then a soft target
/// update.
TrainResult train(const Topology& topology, const EnvConfig& env_cfg,
                  const std::vector<NormalizedSnapshot>& stash, const SacConfig& cfg,
                  const StopCallback& stop = nullptr);

/// Greedy rollout of a policy on one environment; returns the undiscounted
/// return. The env is left in its terminal state.
double greedy_rollout(Env& env, const Mlp& policy);

struct Checkpoint {
  EnvConfig env;
  SacConfig sac;
  Mlp policy, q1, q2;
  double alpha = 0.0;
};

std::string checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string training_log_csv(const std::vector<EpisodeLog>& log);

}  // namespace srlab
