#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mepsac/environment.hpp"
#include "mepsac/nets.hpp"

namespace mepsac {

struct Transition {
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
  bool terminal = false;
};

// FIFO experience store: once full, the oldest transition is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity = 10000) : capacity_(capacity) {}

  void push(Transition t) {
    if (storage_.size() == capacity_) storage_.pop_front();
    storage_.push_back(std::move(t));
  }
  size_t size() const { return storage_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return storage_[i]; }

 private:
  size_t capacity_;
  std::deque<Transition> storage_;
};

// Column-major minibatch: one column per transition.
struct Batch {
  Mat states, actions, next_states;  // (d, B)
  Vec rewards, done;                 // (B)
  int size() const { return static_cast<int>(rewards.size()); }
};
Batch sample_batch(const ReplayBuffer& buffer, int batch_size,
                   std::mt19937_64& rng);

struct AgentConfig {
  double gamma = 0.99;  // 1 - 10^-2
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  double alpha_init = 0.5;
  double alpha_lr = 1e-4;
  std::optional<double> alpha_fixed;  // set -> fixed alpha, unset -> tunable
  int batch_size = 128;
  double noise_std = 0.4;   // exploration and target-smoothing noise sigma
  double noise_clip = 1.0;  // epsilon_lim
  int policy_delay = 8;     // actor/target update once per this many critic updates
  int agent_update_interval = 1;
  double grad_clip = 1.0;
  int epochs = 1000;  // training episodes
  bool target_smoothing = true;
  std::vector<int> hidden_dims{256, 256};
  int eval_interval = 10;  // evaluation episode cadence (in training episodes)

  void validate() const;
};

// Per-update and per-episode traces of a training run.
struct EpisodeRecord {
  int episode = 0;
  int steps = 0;
  double episode_return = 0.0;
  double alpha = 0.0;
  int updates = 0;        // critic updates during this episode
  int actor_updates = 0;  // delayed actor/target updates during this episode
  double critic1_loss = 0.0, critic2_loss = 0.0;  // means over the episode
  double actor_loss = 0.0, alpha_loss = 0.0;      // means over actor updates
};
struct EvalRecord {
  int episode = 0;  // training episode after which the evaluation ran
  int index = 0;
  int steps = 0;
  double eval_return = 0.0;
  double final_goal_dist = 0.0;
};
struct TrainMetrics {
  std::vector<EpisodeRecord> episodes;
  std::vector<EvalRecord> evals;
  std::vector<double> critic1_losses, critic2_losses;  // per critic update
  std::vector<double> actor_losses, alpha_losses;      // per actor update
  std::vector<double> alpha_trace;                     // per critic update
  long critic_updates = 0;
  long actor_updates = 0;
  long env_steps = 0;
};

enum class ActionMode { kStochastic, kDeterministic };

struct ActionSample {
  Vec action;
  double log_prob = 0.0;
};

// Squashed-Gaussian policy sample. Stochastic mode draws tanh(mu + sigma*xi)
// with the change-of-variables log-density; deterministic returns tanh(mu).
ActionSample sample_action(const GaussianActor& actor, const Vec& state,
                           ActionMode mode, std::mt19937_64& rng);

// Log-density of the policy at an arbitrary action in (-1, 1)^d.
double action_log_prob(const GaussianActor& actor, const Vec& state,
                       const Vec& action);

// Adds clip(N(0, sigma), +-eps_lim) per component, then clips to [-1, 1]^d.
Vec perturb_action(const Vec& action, double sigma, double eps_lim,
                   std::mt19937_64& rng);

// y = r + gamma (1 - done) (min_i Q_target_i(s', a') - alpha log pi(a'|s')),
// with a' drawn from the current policy at s' and, when smoothing is on,
// perturbed by clipped noise before the log-density is taken.
Vec compute_targets(const Batch& batch, const MlpParams& target1,
                    const MlpParams& target2, const GaussianActor& actor,
                    double alpha, double gamma, bool target_smoothing,
                    double noise_std, double noise_clip, std::mt19937_64& rng);

struct CriticLosses {
  double critic1 = 0.0, critic2 = 0.0;
};
CriticLosses update_critics(const Batch& batch, const Vec& targets,
                            MlpParams& critic1, MlpParams& critic2,
                            AdamState& adam1, AdamState& adam2, double lr,
                            double grad_clip);

struct ActorAdam {
  AdamState mlp;
  AdamVecState log_std;
};
ActorAdam make_actor_adam(const GaussianActor& actor);

// Gradients of the mean actor objective alpha*log pi - min_i Q_i under
// fixed reparameterization noise xi (one column per batch sample).
// Exposed for the finite-difference oracle.
struct ActorLossGrads {
  double loss = 0.0;
  MlpGrads mlp;
  Vec log_std;
  Vec log_probs;  // per-sample log pi(a|s) of the drawn actions
};
ActorLossGrads actor_loss_and_grads(const Batch& batch,
                                    const GaussianActor& actor,
                                    const MlpParams& critic1,
                                    const MlpParams& critic2, double alpha,
                                    const Mat& xi);

double update_actor(const Batch& batch, GaussianActor& actor, ActorAdam& adam,
                    const MlpParams& critic1, const MlpParams& critic2,
                    double alpha, double lr, double grad_clip,
                    std::mt19937_64& rng);

// Entropy coefficient state; alpha is stored as exp(log_alpha).
struct AlphaState {
  double log_alpha = 0.0;
  bool tunable = true;
  AdamVecState adam = make_adam_vec_state(1);
  double alpha() const { return std::exp(log_alpha); }
};
AlphaState make_alpha_state(const AgentConfig& config);

// One Adam step on mean(-alpha (log pi + target_entropy)); no-op in fixed
// mode. Returns the loss at the sampled actions.
double update_alpha(const Batch& batch, const GaussianActor& actor,
                    AlphaState& alpha_state, double target_entropy, double lr,
                    std::mt19937_64& rng);
// Inner step on a precomputed mean log-probability.
double alpha_step_from_logpi(double mean_log_pi, AlphaState& alpha_state,
                             double target_entropy, double lr);

struct SacState {
  GaussianActor actor;
  MlpParams critic1, critic2;
  MlpParams target1, target2;
  AdamState critic1_adam, critic2_adam;
  ActorAdam actor_adam;
  AlphaState alpha;
  AgentConfig config;
};
SacState make_sac_state(const AgentConfig& config, int state_dim,
                        int action_dim, std::mt19937_64& init_rng);

struct TrainResult {
  SacState sac;
  TrainMetrics metrics;
};
// Algorithm: per-step transitions into the FIFO buffer; critic updates once
// the buffer holds a batch; actor, alpha and Polyak target updates every
// policy_delay critic updates; a deterministic evaluation episode every
// eval_interval training episodes. Fully deterministic given the seed; the
// optional callback only observes finished episodes.
using EpisodeCallback = std::function<void(const EpisodeRecord&)>;
TrainResult train(Environment& env, const AgentConfig& config, uint64_t seed,
                  const EpisodeCallback& on_episode = {});

struct Trajectory {
  std::vector<Vec> states;      // includes the reset state
  std::vector<double> energies; // potential at every state
  std::vector<Vec> actions;
  double total_return = 0.0;
  bool terminal = false;
  double final_goal_dist = 0.0;
};

using Policy = std::function<Vec(const Vec&)>;
Policy deterministic_policy(const GaussianActor& actor);

// Runs n deterministic-mode episodes from freshly perturbed resets.
std::vector<Trajectory> evaluate(const Policy& policy, Environment& env,
                                 int n_episodes, uint64_t seed);

struct BarrierEstimate {
  int n_total = 0;
  int n_success = 0;  // trajectories ending within success_radius of goal
  std::optional<double> mean, stddev;      // over successful trajectories
  double mean_all = 0.0, stddev_all = 0.0; // over all trajectories
  std::vector<double> maxima;              // per-trajectory barrier
  std::vector<bool> success;
};
BarrierEstimate barrier_estimate(const std::vector<Trajectory>& trajectories,
                                 const Vec& goal, double success_radius);

}  // namespace mepsac
