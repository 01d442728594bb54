#include "mepsac/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mepsac/rng.hpp"

namespace mepsac {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kLog2 = 0.6931471805599453;
// Squashed actions are kept this far inside (-1, 1): tanh rounds to
// exactly +-1 in double precision once |u| > 19, and atanh needs the
// open interval.
constexpr double kSquashMargin = 1e-6;

Mat squash(const Mat& u) {
  return u.array().tanh().min(1.0 - kSquashMargin).max(-1.0 + kSquashMargin);
}

void fill_normal(Mat& m, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) {  // normal_distribution requires sigma > 0
    m.setZero();
    return;
  }
  std::normal_distribution<double> dist(0.0, sigma);
  for (Eigen::Index b = 0; b < m.cols(); ++b)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, b) = dist(rng);
}

Vec effective_sigma(const GaussianActor& actor) {
  return actor.log_std.array().min(kLogStdMax).max(kLogStdMin).exp();
}

// log(1 - tanh(u)^2), stable for large |u|.
Eigen::ArrayXXd log_one_minus_tanh_sq(const Mat& u) {
  const auto au = u.array().abs();
  return 2.0 * (kLog2 - au - (-2.0 * au).exp().log1p());
}

// Per-sample log pi given pre-squash values U and standardized residuals.
Vec squashed_log_prob(const Mat& u, const Eigen::ArrayXXd& standardized,
                      const Vec& sigma) {
  const double d = static_cast<double>(u.rows());
  const double const_term =
      -sigma.array().log().sum() - 0.5 * d * kLog2Pi;
  Vec logpi = (-0.5 * standardized.square()).colwise().sum();
  logpi.array() += const_term;
  logpi -= Vec(log_one_minus_tanh_sq(u).colwise().sum());
  return logpi;
}

Mat stack_state_action(const Mat& states, const Mat& actions) {
  Mat x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

}  // namespace

void AgentConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string("AgentConfig: ") + name +
                                  " must be > 0");
  };
  positive(tau, "tau");
  positive(actor_lr, "actor_lr");
  positive(critic_lr, "critic_lr");
  positive(alpha_init, "alpha_init");
  positive(alpha_lr, "alpha_lr");
  positive(grad_clip, "grad_clip");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("AgentConfig: gamma must lie in (0, 1)");
  if (batch_size < 1) throw std::invalid_argument("AgentConfig: batch_size must be >= 1");
  if (noise_std < 0.0) throw std::invalid_argument("AgentConfig: noise_std must be >= 0");
  if (noise_clip < 0.0) throw std::invalid_argument("AgentConfig: noise_clip must be >= 0");
  if (policy_delay < 1) throw std::invalid_argument("AgentConfig: policy_delay must be >= 1");
  if (agent_update_interval < 1)
    throw std::invalid_argument("AgentConfig: agent_update_interval must be >= 1");
  if (epochs < 0) throw std::invalid_argument("AgentConfig: epochs must be >= 0");
  if (alpha_fixed && !(*alpha_fixed > 0.0))
    throw std::invalid_argument("AgentConfig: fixed alpha must be > 0");
  for (int h : hidden_dims)
    if (h < 1) throw std::invalid_argument("AgentConfig: hidden dims must be >= 1");
}

Batch sample_batch(const ReplayBuffer& buffer, int batch_size,
                   std::mt19937_64& rng) {
  if (buffer.size() == 0) throw std::logic_error("sample_batch: empty buffer");
  const int d = static_cast<int>(buffer.at(0).state.size());
  Batch batch;
  batch.states.resize(d, batch_size);
  batch.actions.resize(d, batch_size);
  batch.next_states.resize(d, batch_size);
  batch.rewards.resize(batch_size);
  batch.done.resize(batch_size);
  std::uniform_int_distribution<size_t> pick(0, buffer.size() - 1);
  for (int b = 0; b < batch_size; ++b) {
    const Transition& t = buffer.at(pick(rng));
    batch.states.col(b) = t.state;
    batch.actions.col(b) = t.action;
    batch.next_states.col(b) = t.next_state;
    batch.rewards[b] = t.reward;
    batch.done[b] = t.terminal ? 1.0 : 0.0;
  }
  return batch;
}

ActionSample sample_action(const GaussianActor& actor, const Vec& state,
                           ActionMode mode, std::mt19937_64& rng) {
  const Vec mu = mlp_forward1(actor.mlp, state);
  const Vec sigma = effective_sigma(actor);
  Mat u(mu.size(), 1);
  Mat xi = Mat::Zero(mu.size(), 1);
  if (mode == ActionMode::kStochastic) {
    fill_normal(xi, 1.0, rng);
    u.col(0) = mu + sigma.cwiseProduct(Vec(xi.col(0)));
  } else {
    u.col(0) = mu;
  }
  ActionSample out;
  out.action = squash(u).col(0);
  out.log_prob = squashed_log_prob(u, xi.array(), sigma)[0];
  return out;
}

double action_log_prob(const GaussianActor& actor, const Vec& state,
                       const Vec& action) {
  const Vec mu = mlp_forward1(actor.mlp, state);
  const Vec sigma = effective_sigma(actor);
  Mat u(action.size(), 1);
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const double a =
        std::clamp(action[i], -1.0 + kSquashMargin, 1.0 - kSquashMargin);
    u(i, 0) = std::atanh(a);
  }
  const Eigen::ArrayXXd standardized =
      (u.col(0) - mu).cwiseQuotient(sigma).array();
  return squashed_log_prob(u, standardized, sigma)[0];
}

Vec perturb_action(const Vec& action, double sigma, double eps_lim,
                   std::mt19937_64& rng) {
  if (sigma < 0.0) throw std::invalid_argument("perturb_action: sigma must be >= 0");
  Vec out = action;
  if (sigma > 0.0) {
    std::normal_distribution<double> dist(0.0, sigma);
    for (Eigen::Index i = 0; i < out.size(); ++i)
      out[i] += std::clamp(dist(rng), -eps_lim, eps_lim);
  }
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = std::clamp(out[i], -1.0, 1.0);
  return out;
}

Vec compute_targets(const Batch& batch, const MlpParams& target1,
                    const MlpParams& target2, const GaussianActor& actor,
                    double alpha, double gamma, bool target_smoothing,
                    double noise_std, double noise_clip,
                    std::mt19937_64& rng) {
  const int B = batch.size();
  const Mat mu = mlp_forward(actor.mlp, batch.next_states);
  const Vec sigma = effective_sigma(actor);

  Mat xi(mu.rows(), B);
  fill_normal(xi, 1.0, rng);
  Mat u = mu + (xi.array().colwise() * sigma.array()).matrix();
  Mat a = squash(u);

  Vec logpi;
  if (target_smoothing) {
    Mat eps(mu.rows(), B);
    fill_normal(eps, noise_std, rng);
    a = (a + eps.cwiseMax(-noise_clip).cwiseMin(noise_clip))
            .cwiseMax(-1.0 + kSquashMargin)
            .cwiseMin(1.0 - kSquashMargin);
    u = a.array().atanh();
    const Eigen::ArrayXXd standardized =
        ((u - mu).array().colwise() / sigma.array());
    logpi = squashed_log_prob(u, standardized, sigma);
  } else {
    logpi = squashed_log_prob(u, xi.array(), sigma);
  }

  const Mat x = stack_state_action(batch.next_states, a);
  const Vec q1 = mlp_forward(target1, x).row(0);
  const Vec q2 = mlp_forward(target2, x).row(0);
  const Vec qmin = q1.cwiseMin(q2);

  Vec y(B);
  for (int b = 0; b < B; ++b)
    y[b] = batch.rewards[b] +
           gamma * (1.0 - batch.done[b]) * (qmin[b] - alpha * logpi[b]);
  return y;
}

namespace {

double critic_step(const Batch& batch, const Vec& targets, MlpParams& critic,
                   AdamState& adam, double lr, double grad_clip,
                   const Mat& input) {
  MlpCache cache;
  const Vec q = mlp_forward(critic, input, &cache).row(0);
  const Vec err = q - targets;
  const double loss = err.squaredNorm() / batch.size();
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "critic loss is non-finite (" << loss << ") at timestep "
        << adam.timestep;
    throw std::runtime_error(msg.str());
  }
  Mat upstream = (2.0 / batch.size()) * err.transpose();
  MlpGrads grads = mlp_gradients(critic, cache, upstream);
  clip_gradient_norm(grads, grad_clip);
  adam_step(critic, grads, adam, lr);
  return loss;
}

}  // namespace

CriticLosses update_critics(const Batch& batch, const Vec& targets,
                            MlpParams& critic1, MlpParams& critic2,
                            AdamState& adam1, AdamState& adam2, double lr,
                            double grad_clip) {
  if (batch.size() < 1) throw std::invalid_argument("update_critics: empty batch");
  const Mat input = stack_state_action(batch.states, batch.actions);
  CriticLosses losses;
  losses.critic1 = critic_step(batch, targets, critic1, adam1, lr, grad_clip, input);
  losses.critic2 = critic_step(batch, targets, critic2, adam2, lr, grad_clip, input);
  return losses;
}

ActorAdam make_actor_adam(const GaussianActor& actor) {
  return {make_adam_state(actor.mlp), make_adam_vec_state(actor.log_std.size())};
}

ActorLossGrads actor_loss_and_grads(const Batch& batch,
                                    const GaussianActor& actor,
                                    const MlpParams& critic1,
                                    const MlpParams& critic2, double alpha,
                                    const Mat& xi) {
  const int B = batch.size();
  const int d = static_cast<int>(batch.states.rows());
  MlpCache actor_cache;
  const Mat mu = mlp_forward(actor.mlp, batch.states, &actor_cache);
  const Vec sigma = effective_sigma(actor);
  const Mat u = mu + (xi.array().colwise() * sigma.array()).matrix();
  const Mat a = u.array().tanh();
  const Vec logpi = squashed_log_prob(u, xi.array(), sigma);

  MlpCache cache1, cache2;
  const Mat x = stack_state_action(batch.states, a);
  const Vec q1 = mlp_forward(critic1, x, &cache1).row(0);
  const Vec q2 = mlp_forward(critic2, x, &cache2).row(0);

  ActorLossGrads out;
  out.log_probs = logpi;
  double qmin_sum = 0.0;
  Mat up1 = Mat::Zero(1, B), up2 = Mat::Zero(1, B);
  for (int b = 0; b < B; ++b) {
    // Route the Q gradient through whichever critic attains the min.
    if (q1[b] <= q2[b]) {
      qmin_sum += q1[b];
      up1(0, b) = -1.0 / B;
    } else {
      qmin_sum += q2[b];
      up2(0, b) = -1.0 / B;
    }
  }
  out.loss = alpha * logpi.mean() - qmin_sum / B;

  // d(loss)/d(action), min-routed, including the -1/B factors.
  Mat grad_a = mlp_input_gradient(critic1, cache1, up1).bottomRows(d) +
               mlp_input_gradient(critic2, cache2, up2).bottomRows(d);
  // d(loss)/d(pre-squash u): entropy term contributes (alpha/B) * 2a.
  Mat grad_u = (alpha / B) * 2.0 * a.array() +
               grad_a.array() * (1.0 - a.array().square());

  out.mlp = mlp_gradients(actor.mlp, actor_cache, grad_u);
  out.log_std =
      Vec(sigma.array() * grad_u.cwiseProduct(xi).rowwise().sum().array()) -
      Vec::Constant(d, alpha);
  return out;
}

double update_actor(const Batch& batch, GaussianActor& actor, ActorAdam& adam,
                    const MlpParams& critic1, const MlpParams& critic2,
                    double alpha, double lr, double grad_clip,
                    std::mt19937_64& rng) {
  Mat xi(batch.states.rows(), batch.size());
  fill_normal(xi, 1.0, rng);
  ActorLossGrads g =
      actor_loss_and_grads(batch, actor, critic1, critic2, alpha, xi);
  if (!std::isfinite(g.loss)) {
    std::ostringstream msg;
    msg << "actor loss is non-finite (" << g.loss << ") at timestep "
        << adam.mlp.timestep;
    throw std::runtime_error(msg.str());
  }
  clip_gradient_norm(g.mlp, grad_clip, &g.log_std);
  adam_step(actor.mlp, g.mlp, adam.mlp, lr);
  adam_step_vec(actor.log_std, g.log_std, adam.log_std, lr);
  actor.log_std =
      actor.log_std.array().min(kLogStdMax).max(kLogStdMin).matrix();
  return g.loss;
}

AlphaState make_alpha_state(const AgentConfig& config) {
  AlphaState s;
  s.tunable = !config.alpha_fixed.has_value();
  s.log_alpha = std::log(config.alpha_fixed.value_or(config.alpha_init));
  return s;
}

double alpha_step_from_logpi(double mean_log_pi, AlphaState& alpha_state,
                             double target_entropy, double lr) {
  const double alpha = alpha_state.alpha();
  const double loss = -alpha * (mean_log_pi + target_entropy);
  if (!alpha_state.tunable) return loss;
  Vec param(1), grad(1);
  param[0] = alpha_state.log_alpha;
  grad[0] = -alpha * (mean_log_pi + target_entropy);
  adam_step_vec(param, grad, alpha_state.adam, lr);
  alpha_state.log_alpha = param[0];
  return loss;
}

double update_alpha(const Batch& batch, const GaussianActor& actor,
                    AlphaState& alpha_state, double target_entropy, double lr,
                    std::mt19937_64& rng) {
  const Mat mu = mlp_forward(actor.mlp, batch.states);
  const Vec sigma = effective_sigma(actor);
  Mat xi(mu.rows(), batch.size());
  fill_normal(xi, 1.0, rng);
  const Mat u = mu + (xi.array().colwise() * sigma.array()).matrix();
  const Vec logpi = squashed_log_prob(u, xi.array(), sigma);
  return alpha_step_from_logpi(logpi.mean(), alpha_state, target_entropy, lr);
}

SacState make_sac_state(const AgentConfig& config, int state_dim,
                        int action_dim, std::mt19937_64& init_rng) {
  SacState sac;
  sac.config = config;
  std::vector<int> actor_dims{state_dim};
  actor_dims.insert(actor_dims.end(), config.hidden_dims.begin(),
                    config.hidden_dims.end());
  actor_dims.push_back(action_dim);
  std::vector<int> critic_dims{state_dim + action_dim};
  critic_dims.insert(critic_dims.end(), config.hidden_dims.begin(),
                     config.hidden_dims.end());
  critic_dims.push_back(1);

  sac.actor = make_actor(actor_dims, init_rng);
  sac.critic1 = make_mlp(critic_dims, init_rng);
  sac.critic2 = make_mlp(critic_dims, init_rng);
  sac.target1 = sac.critic1;  // hard update
  sac.target2 = sac.critic2;
  sac.critic1_adam = make_adam_state(sac.critic1);
  sac.critic2_adam = make_adam_state(sac.critic2);
  sac.actor_adam = make_actor_adam(sac.actor);
  sac.alpha = make_alpha_state(config);
  return sac;
}

TrainResult train(Environment& env, const AgentConfig& config, uint64_t seed,
                  const EpisodeCallback& on_episode) {
  config.validate();
  std::mt19937_64 init_rng(derive_seed(seed, 0));
  std::mt19937_64 policy_rng(derive_seed(seed, 2));
  std::mt19937_64 explore_rng(derive_seed(seed, 3));
  std::mt19937_64 replay_rng(derive_seed(seed, 4));
  std::mt19937_64 update_rng(derive_seed(seed, 5));

  TrainResult result;
  result.sac = make_sac_state(config, env.dim(), env.dim(), init_rng);
  SacState& sac = result.sac;
  TrainMetrics& metrics = result.metrics;
  ReplayBuffer buffer;
  const double target_entropy = -static_cast<double>(env.dim());

  Environment eval_env = env;  // independent instance for evaluation episodes
  int eval_index = 0;

  for (int episode = 1; episode <= config.epochs; ++episode) {
    Vec state = (episode == 1) ? env.reset(derive_seed(seed, 1)) : env.reset();
    EpisodeRecord record;
    record.episode = episode;
    double c1_sum = 0.0, c2_sum = 0.0, actor_sum = 0.0, alpha_sum = 0.0;

    for (int t = 0; t < env.config().max_steps; ++t) {
      ActionSample sampled =
          sample_action(sac.actor, state, ActionMode::kStochastic, policy_rng);
      const Vec action = perturb_action(sampled.action, config.noise_std,
                                        config.noise_clip, explore_rng);
      StepOutcome out = env.step(action);
      buffer.push({state, action, out.reward, out.next_state, out.terminal});
      record.episode_return += out.reward;
      ++record.steps;
      ++metrics.env_steps;

      if (buffer.size() >= static_cast<size_t>(config.batch_size) &&
          metrics.env_steps % config.agent_update_interval == 0) {
        Batch batch = sample_batch(buffer, config.batch_size, replay_rng);
        const Vec y = compute_targets(
            batch, sac.target1, sac.target2, sac.actor, sac.alpha.alpha(),
            config.gamma, config.target_smoothing, config.noise_std,
            config.noise_clip, update_rng);
        CriticLosses cl =
            update_critics(batch, y, sac.critic1, sac.critic2,
                           sac.critic1_adam, sac.critic2_adam,
                           config.critic_lr, config.grad_clip);
        ++metrics.critic_updates;
        ++record.updates;
        c1_sum += cl.critic1;
        c2_sum += cl.critic2;
        metrics.critic1_losses.push_back(cl.critic1);
        metrics.critic2_losses.push_back(cl.critic2);

        if (metrics.critic_updates % config.policy_delay == 0) {
          const double actor_loss = update_actor(
              batch, sac.actor, sac.actor_adam, sac.critic1, sac.critic2,
              sac.alpha.alpha(), config.actor_lr, config.grad_clip, update_rng);
          const double alpha_loss =
              update_alpha(batch, sac.actor, sac.alpha, target_entropy,
                           config.alpha_lr, update_rng);
          polyak_update(sac.target1, sac.critic1, config.tau);
          polyak_update(sac.target2, sac.critic2, config.tau);
          ++metrics.actor_updates;
          ++record.actor_updates;
          actor_sum += actor_loss;
          alpha_sum += alpha_loss;
          metrics.actor_losses.push_back(actor_loss);
          metrics.alpha_losses.push_back(alpha_loss);
        }
        metrics.alpha_trace.push_back(sac.alpha.alpha());
      }

      state = out.next_state;
      if (out.terminal || out.truncated) break;
    }

    record.alpha = sac.alpha.alpha();
    if (record.updates > 0) {
      record.critic1_loss = c1_sum / record.updates;
      record.critic2_loss = c2_sum / record.updates;
    }
    if (record.actor_updates > 0) {
      record.actor_loss = actor_sum / record.actor_updates;
      record.alpha_loss = alpha_sum / record.actor_updates;
    }
    metrics.episodes.push_back(record);
    if (on_episode) on_episode(record);

    if (config.eval_interval > 0 && episode % config.eval_interval == 0) {
      eval_env.reset(derive_seed(seed, 1000 + eval_index));
      EvalRecord ev;
      ev.episode = episode;
      ev.index = eval_index++;
      Vec s = eval_env.state();
      for (int t = 0; t < eval_env.config().max_steps; ++t) {
        ActionSample det =
            sample_action(sac.actor, s, ActionMode::kDeterministic, policy_rng);
        StepOutcome out = eval_env.step(det.action);
        ev.eval_return += out.reward;
        ++ev.steps;
        s = out.next_state;
        if (out.terminal || out.truncated) break;
      }
      ev.final_goal_dist = (s - eval_env.config().goal).norm();
      metrics.evals.push_back(ev);
    }
  }
  return result;
}

Policy deterministic_policy(const GaussianActor& actor) {
  return [&actor](const Vec& state) -> Vec {
    return Vec(squash(Mat(mlp_forward1(actor.mlp, state))).col(0));
  };
}

std::vector<Trajectory> evaluate(const Policy& policy, Environment& env,
                                 int n_episodes, uint64_t seed) {
  std::vector<Trajectory> trajectories;
  trajectories.reserve(std::max(n_episodes, 0));
  for (int k = 0; k < n_episodes; ++k) {
    env.reset(derive_seed(seed, k));
    Trajectory traj;
    Vec s = env.state();
    traj.states.push_back(s);
    traj.energies.push_back(eval_potential(env.surface(), s));
    for (int t = 0; t < env.config().max_steps; ++t) {
      const Vec action = policy(s);
      StepOutcome out = env.step(action);
      traj.actions.push_back(action);
      traj.states.push_back(out.next_state);
      traj.energies.push_back(-out.reward);
      traj.total_return += out.reward;
      traj.terminal = out.terminal;
      s = out.next_state;
      if (out.terminal || out.truncated) break;
    }
    traj.final_goal_dist = (s - env.config().goal).norm();
    trajectories.push_back(std::move(traj));
  }
  return trajectories;
}

BarrierEstimate barrier_estimate(const std::vector<Trajectory>& trajectories,
                                 const Vec& goal, double success_radius) {
  BarrierEstimate est;
  est.n_total = static_cast<int>(trajectories.size());
  double sum_all = 0.0, sum_success = 0.0;
  for (const auto& traj : trajectories) {
    if (traj.energies.empty())
      throw std::invalid_argument("barrier_estimate: empty trajectory");
    const double barrier =
        *std::max_element(traj.energies.begin(), traj.energies.end());
    const bool ok =
        (traj.states.back() - goal).norm() < success_radius;
    est.maxima.push_back(barrier);
    est.success.push_back(ok);
    sum_all += barrier;
    if (ok) {
      ++est.n_success;
      sum_success += barrier;
    }
  }
  if (est.n_total > 0) {
    est.mean_all = sum_all / est.n_total;
    double var_all = 0.0;
    for (double m : est.maxima) var_all += (m - est.mean_all) * (m - est.mean_all);
    est.stddev_all = std::sqrt(var_all / est.n_total);
  }
  if (est.n_success > 0) {
    const double mean = sum_success / est.n_success;
    double var = 0.0;
    for (int i = 0; i < est.n_total; ++i)
      if (est.success[i]) var += (est.maxima[i] - mean) * (est.maxima[i] - mean);
    est.mean = mean;
    est.stddev = std::sqrt(var / est.n_success);
  }
  return est;
}

}  // namespace mepsac
