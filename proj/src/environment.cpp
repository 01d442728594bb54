#include "mepsac/environment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mepsac {

void EnvConfig::validate(const PotentialSurface& surface) const {
  if (lambda <= 0.0) throw std::invalid_argument("EnvConfig: lambda must be > 0");
  if (delta <= 0.0) throw std::invalid_argument("EnvConfig: delta must be > 0");
  if (reset_noise_std < 0.0)
    throw std::invalid_argument("EnvConfig: reset_noise_std must be >= 0");
  if (max_steps < 1) throw std::invalid_argument("EnvConfig: max_steps must be >= 1");
  if (start.size() != surface.dim || goal.size() != surface.dim)
    throw std::invalid_argument("EnvConfig: start/goal dimension mismatch");
  if (!surface.in_bounds(start) || !surface.in_bounds(goal))
    throw std::invalid_argument("EnvConfig: start/goal outside surface bounds");
}

Environment::Environment(PotentialSurface surface, EnvConfig config)
    : surface_(std::move(surface)), config_(std::move(config)), rng_(0) {
  config_.validate(surface_);
  state_ = config_.start;
}

Vec Environment::reset(std::optional<uint64_t> seed) {
  if (seed) rng_.seed(*seed);
  state_ = config_.start;
  for (int i = 0; i < surface_.dim; ++i) {
    if (config_.reset_noise_std > 0.0) {
      std::normal_distribution<double> noise(0.0, config_.reset_noise_std);
      state_[i] += noise(rng_);
    }
    state_[i] = std::clamp(state_[i], surface_.lo[i], surface_.hi[i]);
  }
  steps_ = 0;
  terminal_ = false;
  return state_;
}

StepOutcome Environment::step(const Vec& action) {
  if (action.size() != surface_.dim)
    throw std::invalid_argument("step: action dimension mismatch");
  for (int i = 0; i < surface_.dim; ++i) {
    if (!(std::abs(action[i]) <= 1.0)) {
      std::ostringstream msg;
      msg << "step: action component " << i << " = " << action[i]
          << " outside [-1, 1]";
      throw std::invalid_argument(msg.str());
    }
  }
  if (terminal_) throw std::logic_error("step: episode already terminal");

  Vec next = state_ + config_.lambda * action;
  for (int i = 0; i < surface_.dim; ++i)
    next[i] = std::clamp(next[i], surface_.lo[i], surface_.hi[i]);

  StepOutcome out;
  out.reward = -eval_potential(surface_, next);
  out.terminal = (next - config_.goal).norm() < config_.delta;
  ++steps_;
  out.truncated = !out.terminal && steps_ >= config_.max_steps;
  out.next_state = next;

  state_ = std::move(next);
  terminal_ = out.terminal;
  return out;
}

}  // namespace mepsac
