#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "mepsac/potentials.hpp"

namespace mepsac {

struct EnvConfig {
  std::string surface_id = "mueller_brown";
  Vec start = (Vec(2) << 0.623, 0.028).finished();
  Vec goal = (Vec(2) << -0.558, 1.442).finished();
  double lambda = 0.01;           // action scaling factor
  double delta = 1e-4;            // goal tolerance (Euclidean)
  double reset_noise_std = 0.1;   // start perturbation
  int max_steps = 500;

  void validate(const PotentialSurface& surface) const;
};

struct StepOutcome {
  Vec next_state;
  double reward = 0.0;
  bool terminal = false;   // goal reached within delta
  bool truncated = false;  // step budget exhausted
};

// The MDP: perturbation dynamics s' = clip(s + lambda * a) on a potential
// surface, reward -V(s'), termination when ||s' - goal|| < delta.
// One instance is single-threaded mutable state; run one per trial.
class Environment {
 public:
  Environment(PotentialSurface surface, EnvConfig config);

  // Returns start + N(0, reset_noise_std^2 I), clipped to bounds, and
  // resets the step counter. Passing a seed reseeds the noise stream;
  // without one the stream continues.
  Vec reset(std::optional<uint64_t> seed = std::nullopt);

  // Requires |action_i| <= 1 and an episode that has not already reached
  // the goal. Reward is the negative energy of the clipped next state.
  StepOutcome step(const Vec& action);

  const Vec& state() const { return state_; }
  int steps_taken() const { return steps_; }
  int dim() const { return surface_.dim; }
  const PotentialSurface& surface() const { return surface_; }
  const EnvConfig& config() const { return config_; }

 private:
  PotentialSurface surface_;
  EnvConfig config_;
  Vec state_;
  int steps_ = 0;
  bool terminal_ = false;
  std::mt19937_64 rng_;
};

}  // namespace mepsac
