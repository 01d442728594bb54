#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "mepsac/agent.hpp"
#include "mepsac/environment.hpp"

namespace mepsac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run needs: the MDP, the agent, and evaluation settings.
// Defaults reproduce the benchmark setup.
struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  int eval_episodes = 11;       // ensemble size for the barrier report
  double success_radius = 0.05; // evaluation success distance to goal
};

// Flat `key = value` text format, one pair per line, '#' comments.
// Unknown keys are errors so hyperparameter typos cannot pass silently.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Apply a single key=value assignment (also used for ablation overrides).
void apply_config_key(RunConfig& config, const std::string& key,
                      const std::string& value);

// All keys with their current values, in schema order.
std::map<std::string, std::string> config_to_map(const RunConfig& config);
std::string config_to_text(const RunConfig& config);

}  // namespace mepsac
