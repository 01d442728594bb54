#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mepsac/agent.hpp"
#include "mepsac/config.hpp"
#include "mepsac/maze.hpp"
#include "mepsac/oracle.hpp"

namespace mepsac {

inline constexpr const char* kVersionTag = "mepsac-0.1.0";

struct AblationSpec {
  std::string axis;  // target_smoothing | policy_delay | alpha
  std::vector<std::string> values;
  int trials = 3;
  RunConfig base;

  static std::vector<std::string> default_values(const std::string& axis);
};
AblationSpec load_ablation_spec(const std::string& path);
AblationSpec parse_ablation_text(const std::string& text);

struct AblationRow {
  std::string value;
  int trials = 0;
  bool failed = false;
  std::string error;
  double mean_return = 0.0;  // over pooled last-100-episode returns
  double std_return = 0.0;
};

// Builds the environment named by the config and runs one training trial.
TrainResult run_training(const RunConfig& config, uint64_t seed,
                         const EpisodeCallback& on_episode = {});

// Writes metrics.jsonl (episode/eval/summary records, no timestamps so
// reruns are byte-identical), checkpoint.json and manifest.json.
struct TrainArtifacts {
  std::string metrics_path, checkpoint_path, manifest_path;
};
TrainArtifacts cmd_train(const std::string& config_path, uint64_t seed,
                         const std::string& out_dir);

// Loads a checkpoint, rolls out the deterministic ensemble and writes
// trajectory CSVs, raw and max-aligned energy profiles, and barrier.json.
struct EvalArtifacts {
  std::vector<std::string> trajectory_paths;
  std::string profiles_path, aligned_profiles_path, report_path;
  BarrierEstimate estimate;
};
EvalArtifacts cmd_eval(const std::string& checkpoint_path,
                       const std::string& config_path, int n_episodes,
                       uint64_t seed, const std::string& out_dir,
                       std::optional<double> success_radius = std::nullopt);

// Runs every cell x trial of the sweep; cell failures are recorded in the
// summary and the sweep continues. Returns the summary rows.
std::vector<AblationRow> cmd_ablate(const std::string& spec_path,
                                    uint64_t seed,
                                    const std::string& out_dir);

// JSON record {surface, resolution, minima, saddle_energy, saddle_cell}.
std::string cmd_oracle(const std::string& surface_id, int resolution);

struct MazeArtifacts {
  std::string maze_path, path_path;
  bool has_path = false;
};
MazeArtifacts cmd_maze(const std::string& surface_id, int n,
                       std::optional<double> cutoff,
                       const std::string& out_dir);

// Serialization helpers shared with the tests.
std::string metrics_to_jsonl(const TrainMetrics& metrics);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace mepsac
