#include "mepsac/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mepsac/checkpoint.hpp"
#include "mepsac/rng.hpp"

namespace mepsac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

json config_json(const RunConfig& config) {
  json j;
  for (const auto& [key, value] : config_to_map(config)) j[key] = value;
  return j;
}

Environment make_env(const RunConfig& config) {
  return Environment(surface_by_id(config.env.surface_id), config.env);
}

struct CellStats {
  std::vector<double> pooled_last100;
  std::vector<std::vector<double>> per_trial_returns;  // per episode
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / v.size());
}

std::string sanitize(const std::string& value) {
  std::string out;
  for (char c : value)
    out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

std::string metrics_to_jsonl(const TrainMetrics& metrics) {
  std::ostringstream out;
  size_t eval_cursor = 0;
  for (const auto& ep : metrics.episodes) {
    json j;
    j["type"] = "episode";
    j["episode"] = ep.episode;
    j["steps"] = ep.steps;
    j["return"] = ep.episode_return;
    j["alpha"] = ep.alpha;
    j["updates"] = ep.updates;
    j["actor_updates"] = ep.actor_updates;
    j["critic1_loss"] = ep.critic1_loss;
    j["critic2_loss"] = ep.critic2_loss;
    j["actor_loss"] = ep.actor_loss;
    j["alpha_loss"] = ep.alpha_loss;
    out << j.dump() << "\n";
    while (eval_cursor < metrics.evals.size() &&
           metrics.evals[eval_cursor].episode == ep.episode) {
      const auto& ev = metrics.evals[eval_cursor++];
      json e;
      e["type"] = "eval";
      e["episode"] = ev.episode;
      e["index"] = ev.index;
      e["steps"] = ev.steps;
      e["return"] = ev.eval_return;
      e["final_goal_dist"] = ev.final_goal_dist;
      out << e.dump() << "\n";
    }
  }
  json s;
  s["type"] = "summary";
  s["episodes"] = metrics.episodes.size();
  s["env_steps"] = metrics.env_steps;
  s["critic_updates"] = metrics.critic_updates;
  s["actor_updates"] = metrics.actor_updates;
  s["evals"] = metrics.evals.size();
  out << s.dump() << "\n";
  return out.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  out << "step";
  for (int i = 1; i <= d; ++i) out << ",x" << i;
  for (int i = 1; i <= d; ++i) out << ",a" << i;
  out << ",reward,terminal,truncated\n";
  for (size_t k = 0; k < traj.states.size(); ++k) {
    out << k;
    for (int i = 0; i < d; ++i) out << "," << traj.states[k][i];
    for (int i = 0; i < d; ++i)
      out << "," << (k == 0 ? 0.0 : traj.actions[k - 1][i]);
    // Step 0 is the reset state; its reward field carries -V(s0).
    out << "," << -traj.energies[k];
    const bool last = (k + 1 == traj.states.size());
    const bool terminal = last && traj.terminal;
    const bool truncated = last && !traj.terminal && k > 0;
    out << "," << (terminal ? 1 : 0) << "," << (truncated ? 1 : 0) << "\n";
  }
}

TrainResult run_training(const RunConfig& config, uint64_t seed,
                         const EpisodeCallback& on_episode) {
  Environment env = make_env(config);
  return train(env, config.agent, seed, on_episode);
}

TrainArtifacts cmd_train(const std::string& config_path, uint64_t seed,
                         const std::string& out_dir) {
  const RunConfig config = load_config(config_path);
  fs::create_directories(out_dir);
  const std::string started = timestamp_utc();

  TrainResult result = run_training(config, seed, [&](const EpisodeRecord& ep) {
    if (ep.episode % 25 == 0)
      std::cerr << "episode " << ep.episode << "/" << config.agent.epochs
                << "  return " << ep.episode_return << "  alpha " << ep.alpha
                << "\n";
  });

  TrainArtifacts artifacts;
  artifacts.metrics_path = (fs::path(out_dir) / "metrics.jsonl").string();
  artifacts.checkpoint_path = (fs::path(out_dir) / "checkpoint.json").string();
  artifacts.manifest_path = (fs::path(out_dir) / "manifest.json").string();

  write_text(artifacts.metrics_path, metrics_to_jsonl(result.metrics));
  save_checkpoint(artifacts.checkpoint_path, result.sac);

  json manifest;
  manifest["format"] = "mepsac.manifest.v1";
  manifest["version"] = kVersionTag;
  manifest["command"] = "train";
  manifest["seed"] = seed;
  manifest["surface"] = config.env.surface_id;
  manifest["config"] = config_json(config);
  manifest["artifacts"] = {{"metrics", artifacts.metrics_path},
                           {"checkpoint", artifacts.checkpoint_path}};
  manifest["started_at"] = started;
  manifest["finished_at"] = timestamp_utc();
  write_text(artifacts.manifest_path, manifest.dump(2) + "\n");
  return artifacts;
}

EvalArtifacts cmd_eval(const std::string& checkpoint_path,
                       const std::string& config_path, int n_episodes,
                       uint64_t seed, const std::string& out_dir,
                       std::optional<double> success_radius) {
  const RunConfig config = load_config(config_path);
  const double radius = success_radius.value_or(config.success_radius);
  SacState sac = load_checkpoint(checkpoint_path);
  fs::create_directories(out_dir);

  Environment env = make_env(config);
  const std::vector<Trajectory> trajectories =
      evaluate(deterministic_policy(sac.actor), env, n_episodes, seed);

  EvalArtifacts artifacts;
  for (size_t k = 0; k < trajectories.size(); ++k) {
    std::ostringstream name;
    name << "trajectory_" << std::setw(3) << std::setfill('0') << k << ".csv";
    const std::string path = (fs::path(out_dir) / name.str()).string();
    write_trajectory_csv(path, trajectories[k]);
    artifacts.trajectory_paths.push_back(path);
  }

  // Raw profiles, then profiles shifted so the maxima share index 0.
  artifacts.profiles_path = (fs::path(out_dir) / "profiles.csv").string();
  {
    std::ofstream out(artifacts.profiles_path);
    out.precision(17);
    out << "trajectory,step,energy\n";
    for (size_t k = 0; k < trajectories.size(); ++k)
      for (size_t i = 0; i < trajectories[k].energies.size(); ++i)
        out << k << "," << i << "," << trajectories[k].energies[i] << "\n";
  }
  artifacts.aligned_profiles_path =
      (fs::path(out_dir) / "profiles_aligned.csv").string();
  {
    std::ofstream out(artifacts.aligned_profiles_path);
    out.precision(17);
    out << "trajectory,aligned_step,energy\n";
    for (size_t k = 0; k < trajectories.size(); ++k) {
      const auto& e = trajectories[k].energies;
      const auto peak =
          std::distance(e.begin(), std::max_element(e.begin(), e.end()));
      for (size_t i = 0; i < e.size(); ++i)
        out << k << "," << (static_cast<long>(i) - peak) << "," << e[i] << "\n";
    }
  }

  artifacts.estimate = barrier_estimate(trajectories, config.env.goal, radius);
  json report;
  report["n_total"] = artifacts.estimate.n_total;
  report["n_success"] = artifacts.estimate.n_success;
  report["success_radius"] = radius;
  report["mean"] = artifacts.estimate.mean ? json(*artifacts.estimate.mean) : json();
  report["std"] = artifacts.estimate.stddev ? json(*artifacts.estimate.stddev) : json();
  report["mean_all"] = artifacts.estimate.mean_all;
  report["std_all"] = artifacts.estimate.stddev_all;
  report["maxima"] = artifacts.estimate.maxima;
  artifacts.report_path = (fs::path(out_dir) / "barrier.json").string();
  write_text(artifacts.report_path, report.dump(2) + "\n");
  return artifacts;
}

std::vector<std::string> AblationSpec::default_values(const std::string& axis) {
  if (axis == "policy_delay") return {"0", "2", "4", "8", "16", "32"};
  if (axis == "alpha") return {"1e-3", "1e-2", "1e-1", "2e-1", "5e-1", "tunable"};
  if (axis == "target_smoothing") return {"absent", "present"};
  throw ConfigError("unknown ablation axis '" + axis + "'");
}

AblationSpec parse_ablation_text(const std::string& text) {
  AblationSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ConfigError("ablation spec: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "axis") spec.axis = value;
    else if (key == "trials") spec.trials = std::stoi(value);
    else if (key == "values") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) spec.values.push_back(trim(item));
    } else apply_config_key(spec.base, key, value);
  }
  if (spec.axis.empty()) throw ConfigError("ablation spec: missing 'axis'");
  if (spec.values.empty()) spec.values = AblationSpec::default_values(spec.axis);
  if (spec.trials < 1) throw ConfigError("ablation spec: trials must be >= 1");
  return spec;
}

AblationSpec load_ablation_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ablation spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_ablation_text(buffer.str());
}

namespace {

RunConfig cell_config(const AblationSpec& spec, const std::string& value) {
  RunConfig config = spec.base;
  if (spec.axis == "policy_delay") {
    const int v = std::stoi(value);
    // Delay 0 means the actor updates with every critic update.
    config.agent.policy_delay = std::max(1, v);
  } else if (spec.axis == "alpha") {
    if (value == "tunable") config.agent.alpha_fixed.reset();
    else config.agent.alpha_fixed = std::stod(value);
  } else if (spec.axis == "target_smoothing") {
    if (value == "present") config.agent.target_smoothing = true;
    else if (value == "absent") config.agent.target_smoothing = false;
    else throw ConfigError("target_smoothing value must be present/absent, got '" + value + "'");
  } else {
    throw ConfigError("unknown ablation axis '" + spec.axis + "'");
  }
  return config;
}

}  // namespace

std::vector<AblationRow> cmd_ablate(const std::string& spec_path,
                                    uint64_t seed,
                                    const std::string& out_dir) {
  const AblationSpec spec = load_ablation_spec(spec_path);
  fs::create_directories(out_dir);
  std::vector<AblationRow> rows;

  for (size_t cell = 0; cell < spec.values.size(); ++cell) {
    const std::string& value = spec.values[cell];
    AblationRow row;
    row.value = value;
    row.trials = spec.trials;
    CellStats stats;
    try {
      const RunConfig config = cell_config(spec, value);
      for (int trial = 0; trial < spec.trials; ++trial) {
        const uint64_t trial_seed = derive_seed(seed, cell * 1000 + trial);
        TrainResult result = run_training(config, trial_seed);
        std::vector<double> returns;
        for (const auto& ep : result.metrics.episodes)
          returns.push_back(ep.episode_return);
        const size_t tail = std::min<size_t>(100, returns.size());
        for (size_t i = returns.size() - tail; i < returns.size(); ++i)
          stats.pooled_last100.push_back(returns[i]);
        stats.per_trial_returns.push_back(std::move(returns));

        const std::string metrics_path =
            (fs::path(out_dir) / ("cell_" + sanitize(value) + "_trial_" +
                                  std::to_string(trial) + "_metrics.jsonl"))
                .string();
        write_text(metrics_path, metrics_to_jsonl(result.metrics));
      }
      row.mean_return = mean_of(stats.pooled_last100);
      row.std_return = std_of(stats.pooled_last100, row.mean_return);

      // Learning curve: per-episode mean and std across trials.
      std::ofstream curve(
          (fs::path(out_dir) / ("curve_" + sanitize(value) + ".csv")).string());
      curve.precision(17);
      curve << "episode,mean_return,std_return\n";
      const size_t n_episodes =
          stats.per_trial_returns.empty() ? 0 : stats.per_trial_returns[0].size();
      for (size_t e = 0; e < n_episodes; ++e) {
        std::vector<double> at;
        for (const auto& tr : stats.per_trial_returns)
          if (e < tr.size()) at.push_back(tr[e]);
        const double m = mean_of(at);
        curve << (e + 1) << "," << m << "," << std_of(at, m) << "\n";
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::ofstream summary((fs::path(out_dir) / "summary.csv").string());
  summary.precision(17);
  summary << "axis,value,trials,status,mean_return,std_return\n";
  for (const auto& row : rows) {
    summary << spec.axis << "," << row.value << "," << row.trials << ","
            << (row.failed ? "failed" : "ok") << "," << row.mean_return << ","
            << row.std_return << "\n";
  }
  return rows;
}

std::string cmd_oracle(const std::string& surface_id, int resolution) {
  const PotentialSurface surface = surface_by_id(surface_id);
  const auto minima = find_minima(surface, lattice_seeds(surface, 5));

  json j;
  j["surface"] = surface_id;
  j["resolution"] = resolution;
  j["minima"] = json::array();
  for (const auto& m : minima) {
    json jm;
    jm["location"] = {m.location[0], m.location[1]};
    jm["energy"] = m.energy;
    jm["converged"] = m.converged;
    j["minima"].push_back(jm);
  }
  if (minima.size() >= 2) {
    // Barrier between the two outer (deepest and next) basins: the
    // deepest minimum and the deepest other basin on the surface.
    const BarrierResult barrier = grid_minimax_barrier(
        surface, minima[1].location, minima[0].location, resolution);
    j["saddle_energy"] = barrier.saddle_energy;
    j["saddle_cell"] = {barrier.saddle_cell[0], barrier.saddle_cell[1]};
  }
  return j.dump(2) + "\n";
}

MazeArtifacts cmd_maze(const std::string& surface_id, int n,
                       std::optional<double> cutoff,
                       const std::string& out_dir) {
  const PotentialSurface surface = surface_by_id(surface_id);
  const RunConfig defaults;  // start/goal defaults are surface-appropriate
  Vec start = defaults.env.start, goal = defaults.env.goal;
  if (surface_id == "double_well") {
    start = (Vec(2) << 1.0, 0.0).finished();
    goal = (Vec(2) << -1.0, 0.0).finished();
  }
  const GridMaze maze = coarse_grain(surface, n, cutoff, start, goal);
  fs::create_directories(out_dir);

  MazeArtifacts artifacts;
  artifacts.maze_path = (fs::path(out_dir) / "maze.json").string();
  json j;
  j["n"] = maze.n;
  j["start_cell"] = {maze.start_cell[0], maze.start_cell[1]};
  j["goal_cell"] = {maze.goal_cell[0], maze.goal_cell[1]};
  j["cell_energy"] = json::array();
  j["wall"] = json::array();
  for (int i = 0; i < maze.n; ++i) {
    json row_e = json::array(), row_w = json::array();
    for (int jcol = 0; jcol < maze.n; ++jcol) {
      row_e.push_back(maze.cell_energy(i, jcol));
      row_w.push_back(maze.is_wall(i, jcol));
    }
    j["cell_energy"].push_back(std::move(row_e));
    j["wall"].push_back(std::move(row_w));
  }
  write_text(artifacts.maze_path, j.dump() + "\n");

  artifacts.path_path = (fs::path(out_dir) / "path.csv").string();
  const auto path = solve_min_sum(maze);
  artifacts.has_path = path.has_value();
  std::ofstream out(artifacts.path_path);
  out.precision(17);
  out << "i,j,energy\n";
  if (path)
    for (const auto& c : path->cells)
      out << c[0] << "," << c[1] << "," << maze.cell_energy(c[0], c[1]) << "\n";
  return artifacts;
}

}  // namespace mepsac
