// Command-line front end: train / eval / ablate / oracle / maze.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "mepsac/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum-energy-barrier pathway search on analytic potential "
               "surfaces with a soft actor-critic agent"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", checkpoint_path, surface = "mueller_brown";
  std::string spec_path;
  uint64_t seed = 0;
  int episodes = 11, resolution = 1000, maze_n = 8;
  std::optional<double> success_radius, cutoff;

  auto* train = app.add_subcommand("train", "Train the agent and write metrics, checkpoint, manifest");
  train->add_option("--config", config_path, "key = value config file")->required();
  train->add_option("--seed", seed, "master seed");
  train->add_option("--out", out_dir, "output directory");

  auto* eval = app.add_subcommand("eval", "Roll out a trained checkpoint and report the barrier ensemble");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json from train")->required();
  eval->add_option("--config", config_path, "key = value config file")->required();
  eval->add_option("--episodes", episodes, "ensemble size");
  eval->add_option("--seed", seed, "master seed");
  eval->add_option("--out", out_dir, "output directory");
  eval->add_option("--success-radius", [&success_radius](const std::vector<std::string>& v) {
    success_radius = std::stod(v[0]);
    return true;
  }, "goal distance counting an episode as successful");

  auto* ablate = app.add_subcommand("ablate", "Run a hyperparameter sweep from an ablation spec");
  ablate->add_option("--spec", spec_path, "ablation spec file (axis/values/trials + config keys)")->required();
  ablate->add_option("--seed", seed, "master seed");
  ablate->add_option("--out", out_dir, "output directory");

  auto* oracle = app.add_subcommand("oracle", "Print ground-truth minima and the grid minimax barrier as JSON");
  oracle->add_option("--surface", surface, "surface id");
  oracle->add_option("--resolution", resolution, "cells per dimension");

  auto* maze = app.add_subcommand("maze", "Coarse-grain a surface into a grid maze and solve it");
  maze->add_option("--surface", surface, "surface id");
  maze->add_option("-n,--n", maze_n, "grid size per dimension");
  maze->add_option("--cutoff", [&cutoff](const std::vector<std::string>& v) {
    cutoff = std::stod(v[0]);
    return true;
  }, "wall energy cutoff (omit for no walls)");
  maze->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto artifacts = mepsac::cmd_train(config_path, seed, out_dir);
      std::cout << "metrics:    " << artifacts.metrics_path << "\n"
                << "checkpoint: " << artifacts.checkpoint_path << "\n"
                << "manifest:   " << artifacts.manifest_path << "\n";
    } else if (eval->parsed()) {
      const auto artifacts = mepsac::cmd_eval(checkpoint_path, config_path,
                                              episodes, seed, out_dir,
                                              success_radius);
      std::cout << "report: " << artifacts.report_path << "\n";
      const auto& est = artifacts.estimate;
      if (est.mean)
        std::cout << "barrier: " << *est.mean << " +- " << *est.stddev << " ("
                  << est.n_success << "/" << est.n_total << " successful)\n";
      else
        std::cout << "barrier: no successful trajectories (0/" << est.n_total
                  << ")\n";
    } else if (ablate->parsed()) {
      const auto rows = mepsac::cmd_ablate(spec_path, seed, out_dir);
      for (const auto& row : rows) {
        std::cout << row.value << ": ";
        if (row.failed)
          std::cout << "FAILED (" << row.error << ")\n";
        else
          std::cout << row.mean_return << " +- " << row.std_return << "\n";
      }
    } else if (oracle->parsed()) {
      std::cout << mepsac::cmd_oracle(surface, resolution);
    } else if (maze->parsed()) {
      const auto artifacts = mepsac::cmd_maze(surface, maze_n, cutoff, out_dir);
      std::cout << "maze: " << artifacts.maze_path << "\n"
                << "path: " << artifacts.path_path
                << (artifacts.has_path ? "" : " (no path found)") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
