#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mepsac/potentials.hpp"

namespace mepsac {

// Coarse-grained surface: an n x n grid of cell-center energies with
// optional wall classification above an energy cutoff.
struct GridMaze {
  int n = 0;
  Eigen::MatrixXd cell_energy;   // (n, n), indexed (i, j) along (x, y)
  std::vector<uint8_t> wall;     // row-major n*n flags
  std::array<int, 2> start_cell{0, 0};
  std::array<int, 2> goal_cell{0, 0};
  Vec lo, hi;  // bounds the grid was built over

  bool is_wall(int i, int j) const { return wall[static_cast<size_t>(i) * n + j] != 0; }
  Vec cell_center(int i, int j) const {
    Vec p(2);
    p[0] = lo[0] + (i + 0.5) * (hi[0] - lo[0]) / n;
    p[1] = lo[1] + (j + 0.5) * (hi[1] - lo[1]) / n;
    return p;
  }
};

struct GridPath {
  std::vector<std::array<int, 2>> cells;  // start to goal, 4-adjacent steps
  double total_shifted_cost = 0.0;        // sum of (energy - grid min), start free
  double max_energy = 0.0;                // bottleneck along the path
};

// Cell value = potential at the cell center; wall = energy above the cutoff
// when one is given. Throws when the start or goal point lands on a wall.
GridMaze coarse_grain(const PotentialSurface& surface, int n,
                      std::optional<double> wall_cutoff, const Vec& start,
                      const Vec& goal);

// Minimizes the sum of (cell energy - grid minimum) over visited cells, cost
// charged on entering (the start cell is free), moves 4-connected, walls
// excluded. Ties in cost break toward fewer steps. Returns nullopt when the
// goal is unreachable.
std::optional<GridPath> solve_min_sum(const GridMaze& maze);

// Cell energies in path order.
std::vector<double> grid_profile(const GridMaze& maze, const GridPath& path);

}  // namespace mepsac
