#pragma once

#include <array>
#include <vector>

#include "mepsac/potentials.hpp"

namespace mepsac {

struct Minimum {
  Vec location;
  double energy = 0.0;
  bool converged = false;  // gradient norm <= 1e-6 reached
};

struct BarrierResult {
  double saddle_energy = 0.0;
  std::array<int, 2> saddle_cell{0, 0};  // argmax cell on an optimal path
  int resolution = 0;
};

// Gradient descent with backtracking (step halved while the energy fails to
// decrease) from each seed. Runs until the gradient norm drops to 1e-6 or
// max_iters is hit; never throws on non-convergence. Minima closer than
// 1e-3 are merged.
std::vector<Minimum> find_minima(const PotentialSurface& surface,
                                 const std::vector<Vec>& seeds,
                                 double step = 0.01, int max_iters = 20000);

// Seeds on an n x n lattice of cell centers over the surface bounds.
std::vector<Vec> lattice_seeds(const PotentialSurface& surface, int n);

// Discretizes the bounds box into resolution x resolution cells (value =
// potential at the cell center) and returns the min over 8-connected paths
// of the max cell value between the cells containing start and goal,
// via best-first (bottleneck Dijkstra) expansion.
BarrierResult grid_minimax_barrier(const PotentialSurface& surface,
                                   const Vec& start, const Vec& goal,
                                   int resolution);

}  // namespace mepsac
