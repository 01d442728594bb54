#include "mepsac/maze.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mepsac {

GridMaze coarse_grain(const PotentialSurface& surface, int n,
                      std::optional<double> wall_cutoff, const Vec& start,
                      const Vec& goal) {
  if (surface.dim != 2) throw std::invalid_argument("coarse_grain: surface must be 2-D");
  if (n < 2) throw std::invalid_argument("coarse_grain: n must be >= 2");
  if (!surface.in_bounds(start) || !surface.in_bounds(goal))
    throw std::invalid_argument("coarse_grain: start/goal out of bounds");

  GridMaze maze;
  maze.n = n;
  maze.lo = surface.lo;
  maze.hi = surface.hi;
  maze.cell_energy.resize(n, n);
  maze.wall.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double e = surface.energy(maze.cell_center(i, j));
      maze.cell_energy(i, j) = e;
      if (wall_cutoff && e > *wall_cutoff)
        maze.wall[static_cast<size_t>(i) * n + j] = 1;
    }
  }

  auto cell_of = [&](const Vec& p) {
    const double wx = (surface.hi[0] - surface.lo[0]) / n;
    const double wy = (surface.hi[1] - surface.lo[1]) / n;
    return std::array<int, 2>{
        std::clamp(static_cast<int>((p[0] - surface.lo[0]) / wx), 0, n - 1),
        std::clamp(static_cast<int>((p[1] - surface.lo[1]) / wy), 0, n - 1)};
  };
  maze.start_cell = cell_of(start);
  maze.goal_cell = cell_of(goal);
  if (maze.is_wall(maze.start_cell[0], maze.start_cell[1]) ||
      maze.is_wall(maze.goal_cell[0], maze.goal_cell[1])) {
    std::ostringstream msg;
    msg << "coarse_grain: start or goal cell is a wall at cutoff "
        << *wall_cutoff;
    throw std::invalid_argument(msg.str());
  }
  return maze;
}

std::optional<GridPath> solve_min_sum(const GridMaze& maze) {
  const int n = maze.n;
  const auto index = [n](int i, int j) { return static_cast<size_t>(i) * n + j; };

  // Shift by the grid minimum so edge weights are non-negative and
  // Dijkstra applies despite negative energies.
  double shift = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) shift = std::min(shift, maze.cell_energy(i, j));

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<size_t>(n) * n, kInf);
  std::vector<int> hops(static_cast<size_t>(n) * n, 0);
  std::vector<int64_t> parent(static_cast<size_t>(n) * n, -1);
  std::vector<uint8_t> settled(static_cast<size_t>(n) * n, 0);

  // (cost, hops) lexicographic so equal-cost ties resolve to shorter paths.
  using Entry = std::tuple<double, int, int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const size_t src = index(maze.start_cell[0], maze.start_cell[1]);
  const size_t dst = index(maze.goal_cell[0], maze.goal_cell[1]);
  dist[src] = 0.0;  // entry into the start cell is free
  heap.emplace(0.0, 0, static_cast<int64_t>(src));

  constexpr int di[4] = {-1, 1, 0, 0};
  constexpr int dj[4] = {0, 0, -1, 1};
  while (!heap.empty()) {
    const auto [cost, nhops, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (static_cast<size_t>(u) == dst) break;
    const int ui = static_cast<int>(u / n), uj = static_cast<int>(u % n);
    for (int k = 0; k < 4; ++k) {
      const int vi = ui + di[k], vj = uj + dj[k];
      if (vi < 0 || vi >= n || vj < 0 || vj >= n) continue;
      if (maze.is_wall(vi, vj)) continue;
      const size_t v = index(vi, vj);
      if (settled[v]) continue;
      const double cand = cost + (maze.cell_energy(vi, vj) - shift);
      if (cand < dist[v] || (cand == dist[v] && nhops + 1 < hops[v])) {
        dist[v] = cand;
        hops[v] = nhops + 1;
        parent[v] = u;
        heap.emplace(cand, nhops + 1, static_cast<int64_t>(v));
      }
    }
  }

  if (dist[dst] == kInf) return std::nullopt;

  GridPath path;
  path.total_shifted_cost = dist[dst];
  for (int64_t v = static_cast<int64_t>(dst); v != -1; v = parent[v])
    path.cells.push_back({static_cast<int>(v / n), static_cast<int>(v % n)});
  std::reverse(path.cells.begin(), path.cells.end());
  path.max_energy = -std::numeric_limits<double>::infinity();
  for (const auto& c : path.cells)
    path.max_energy = std::max(path.max_energy, maze.cell_energy(c[0], c[1]));
  return path;
}

std::vector<double> grid_profile(const GridMaze& maze, const GridPath& path) {
  std::vector<double> profile;
  profile.reserve(path.cells.size());
  for (const auto& c : path.cells) profile.push_back(maze.cell_energy(c[0], c[1]));
  return profile;
}

}  // namespace mepsac
