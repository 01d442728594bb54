#include <doctest.h>

#include <cmath>
#include <random>

#include "mepsac/oracle.hpp"

using namespace mepsac;

namespace {

// Exhaustive minimax over all simple 8-connected paths; the brute-force
// oracle for the bottleneck search (with branch-and-bound pruning, which
// does not change the optimum).
double brute_force_minimax(const Eigen::MatrixXd& cells, int si, int sj,
                           int gi, int gj) {
  const int n = static_cast<int>(cells.rows());
  std::vector<uint8_t> visited(n * n, 0);
  double best = std::numeric_limits<double>::infinity();
  auto dfs = [&](auto&& self, int i, int j, double path_max) -> void {
    path_max = std::max(path_max, cells(i, j));
    if (path_max >= best) return;
    if (i == gi && j == gj) {
      best = path_max;
      return;
    }
    visited[i * n + j] = 1;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int vi = i + di, vj = j + dj;
        if (vi < 0 || vi >= n || vj < 0 || vj >= n) continue;
        if (visited[vi * n + vj]) continue;
        self(self, vi, vj, path_max);
      }
    visited[i * n + j] = 0;
  };
  dfs(dfs, si, sj, -std::numeric_limits<double>::infinity());
  return best;
}

PotentialSurface table_surface(const Eigen::MatrixXd& cells) {
  // Piecewise-constant surface whose grid_minimax cells reproduce `cells`
  // exactly at resolution n.
  const int n = static_cast<int>(cells.rows());
  PotentialSurface s;
  s.dim = 2;
  s.lo = (Vec(2) << 0.0, 0.0).finished();
  s.hi = (Vec(2) << 1.0, 1.0).finished();
  s.energy = [cells, n](const Vec& p) {
    const int i = std::clamp(static_cast<int>(p[0] * n), 0, n - 1);
    const int j = std::clamp(static_cast<int>(p[1] * n), 0, n - 1);
    return cells(i, j);
  };
  s.gradient = [](const Vec&) { return Vec::Zero(2); };
  return s;
}

Vec point(double x, double y) { return (Vec(2) << x, y).finished(); }

}  // namespace

TEST_CASE("find_minima recovers the three mueller-brown minima") {
  const auto mb = make_mueller_brown();
  const auto minima = find_minima(mb, lattice_seeds(mb, 5));
  REQUIRE(minima.size() == 3);
  for (const auto& m : minima) CHECK(m.converged);
  // Sorted by energy: deepest first.
  CHECK((minima[0].location - point(-0.558, 1.442)).norm() < 1e-3);
  CHECK((minima[1].location - point(0.623, 0.028)).norm() < 1e-3);
  CHECK((minima[2].location - point(-0.050, 0.467)).norm() < 1e-3);
  CHECK(std::abs(minima[0].energy - (-146.7)) <= 0.1);
  CHECK(std::abs(minima[1].energy - (-108.2)) <= 0.1);
  CHECK(std::abs(minima[2].energy - (-80.8)) <= 0.1);
}

TEST_CASE("find_minima on the double well") {
  const auto dw = make_double_well();
  const auto minima = find_minima(dw, {point(0.9, 0.1)});
  REQUIRE(minima.size() == 1);
  CHECK(minima[0].converged);
  CHECK((minima[0].location - point(1.0, 0.0)).norm() < 1e-6);
  CHECK(std::abs(minima[0].energy) <= 1e-10);
}

TEST_CASE("a seed already at a minimum stays there") {
  const auto dw = make_double_well();
  const auto from_min = find_minima(dw, {point(1.0, 0.0)});
  REQUIRE(from_min.size() == 1);
  CHECK((from_min[0].location - point(1.0, 0.0)).norm() < 1e-6);
}

TEST_CASE("grid minimax on the double well finds the saddle") {
  const auto dw = make_double_well();
  const auto barrier =
      grid_minimax_barrier(dw, point(-1.0, 0.0), point(1.0, 0.0), 401);
  CHECK(std::abs(barrier.saddle_energy - 1.0) <= 0.01);
}

TEST_CASE("grid minimax degenerate and error cases") {
  const auto dw = make_double_well();
  SUBCASE("start equals goal") {
    const auto b = grid_minimax_barrier(dw, point(0.5, 0.5), point(0.5, 0.5), 100);
    // Cell width is 4/100, so (0.5, 0.5) sits exactly on a cell center.
    CHECK(std::abs(b.saddle_energy - eval_potential(dw, point(0.5, 0.5))) <=
          1e-12);
  }
  SUBCASE("out of bounds start") {
    CHECK_THROWS_AS(grid_minimax_barrier(dw, point(-3.0, 0.0), point(1.0, 0.0), 10),
                    std::invalid_argument);
  }
  SUBCASE("resolution too small") {
    CHECK_THROWS_AS(grid_minimax_barrier(dw, point(-1.0, 0.0), point(1.0, 0.0), 1),
                    std::invalid_argument);
  }
}

TEST_CASE("bottleneck dijkstra equals brute force on random 4x4 grids") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> energy(-10.0, 10.0);
  std::uniform_int_distribution<int> cell(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd cells(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) cells(i, j) = energy(rng);
    const int si = cell(rng), sj = cell(rng), gi = cell(rng), gj = cell(rng);
    const auto surface = table_surface(cells);
    const auto result = grid_minimax_barrier(
        surface, point((si + 0.5) / 4.0, (sj + 0.5) / 4.0),
        point((gi + 0.5) / 4.0, (gj + 0.5) / 4.0), 4);
    CHECK(result.saddle_energy == brute_force_minimax(cells, si, sj, gi, gj));
  }
}

TEST_CASE("minimax is symmetric in start and goal") {
  const auto mb = make_mueller_brown();
  const Vec a = point(0.623, 0.028), b = point(-0.558, 1.442);
  const auto fwd = grid_minimax_barrier(mb, a, b, 200);
  const auto rev = grid_minimax_barrier(mb, b, a, 200);
  CHECK(fwd.saddle_energy == rev.saddle_energy);
}

TEST_CASE("constant energy shift moves the barrier by exactly that constant") {
  auto mb = make_mueller_brown();
  auto shifted = mb;
  const auto base_energy = mb.energy;
  shifted.energy = [base_energy](const Vec& p) { return base_energy(p) + 10.0; };
  const Vec a = point(0.623, 0.028), b = point(-0.558, 1.442);
  const auto plain = grid_minimax_barrier(mb, a, b, 150);
  const auto moved = grid_minimax_barrier(shifted, a, b, 150);
  CHECK(std::abs(moved.saddle_energy - (plain.saddle_energy + 10.0)) <= 1e-9);
}

TEST_CASE("refining the grid gives shrinking barrier increments") {
  const auto mb = make_mueller_brown();
  const Vec a = point(0.623, 0.028), b = point(-0.558, 1.442);
  const double e1 = grid_minimax_barrier(mb, a, b, 100).saddle_energy;
  const double e2 = grid_minimax_barrier(mb, a, b, 200).saddle_energy;
  const double e3 = grid_minimax_barrier(mb, a, b, 400).saddle_energy;
  CHECK(std::abs(e3 - e2) < std::abs(e2 - e1));
}

TEST_CASE("barrier result invariants") {
  const auto mb = make_mueller_brown();
  const Vec a = point(0.623, 0.028), b = point(-0.558, 1.442);
  const auto result = grid_minimax_barrier(mb, a, b, 200);
  CHECK(result.saddle_energy >= eval_potential(mb, a));
  CHECK(result.saddle_energy >= eval_potential(mb, b));
  CHECK(result.resolution == 200);
  CHECK(result.saddle_cell[0] >= 0);
  CHECK(result.saddle_cell[0] < 200);
}
