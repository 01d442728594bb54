#include "mepsac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mepsac {

namespace {

constexpr double kGradTol = 1e-6;
constexpr double kMergeRadius = 1e-3;

// Newton refinement on the analytic gradient (finite-difference Hessian).
// Backtracking descent cannot certify progress once the true energy
// decrease falls below the double-precision resolution of V, which happens
// around |g| ~ 1e-4 here; the quadratic-rate polish closes the remaining
// gap to the 1e-6 gradient tolerance.
bool newton_polish(const PotentialSurface& surface, Vec& p) {
  const int d = surface.dim;
  const double h = 1e-6;
  Vec q = p;
  for (int iter = 0; iter < 30; ++iter) {
    const Vec g = surface.gradient(q);
    if (g.norm() <= 0.1 * kGradTol) {
      p = q;
      return true;
    }
    Eigen::MatrixXd hess(d, d);
    for (int i = 0; i < d; ++i) {
      Vec hi = q, lo = q;
      hi[i] += h;
      lo[i] -= h;
      hess.col(i) = (surface.gradient(hi) - surface.gradient(lo)) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose().eval());
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const Vec delta = ldlt.solve(g);
    if (!delta.allFinite() || delta.norm() > 1e-2) return false;
    q -= delta;
  }
  if (surface.gradient(q).norm() <= kGradTol) {
    p = q;
    return true;
  }
  return false;
}

Minimum descend(const PotentialSurface& surface, Vec p, double step_init,
                int max_iters) {
  double energy = surface.energy(p);
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vec g = surface.gradient(p);
    const double gnorm = g.norm();
    if (gnorm <= kGradTol) break;
    if (gnorm <= 1e-3 && newton_polish(surface, p)) {
      energy = surface.energy(p);
      break;
    }

    // Backtracking: halve the trial step until the energy decreases.
    double step = step_init;
    bool accepted = false;
    while (step > 1e-18) {
      Vec trial = p - step * g;
      const double trial_energy = surface.energy(trial);
      if (trial_energy < energy) {
        p = std::move(trial);
        energy = trial_energy;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no measurable descent left at double precision
  }
  const bool converged = surface.gradient(p).norm() <= kGradTol;
  return {p, energy, converged};
}

}  // namespace

std::vector<Minimum> find_minima(const PotentialSurface& surface,
                                 const std::vector<Vec>& seeds, double step,
                                 int max_iters) {
  if (step <= 0.0) throw std::invalid_argument("find_minima: step must be > 0");
  std::vector<Minimum> merged;
  for (const auto& seed : seeds) {
    if (seed.size() != surface.dim)
      throw std::invalid_argument("find_minima: seed dimension mismatch");
    Minimum m = descend(surface, seed, step, max_iters);
    bool duplicate = false;
    for (auto& kept : merged) {
      if ((kept.location - m.location).norm() < kMergeRadius) {
        if (m.energy < kept.energy) kept = m;  // keep the better representative
        duplicate = true;
        break;
      }
    }
    if (!duplicate) merged.push_back(std::move(m));
  }
  std::sort(merged.begin(), merged.end(),
            [](const Minimum& a, const Minimum& b) { return a.energy < b.energy; });
  return merged;
}

std::vector<Vec> lattice_seeds(const PotentialSurface& surface, int n) {
  std::vector<Vec> seeds;
  seeds.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec p(2);
      p[0] = surface.lo[0] + (i + 0.5) * (surface.hi[0] - surface.lo[0]) / n;
      p[1] = surface.lo[1] + (j + 0.5) * (surface.hi[1] - surface.lo[1]) / n;
      seeds.push_back(std::move(p));
    }
  }
  return seeds;
}

BarrierResult grid_minimax_barrier(const PotentialSurface& surface,
                                   const Vec& start, const Vec& goal,
                                   int resolution) {
  if (surface.dim != 2)
    throw std::invalid_argument("grid_minimax_barrier: surface must be 2-D");
  if (resolution < 2)
    throw std::invalid_argument("grid_minimax_barrier: resolution must be >= 2");
  if (!surface.in_bounds(start) || !surface.in_bounds(goal))
    throw std::invalid_argument("grid_minimax_barrier: start/goal out of bounds");

  const int n = resolution;
  const double wx = (surface.hi[0] - surface.lo[0]) / n;
  const double wy = (surface.hi[1] - surface.lo[1]) / n;
  auto cell_of = [&](const Vec& p) {
    int i = std::clamp(static_cast<int>((p[0] - surface.lo[0]) / wx), 0, n - 1);
    int j = std::clamp(static_cast<int>((p[1] - surface.lo[1]) / wy), 0, n - 1);
    return std::array<int, 2>{i, j};
  };
  auto index = [n](int i, int j) { return static_cast<int64_t>(i) * n + j; };

  std::vector<double> cell_energy(static_cast<size_t>(n) * n);
  {
    Vec p(2);
    for (int i = 0; i < n; ++i) {
      p[0] = surface.lo[0] + (i + 0.5) * wx;
      for (int j = 0; j < n; ++j) {
        p[1] = surface.lo[1] + (j + 0.5) * wy;
        cell_energy[index(i, j)] = surface.energy(p);
      }
    }
  }

  const auto start_cell = cell_of(start);
  const auto goal_cell = cell_of(goal);
  const int64_t src = index(start_cell[0], start_cell[1]);
  const int64_t dst = index(goal_cell[0], goal_cell[1]);

  // Bottleneck Dijkstra: value[v] = min over paths of max cell energy.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> value(cell_energy.size(), kInf);
  std::vector<int64_t> parent(cell_energy.size(), -1);
  std::vector<uint8_t> settled(cell_energy.size(), 0);
  using Entry = std::pair<double, int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  value[src] = cell_energy[src];
  heap.emplace(value[src], src);
  while (!heap.empty()) {
    const auto [val, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u == dst) break;
    const int ui = static_cast<int>(u / n), uj = static_cast<int>(u % n);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int vi = ui + di, vj = uj + dj;
        if (vi < 0 || vi >= n || vj < 0 || vj >= n) continue;
        const int64_t v = index(vi, vj);
        if (settled[v]) continue;
        const double cand = std::max(val, cell_energy[v]);
        if (cand < value[v]) {
          value[v] = cand;
          parent[v] = u;
          heap.emplace(cand, v);
        }
      }
    }
  }

  // Walk the optimal path back to find the bottleneck cell.
  BarrierResult result;
  result.resolution = n;
  result.saddle_energy = value[dst];
  int64_t argmax = dst;
  for (int64_t v = dst; v != -1; v = parent[v]) {
    if (cell_energy[v] > cell_energy[argmax]) argmax = v;
  }
  result.saddle_cell = {static_cast<int>(argmax / n), static_cast<int>(argmax % n)};
  return result;
}

}  // namespace mepsac
