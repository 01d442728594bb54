#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

namespace mepsac {

using Vec = Eigen::VectorXd;

// An analytic d-dimensional energy surface on a rectangular bounds box.
// Evaluator and gradient are pure and deterministic; safe to call from
// any number of threads.
struct PotentialSurface {
  std::string id;  // registry name; empty for ad-hoc surfaces
  int dim = 0;
  Vec lo, hi;  // per-dimension closed bounds, length dim
  std::function<double(const Vec&)> energy;
  std::function<Vec(const Vec&)> gradient;

  bool in_bounds(const Vec& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

// Four-Gaussian sum, V(x,y) = sum_i W_i exp(a_i(x-xb_i)^2
//   + b_i(x-xb_i)(y-yb_i) + c_i(y-yb_i)^2).
struct MuellerBrownParams {
  std::array<double, 4> W{-200.0, -100.0, -170.0, 15.0};
  std::array<double, 4> a{-1.0, -1.0, -6.5, 0.7};
  std::array<double, 4> b{0.0, 0.0, 11.0, 0.6};
  std::array<double, 4> c{-10.0, -10.0, -6.5, 0.7};
  std::array<double, 4> xbar{1.0, 0.0, -0.5, -1.0};
  std::array<double, 4> ybar{0.0, 0.5, 1.5, 1.0};
};

double eval_potential(const PotentialSurface& surface, const Vec& p);
Vec eval_gradient(const PotentialSurface& surface, const Vec& p);

PotentialSurface make_mueller_brown(const MuellerBrownParams& params = {});
PotentialSurface make_double_well();

// Lookup by string id ("mueller_brown", "double_well"); throws
// std::invalid_argument listing the known ids on an unknown name.
PotentialSurface surface_by_id(const std::string& id);
std::vector<std::string> known_surface_ids();

}  // namespace mepsac
