#include "mepsac/potentials.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mepsac {

namespace {

void check_dim(const PotentialSurface& s, const Vec& p, const char* what) {
  if (p.size() != s.dim) {
    std::ostringstream msg;
    msg << what << ": point has dimension " << p.size() << ", surface expects "
        << s.dim;
    throw std::invalid_argument(msg.str());
  }
}

double mueller_brown_energy(const MuellerBrownParams& mb, double x, double y) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dx = x - mb.xbar[i];
    const double dy = y - mb.ybar[i];
    const double q = mb.a[i] * dx * dx + mb.b[i] * dx * dy + mb.c[i] * dy * dy;
    v += mb.W[i] * std::exp(q);
  }
  return v;
}

Vec mueller_brown_gradient(const MuellerBrownParams& mb, double x, double y) {
  double gx = 0.0, gy = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dx = x - mb.xbar[i];
    const double dy = y - mb.ybar[i];
    const double q = mb.a[i] * dx * dx + mb.b[i] * dx * dy + mb.c[i] * dy * dy;
    const double t = mb.W[i] * std::exp(q);
    gx += t * (2.0 * mb.a[i] * dx + mb.b[i] * dy);
    gy += t * (mb.b[i] * dx + 2.0 * mb.c[i] * dy);
  }
  Vec g(2);
  g << gx, gy;
  return g;
}

}  // namespace

double eval_potential(const PotentialSurface& surface, const Vec& p) {
  check_dim(surface, p, "eval_potential");
  return surface.energy(p);
}

Vec eval_gradient(const PotentialSurface& surface, const Vec& p) {
  check_dim(surface, p, "eval_gradient");
  return surface.gradient(p);
}

PotentialSurface make_mueller_brown(const MuellerBrownParams& params) {
  PotentialSurface s;
  s.id = "mueller_brown";
  s.dim = 2;
  s.lo = Vec(2);
  s.hi = Vec(2);
  s.lo << -1.70, -0.40;
  s.hi << 1.30, 2.10;
  s.energy = [params](const Vec& p) {
    return mueller_brown_energy(params, p[0], p[1]);
  };
  s.gradient = [params](const Vec& p) {
    return mueller_brown_gradient(params, p[0], p[1]);
  };
  return s;
}

PotentialSurface make_double_well() {
  PotentialSurface s;
  s.id = "double_well";
  s.dim = 2;
  s.lo = Vec(2);
  s.hi = Vec(2);
  s.lo << -2.0, -2.0;
  s.hi << 2.0, 2.0;
  // V(x,y) = (x^2-1)^2 + y^2: minima at (+-1,0), saddle (0,0) with V=1.
  s.energy = [](const Vec& p) {
    const double u = p[0] * p[0] - 1.0;
    return u * u + p[1] * p[1];
  };
  s.gradient = [](const Vec& p) {
    Vec g(2);
    g << 4.0 * p[0] * (p[0] * p[0] - 1.0), 2.0 * p[1];
    return g;
  };
  return s;
}

PotentialSurface surface_by_id(const std::string& id) {
  if (id == "mueller_brown") return make_mueller_brown();
  if (id == "double_well") return make_double_well();
  std::ostringstream msg;
  msg << "unknown surface id '" << id << "'; known surfaces:";
  for (const auto& known : known_surface_ids()) msg << " " << known;
  throw std::invalid_argument(msg.str());
}

std::vector<std::string> known_surface_ids() {
  return {"mueller_brown", "double_well"};
}

}  // namespace mepsac
