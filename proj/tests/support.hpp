#pragma once

// Small fixtures shared by the unit tests: seeded random fields, discretely
// divergence-free velocities and grid shorthands.

#include <cmath>
#include <cstdlib>
#include <random>
#include <span>

#include "pfreact/mesh.hpp"
#include "pfreact/scheme.hpp"

namespace pfreact::testing {

inline unsigned test_seed() {
  if (const char* s = std::getenv("PFREACT_TEST_SEED")) return static_cast<unsigned>(std::strtoul(s, nullptr, 10));
  return 20240917u;
}

inline GridSpec grid(int nx, int ny, AxisBc bx, AxisBc by, double lx = 1.0, double ly = 1.0) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.bc_x = bx;
  g.bc_y = by;
  return g;
}

inline ScalarField random_scalar(const GridSpec& g, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField s(g);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = d(rng);
  return s;
}

/// Random face field; wall boundary faces are zeroed when interior_only is set.
inline FaceField random_face(const GridSpec& g, std::mt19937& rng, bool interior_only) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  FaceField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool boundary = i == 0 || i == g.nx;
      f.x(i, j) = (boundary && interior_only && g.bc_x == AxisBc::wall) ? 0.0 : d(rng);
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool boundary = j == 0 || j == g.ny;
      f.y(i, j) = (boundary && interior_only && g.bc_y == AxisBc::wall) ? 0.0 : d(rng);
    }
  sync_periodic(f, g);
  return f;
}

/// Velocity from a random nodal streamfunction: exactly divergence-free on
/// the staggered grid, with zero normal flux through walls.
inline FaceField random_solenoidal(const GridSpec& g, std::mt19937& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  const int px = g.nx + 1, py = g.ny + 1;
  std::vector<double> psi(static_cast<std::size_t>(px) * py, 0.0);
  auto at = [&](int i, int j) -> double& {
    if (g.bc_x == AxisBc::periodic) i %= g.nx;
    if (g.bc_y == AxisBc::periodic) j %= g.ny;
    return psi[static_cast<std::size_t>(j) * px + i];
  };
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool wall_node = (g.bc_x == AxisBc::wall && (i == 0 || i == g.nx)) ||
                             (g.bc_y == AxisBc::wall && (j == 0 || j == g.ny));
      if (!wall_node && (g.bc_x == AxisBc::wall || i < g.nx) && (g.bc_y == AxisBc::wall || j < g.ny))
        at(i, j) = d(rng);
    }
  FaceField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.x(i, j) = (at(i, j + 1) - at(i, j)) / g.hy();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.y(i, j) = -(at(i + 1, j) - at(i, j)) / g.hx();
  sync_periodic(u, g);
  return u;
}

inline double max_abs(const ScalarField& s) {
  double m = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) m = std::max(m, std::abs(s[k]));
  return m;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline ScalarField constant(const GridSpec& g, double v) { return ScalarField(g, v); }

/// u = 0, phi = phi0, uniform concentrations, potentials made consistent.
inline State uniform_state(const GridSpec& g, const PhysParams& p, double phi0, double c1, double c2, double c3) {
  State s(g);
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    s.phi[k] = phi0;
    s.c1[k] = c1;
    s.c2[k] = c2;
    s.c3[k] = c3;
  }
  set_consistent_potentials(s, p, g);
  return s;
}

}  // namespace pfreact::testing
