#pragma once

// Discrete energy, total species mass and the dissipation terms of one step,
// plus the per-step CSV ledger.

#include <array>
#include <fstream>
#include <string>

#include "pfreact/boundary.hpp"
#include "pfreact/physics.hpp"
#include "pfreact/scheme.hpp"

namespace pfreact {

struct Dissipation {
  double viscous = 0.0;
  double phase = 0.0;
  std::array<double, 3> species{0.0, 0.0, 0.0};
  double reaction = 0.0;

  double total() const { return viscous + phase + species[0] + species[1] + species[2] + reaction; }
};

struct EnergyReport {
  double kinetic = 0.0;
  double mixing = 0.0;
  std::array<double, 3> entropy{0.0, 0.0, 0.0};
  double penalty = 0.0;
  double adhesion = 0.0;
  double total = 0.0;
  double mass_total = 0.0;
  Dissipation dissipation;
};

EnergyReport energy(const State& s, const PhysParams& p, const GridSpec& g);

/// Dissipation of the step old -> new with the coefficients frozen as in the
/// scheme (D1 and lambda from the old level). Moving walls enter the viscous
/// term through their ghost values.
Dissipation dissipation(const State& old, const State& next, const PhysParams& p, const BoundaryPlan& bc);
Dissipation dissipation(const State& old, const State& next, const PhysParams& p, const GridSpec& g);

/// Discrete sum of |grad u|^2 over both velocity components paired as
/// <-Lap_h u, u>, with no-slip ghosts (moving at the plan's tangential speed).
double velocity_grad_sq(const FaceField& u, const BoundaryPlan& bc);

/// Net inflow of each species through open boundary faces during the step
/// (advective plus Dirichlet diffusive flux), integrated over the boundary.
std::array<double, 3> boundary_inflow(const State& old, const State& next, const PhysParams& p,
                                      const BoundaryPlan& bc);

class DiagnosticsWriter {
 public:
  /// Opens path and writes the header; throws std::runtime_error on failure.
  explicit DiagnosticsWriter(const std::string& path);
  void write(double t, double dt, const EnergyReport& e, int newton_iters, double residual);
  int rows() const { return rows_; }

  static const char* header();

 private:
  std::ofstream out_;
  std::string path_;
  int rows_ = 0;
};

}  // namespace pfreact
