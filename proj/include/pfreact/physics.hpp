#pragma once

// Constitutive functions and chemical potentials of the dimensionless
// membrane reaction-transport model.

#include <string>

#include "pfreact/mesh.hpp"

namespace pfreact {

enum class QMode { constant, affine };

std::string to_string(QMode q);
QMode q_mode_from_string(const std::string& s);

/// Every dimensionless model constant. Defaults are the standard run
/// settings (Re = Pe = 1, mobility 0.05, eps = 0.04, S = 4, a = (1, 1, 2)).
struct PhysParams {
  double re = 1.0;
  double pe = 1.0;
  double mobility = 0.05;
  double d2 = 1.0;
  double d3 = 1.0;
  double d1_plus = 1.0;
  double d1_minus = 1.0;
  double m_pen = 1.0;   // penalty M
  double n_adh = 1.0;   // adhesion N
  double k_rate = 1.0;  // prefactor of the proliferation function
  double eps = 0.04;
  double lambda0 = 0.05;
  double s_stab = 4.0;
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 2.0;
  double f_trunc = 1.2;  // radius beyond which the double well grows quadratically
  QMode q_mode = QMode::constant;
  double q0 = 1.0;

  /// max |F''| of the truncated double well, 3 r^2 - 1.
  double lipschitz() const { return 3.0 * f_trunc * f_trunc - 1.0; }

  /// Throws std::invalid_argument on any violated constraint. The reduced
  /// system additionally needs s_stab > 2 L.
  void validate(bool reduced = false) const;

  bool operator==(const PhysParams&) const = default;
};

struct PotentialEval {
  double value;
  double d1;
  double d2;
};

double lambda_of(double c3, const PhysParams& p);
double dlambda(const PhysParams& p);

/// Truncated double well: (phi^2-1)^2/4 inside [-r, r], quadratic outside.
PotentialEval f_trunc(double phi, double r);
inline PotentialEval f_trunc(double phi, const PhysParams& p) { return f_trunc(phi, p.f_trunc); }

/// k (phi^2-1)^2 on [-1, 1], zero elsewhere.
double proliferation(double phi, double k);

inline constexpr double kPermeabilityFloor = 1e-2;

/// Membrane permeability at a cell from the old-level c3 (affine law floored
/// at kPermeabilityFloor).
double permeability(double c3, const PhysParams& p);

/// Effective diffusivity of species 1 across the diffuse membrane.
/// phi is clamped to [-1, 1] inside the resistance formula. Throws on q <= 0.
double d1_of(double phi, double q, const PhysParams& p);

/// Difference quotient (lambda(c_new) - lambda(c_old)) / (c_new - c_old),
/// falling back to the derivative when the increment is below 1e-12.
double lambda_quotient(double c3_new, double c3_old, const PhysParams& p);

ScalarField mu_phi_scheme(const ScalarField& phi_new, const ScalarField& phi_old, const ScalarField& c2_new,
                          const ScalarField& c3_new, const ScalarField& c2_old, const ScalarField& c3_old,
                          const PhysParams& p, const GridSpec& g);

ScalarField mu1_scheme(const ScalarField& c1_new);
ScalarField mu2_scheme(const ScalarField& c2_new, const ScalarField& phi_old, const ScalarField& phi_new,
                       const PhysParams& p);
ScalarField mu3_scheme(const ScalarField& c3_new, const ScalarField& c3_old, const ScalarField& phi_new,
                       const ScalarField& phi_old, const PhysParams& p, const GridSpec& g);

/// Cellwise P(phi_old) (a1 mu1 + a2 mu2 - a3 mu3). Species i consumes it
/// with weight -a1, -a2, +a3.
ScalarField reaction_rate(const ScalarField& phi_old, const ScalarField& mu1, const ScalarField& mu2,
                          const ScalarField& mu3, const PhysParams& p);

}  // namespace pfreact
