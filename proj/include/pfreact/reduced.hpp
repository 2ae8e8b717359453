#pragma once

// Simplified system: Cahn-Hilliard-Navier-Stokes with a single species that
// diffuses, is advected, and is consumed at the interface by P(phi) ln(c+1).
// Same staggered grid, first-order implicit step and Newton machinery as the
// full scheme, plus a self-convergence harness in time.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pfreact/boundary.hpp"
#include "pfreact/dof_map.hpp"
#include "pfreact/linear_solver.hpp"
#include "pfreact/mesh.hpp"
#include "pfreact/scheme.hpp"

namespace pfreact {

struct ReducedParams {
  double re = 1.0;
  double mobility = 0.05;
  double eps = 0.04;
  double s_stab = 8.0;
  double f_trunc = 1.2;
  double k_rate = 1.0;
  double diffusivity = 1.0;

  double lipschitz() const { return 3.0 * f_trunc * f_trunc - 1.0; }
  /// Throws std::invalid_argument; requires s_stab > 2 L.
  void validate() const;

  bool operator==(const ReducedParams&) const = default;
};

struct ReducedState {
  double t = 0.0;
  FaceField u;
  ScalarField p, phi, mu, c;

  explicit ReducedState(const GridSpec& g) : u(g), p(g), phi(g), mu(g), c(g) {}
  ReducedState() = default;
};

/// mu = -eps^2 Lap phi + F'(phi) with the state as both levels.
void set_consistent_potential(ReducedState& s, const ReducedParams& p, const GridSpec& g);

/// Kinetic + eps^2/2 |grad phi|^2 + F(phi) + (c+1)(ln(c+1)-1), integrated.
double reduced_energy(const ReducedState& s, const ReducedParams& p, const GridSpec& g);

class ReducedSystem {
 public:
  enum Field { kPhi = 0, kMu, kC, kFieldCount };

  ReducedSystem(const ReducedState& old, const ReducedParams& p, const SchemeConfig& cfg, const BoundaryPlan& bc);

  const DofMap& dofs() const { return map_; }
  Eigen::VectorXd pack(const ReducedState& s) const;
  ReducedState unpack(const Eigen::VectorXd& x) const;

  void residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const;
  void jacobian(const Eigen::VectorXd& x, SparseMatrix& jac) const;
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const;

 private:
  void assemble(const Eigen::VectorXd& x, Eigen::VectorXd& r, std::vector<Eigen::Triplet<double>>* jac) const;

  ReducedState old_;
  ReducedParams p_;
  SchemeConfig cfg_;
  BoundaryPlan bc_;
  DofMap map_;
  bool gauge_;
};

class ReducedStepper {
 public:
  ReducedStepper(const ReducedParams& p, const SchemeConfig& cfg, const GridSpec& g);
  std::pair<ReducedState, StepReport> step(const ReducedState& old);

 private:
  ReducedParams p_;
  SchemeConfig cfg_;
  BoundaryPlan bc_;
  LinearSolver solver_;
};

std::pair<ReducedState, StepReport> reduced_step(const ReducedState& old, const ReducedParams& p,
                                                 const SchemeConfig& cfg, const GridSpec& g);

/// Error table of a dt ladder against a fine reference. Orders between
/// consecutive rows are log2(e_k / e_{k+1}) / log2(dt_k / dt_{k+1}).
struct RateTable {
  std::vector<std::string> names;
  std::vector<double> dts;
  std::vector<std::vector<double>> errors;  // errors[row][column]

  /// Order of column c between rows r-1 and r (r >= 1).
  double order(std::size_t r, std::size_t c) const;
  /// Rows: dt, every error column, then order_<name> columns (empty on the first row).
  void write_csv(const std::string& path) const;
};

/// Smooth periodic initial data for the convergence harness: a divergence-free
/// cellular flow, a mild phase perturbation and a positive concentration.
ReducedState smooth_reduced_initial(const GridSpec& g, const ReducedParams& p);

/// Runs the ladder and a reference at reference_dt to time t_final. Columns:
/// err_u_H1, err_phi_H1, err_c_L2 at t_final; acc_u_H2, acc_p_H1,
/// acc_mu_H1semi, acc_c_H1semi accumulated as sqrt(dt sum_n ||.||^2) over the
/// coarse time levels n = 1..N. Throws std::invalid_argument when
/// reference_dt >= min(dts)/4 or a dt does not divide t_final into a whole
/// number of reference steps.
RateTable convergence_study(const GridSpec& g, const ReducedParams& p, const SchemeConfig& base,
                            const std::vector<double>& dts, double reference_dt, double t_final,
                            const ReducedState& initial);

}  // namespace pfreact
