#pragma once

// Monolithic first-order implicit step of the coupled flow / phase-field /
// three-species system. All ten fields at the new level are unknowns of one
// nonlinear system solved by damped Newton; incompressibility enters as a
// saddle-point constraint with a pressure gauge row.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pfreact/boundary.hpp"
#include "pfreact/dof_map.hpp"
#include "pfreact/linear_solver.hpp"
#include "pfreact/mesh.hpp"
#include "pfreact/newton.hpp"
#include "pfreact/physics.hpp"

namespace pfreact {

struct State {
  double t = 0.0;
  FaceField u;
  ScalarField p, phi, c1, c2, c3, mu_phi, mu1, mu2, mu3;

  explicit State(const GridSpec& g)
      : u(g), p(g), phi(g), c1(g), c2(g), c3(g), mu_phi(g), mu1(g), mu2(g), mu3(g) {}
  State() = default;

  bool operator==(const State&) const = default;
};

enum class JacobianMode { analytic, finite_difference };

std::string to_string(JacobianMode m);
JacobianMode jacobian_mode_from_string(const std::string& s);

struct SchemeConfig {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max = 50;
  double c_floor = 1e-8;
  double lin_tol = 1e-10;
  int lin_max = 500;
  JacobianMode jac_mode = JacobianMode::analytic;
  LinearSolverKind lin_solver = LinearSolverKind::direct;
  bool reuse_jacobian = true;

  void validate() const;
  NewtonOptions newton_options() const;

  bool operator==(const SchemeConfig&) const = default;
};

struct StepReport {
  int newton_iterations = 0;
  double residual = 0.0;
  int linear_iterations = 0;
  int factorizations = 0;
  double wall_seconds = 0.0;
};

/// Recompute the four chemical potentials of s from its own fields, taking
/// the state as both old and new level (used for initial data).
void set_consistent_potentials(State& s, const PhysParams& p, const GridSpec& g);

/// The discrete nonlinear system of one time step from a fixed old state.
class MonolithicSystem {
 public:
  enum Field { kPhi = 0, kMuPhi, kC1, kC2, kC3, kMu1, kMu2, kMu3, kFieldCount };

  MonolithicSystem(const State& old, const PhysParams& p, const SchemeConfig& cfg, const BoundaryPlan& bc);

  const DofMap& dofs() const { return map_; }
  Eigen::VectorXd pack(const State& s) const;
  State unpack(const Eigen::VectorXd& x) const;

  /// Throws PositivityLost when some c + 1 < c_floor.
  void residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const;
  void jacobian(const Eigen::VectorXd& x, SparseMatrix& jac) const;
  /// Colored central-difference Jacobian on the analytic sparsity pattern.
  void jacobian_fd(const Eigen::VectorXd& x, SparseMatrix& jac) const;
  /// Largest step fraction keeping c + 1 >= c_floor.
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const;

  bool gauged() const { return gauge_; }

 private:
  void assemble(const Eigen::VectorXd& x, Eigen::VectorXd& r, std::vector<Eigen::Triplet<double>>* jac) const;

  State old_;
  PhysParams p_;
  SchemeConfig cfg_;
  BoundaryPlan bc_;
  DofMap map_;
  bool gauge_;
  // old-level coefficients, one entry per cell
  std::vector<double> lam_, d1_, prolif_, fprime_, adh_, mphi2_;
};

Eigen::VectorXd residual(const State& old, const State& guess, const PhysParams& p, const SchemeConfig& cfg,
                         const GridSpec& g);
Eigen::VectorXd residual(const State& old, const State& guess, const PhysParams& p, const SchemeConfig& cfg,
                         const BoundaryPlan& bc);

/// Advances one step; keeps a linear solver so factorizations can be reused
/// across steps with equal dt.
class Stepper {
 public:
  Stepper(const PhysParams& p, const SchemeConfig& cfg, const BoundaryPlan& bc);
  std::pair<State, StepReport> step(const State& old);

  const PhysParams& params() const { return p_; }
  const SchemeConfig& config() const { return cfg_; }
  const BoundaryPlan& boundary() const { return bc_; }

 private:
  PhysParams p_;
  SchemeConfig cfg_;
  BoundaryPlan bc_;
  LinearSolver solver_;
};

std::pair<State, StepReport> step(const State& old, const PhysParams& p, const SchemeConfig& cfg,
                                  const BoundaryPlan& bc);

}  // namespace pfreact
