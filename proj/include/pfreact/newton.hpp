#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pfreact/linear_solver.hpp"

namespace pfreact {

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;
using JacobianFn = std::function<void(const Eigen::VectorXd& x, SparseMatrix& jac)>;
/// Largest admissible step fraction in (0, 1] along dx; 0 means none.
using StepLimiter = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& dx)>;

struct NewtonOptions {
  double tol = 1e-10;  // on ||F||_inf
  int max_iter = 50;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-10;
  /// Keep a factorization across iterations (and across calls sharing the
  /// solver) until the residual contraction degrades past refresh_ratio.
  bool reuse_jacobian = false;
  double refresh_ratio = 0.2;
};

struct NewtonResult {
  int iterations = 0;
  double residual = 0.0;
  int linear_iterations = 0;
  int factorizations = 0;
};

/// Damped Newton with Armijo backtracking on ||F||_2. The limiter keeps
/// iterates admissible. Throws NewtonDiverged when no descent step is found
/// with a fresh Jacobian or max_iter is exhausted; PositivityLost when the
/// limiter admits no step.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                          const NewtonOptions& opts, LinearSolver& solver, const StepLimiter& limiter = {});

/// Central-difference Jacobian on the sparsity pattern of `pattern`, with
/// columns grouped by a greedy coloring. Rows with more than
/// `dense_row_limit` entries are excluded from the coloring and keep the
/// values found in `pattern`.
SparseMatrix fd_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, const SparseMatrix& pattern,
                         int dense_row_limit = 64);

}  // namespace pfreact
