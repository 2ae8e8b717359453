#pragma once

#include <memory>
#include <string>

#include <Eigen/Sparse>

namespace pfreact {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LinearSolverKind { direct, iterative };

std::string to_string(LinearSolverKind k);
LinearSolverKind linear_solver_from_string(const std::string& s);

/// Sparse linear solver behind one contract: after solve(),
/// ||A x - b||_inf <= tol * max(1, ||b||_inf), else LinearSolveFailed.
/// direct: UMFPACK when available, Eigen::SparseLU otherwise.
/// iterative: BiCGSTAB preconditioned with incomplete LU (ILUT).
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverKind kind = LinearSolverKind::direct, double tol = 1e-10, int max_iter = 500);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Factorize (or build the preconditioner for) A. The symbolic analysis is
  /// reused while the sparsity pattern stays the same.
  void factorize(const SparseMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b);

  bool ready() const;
  void reset();
  int last_iterations() const;
  int factorizations() const;
  static std::string backend_name(LinearSolverKind kind);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pfreact
