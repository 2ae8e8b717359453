#include "pfreact/linear_solver.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#ifdef PFREACT_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "pfreact/errors.hpp"

namespace pfreact {

std::string to_string(LinearSolverKind k) { return k == LinearSolverKind::direct ? "direct" : "iterative"; }

LinearSolverKind linear_solver_from_string(const std::string& s) {
  if (s == "direct") return LinearSolverKind::direct;
  if (s == "iterative") return LinearSolverKind::iterative;
  throw std::invalid_argument("unknown linear solver '" + s + "'");
}

#ifdef PFREACT_HAVE_UMFPACK
using DirectLU = Eigen::UmfPackLU<SparseMatrix>;
#else
using DirectLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif
using Krylov = Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>;

struct LinearSolver::Impl {
  LinearSolverKind kind;
  double tol;
  int max_iter;
  SparseMatrix a;
  std::vector<int> outer, inner;
  std::unique_ptr<DirectLU> lu;
  std::unique_ptr<Krylov> krylov;
  bool ready = false;
  int last_iters = 0;
  int factorizations = 0;

  bool same_pattern(const SparseMatrix& m) const {
    if (!lu || m.rows() != a.rows() || m.nonZeros() != static_cast<Eigen::Index>(inner.size())) return false;
    return std::equal(outer.begin(), outer.end(), m.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), m.innerIndexPtr());
  }
};

LinearSolver::LinearSolver(LinearSolverKind kind, double tol, int max_iter) : impl_(std::make_unique<Impl>()) {
  impl_->kind = kind;
  impl_->tol = tol;
  impl_->max_iter = max_iter;
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::ready() const { return impl_->ready; }
void LinearSolver::reset() { impl_->ready = false; }
int LinearSolver::last_iterations() const { return impl_->last_iters; }
int LinearSolver::factorizations() const { return impl_->factorizations; }

std::string LinearSolver::backend_name(LinearSolverKind kind) {
  if (kind == LinearSolverKind::iterative) return "bicgstab+ilut";
#ifdef PFREACT_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

void LinearSolver::factorize(const SparseMatrix& m) {
  Impl& s = *impl_;
  // The factorization objects keep a pointer to the matrix, so it must live
  // in the solver rather than in the caller.
  s.a = m;
  s.a.makeCompressed();
  const SparseMatrix& a = s.a;
  s.ready = false;
  if (s.kind == LinearSolverKind::direct) {
    if (!s.same_pattern(a)) {
      s.lu = std::make_unique<DirectLU>();
#ifdef PFREACT_HAVE_UMFPACK
      // The saddle-point rows have zero diagonals, which makes the automatic
      // strategy choose the symmetric path and fill in badly.
      s.lu->umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_UNSYMMETRIC;
      s.lu->umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
#endif
      s.lu->analyzePattern(a);
      s.outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
      s.inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
    }
    s.lu->factorize(a);
    if (s.lu->info() != Eigen::Success) throw LinearSolveFailed("sparse LU factorization failed (singular Jacobian?)");
  } else {
    s.krylov = std::make_unique<Krylov>();
    s.krylov->preconditioner().setDroptol(1e-6);
    s.krylov->preconditioner().setFillfactor(20);
    s.krylov->setTolerance(s.tol * 1e-2);
    s.krylov->setMaxIterations(s.max_iter);
    s.krylov->compute(a);
    if (s.krylov->info() != Eigen::Success) throw LinearSolveFailed("incomplete LU preconditioner failed");
  }
  s.ready = true;
  ++s.factorizations;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) {
  Impl& s = *impl_;
  if (!s.ready) throw LinearSolveFailed("solve called before factorize");
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd x;
  if (s.kind == LinearSolverKind::direct) {
    x = s.lu->solve(b);
    s.last_iters = 1;
    Eigen::VectorXd res = b - s.a * x;
    // one step of iterative refinement when the first solve is loose
    if (res.lpNorm<Eigen::Infinity>() > s.tol * scale) {
      x += s.lu->solve(res);
      res = b - s.a * x;
      ++s.last_iters;
    }
    if (!(res.lpNorm<Eigen::Infinity>() <= s.tol * scale))
      throw LinearSolveFailed("direct solve residual above tolerance");
  } else {
    x = s.krylov->solve(b);
    s.last_iters = static_cast<int>(s.krylov->iterations());
    const Eigen::VectorXd res = b - s.a * x;
    if (!(res.lpNorm<Eigen::Infinity>() <= s.tol * scale))
      throw LinearSolveFailed("Krylov solve did not reach tolerance");
  }
  return x;
}

}  // namespace pfreact
