#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pfreact/errors.hpp"
#include "pfreact/linear_solver.hpp"
#include "pfreact/newton.hpp"
#include "support.hpp"

using namespace pfreact;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d) { return d.sparseView(); }

SparseMatrix tridiag(int n, double diag, double off) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, diag);
    if (i > 0) t.emplace_back(i, i - 1, off);
    if (i + 1 < n) t.emplace_back(i, i + 1, off * 0.5);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

TEST_CASE("direct and iterative solvers meet the residual contract") {
  const SparseMatrix a = tridiag(200, 4.0, -1.0);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(200, -1.0, 3.0);
  for (LinearSolverKind kind : {LinearSolverKind::direct, LinearSolverKind::iterative}) {
    LinearSolver s(kind, 1e-10, 500);
    CHECK_FALSE(s.ready());
    CHECK_THROWS_AS(s.solve(b), LinearSolveFailed);
    s.factorize(a);
    CHECK(s.ready());
    const Eigen::VectorXd x = s.solve(b);
    CHECK((a * x - b).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, b.lpNorm<Eigen::Infinity>()));
    // same pattern, new values
    s.factorize(2.0 * a);
    const Eigen::VectorXd y = s.solve(b);
    CHECK((y - 0.5 * x).norm() <= 1e-9);
    CHECK(s.factorizations() == 2);
    CHECK_FALSE(LinearSolver::backend_name(kind).empty());
  }
  CHECK(linear_solver_from_string(to_string(LinearSolverKind::iterative)) == LinearSolverKind::iterative);
  CHECK_THROWS(linear_solver_from_string("cholesky"));
}

TEST_CASE("a singular matrix is reported") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 1.0;
  d(2, 0) = 1.0;  // row 2 duplicates row 0 and column 2 is empty
  LinearSolver s;
  bool failed = false;
  try {
    s.factorize(from_dense(d));
    s.solve(Eigen::Vector3d(1.0, 2.0, 3.0));
  } catch (const LinearSolveFailed&) {
    failed = true;
  }
  CHECK(failed);
}

TEST_CASE("Newton on a scalar logarithm") {
  const ResidualFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r.resize(1);
    r[0] = std::log(x[0] + 1.0) - 0.5;
  };
  const JacobianFn j = [](const Eigen::VectorXd& x, SparseMatrix& m) {
    Eigen::MatrixXd d(1, 1);
    d(0, 0) = 1.0 / (x[0] + 1.0);
    m = from_dense(d);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  LinearSolver solver;
  NewtonOptions o;
  o.tol = 1e-12;
  const NewtonResult r = newton_solve(f, j, x, o, solver);
  CHECK(x[0] == doctest::Approx(std::exp(0.5) - 1.0).epsilon(1e-12));
  CHECK(x[0] == doctest::Approx(0.648721).epsilon(1e-6));
  CHECK(r.iterations <= 6);
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("Newton solves an affine map in one iteration") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, -1, 0, -1, 2;
  const Eigen::Vector3d b(1.0, -2.0, 0.5);
  const ResidualFn f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) { r = a * x - b; };
  const JacobianFn j = [&](const Eigen::VectorXd&, SparseMatrix& m) { m = from_dense(a); };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 10.0);
  LinearSolver solver;
  const NewtonResult r = newton_solve(f, j, x, NewtonOptions{}, solver);
  CHECK(r.iterations == 1);
  CHECK((a * x - b).norm() <= 1e-12);
}

TEST_CASE("a Jacobian of the wrong sign makes Newton diverge") {
  const ResidualFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r.resize(1);
    r[0] = std::log(x[0] + 1.0) - 0.5;
  };
  const JacobianFn j = [](const Eigen::VectorXd& x, SparseMatrix& m) {
    Eigen::MatrixXd d(1, 1);
    d(0, 0) = -1.0 / (x[0] + 1.0);
    m = from_dense(d);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  LinearSolver solver;
  CHECK_THROWS_AS(newton_solve(f, j, x, NewtonOptions{}, solver), NewtonDiverged);
}

TEST_CASE("the step limiter keeps iterates admissible") {
  // root at x = -0.9; a full first step from 0 would overshoot below -1
  const ResidualFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    if (x[0] + 1.0 <= 0.0) throw PositivityLost("x + 1 <= 0");
    r.resize(1);
    r[0] = std::log(x[0] + 1.0) - std::log(0.1);
  };
  const JacobianFn j = [](const Eigen::VectorXd& x, SparseMatrix& m) {
    Eigen::MatrixXd d(1, 1);
    d(0, 0) = 1.0 / (x[0] + 1.0);
    m = from_dense(d);
  };
  std::vector<double> seen;
  const StepLimiter lim = [&seen](const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
    seen.push_back(x[0]);
    const double floor = 1e-8;
    if (x[0] + dx[0] + 1.0 >= floor) return 1.0;
    return 0.99 * (x[0] + 1.0 - floor) / -dx[0];
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  LinearSolver solver;
  newton_solve(f, j, x, NewtonOptions{}, solver, lim);
  CHECK(x[0] == doctest::Approx(-0.9).epsilon(1e-10));
  for (double v : seen) CHECK(v > -1.0);

  const StepLimiter none = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; };
  Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(newton_solve(f, j, y, NewtonOptions{}, solver, none), PositivityLost);
}

TEST_CASE("Jacobian reuse still converges and saves factorizations") {
  const int n = 40;
  const ResidualFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r.resize(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double left = i > 0 ? x[i - 1] : 0.0, right = i + 1 < x.size() ? x[i + 1] : 0.0;
      r[i] = 3.0 * x[i] - left - right + 0.1 * x[i] * x[i] * x[i] - 1.0;
    }
  };
  const JacobianFn j = [](const Eigen::VectorXd& x, SparseMatrix& m) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < x.size(); ++i) {
      t.emplace_back(i, i, 3.0 + 0.3 * x[i] * x[i]);
      if (i > 0) t.emplace_back(i, i - 1, -1.0);
      if (i + 1 < x.size()) t.emplace_back(i, i + 1, -1.0);
    }
    m.resize(x.size(), x.size());
    m.setFromTriplets(t.begin(), t.end());
  };
  NewtonOptions o;
  o.tol = 1e-12;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = Eigen::VectorXd::Zero(n);
  LinearSolver s1, s2;
  const NewtonResult full = newton_solve(f, j, a, o, s1);
  o.reuse_jacobian = true;
  const NewtonResult reuse = newton_solve(f, j, b, o, s2);
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-11);
  CHECK(reuse.factorizations <= full.factorizations);
  CHECK(full.factorizations == full.iterations);
}

TEST_CASE("colored finite-difference Jacobian reproduces the analytic one") {
  const int n = 30;
  const ResidualFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r.resize(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double left = i > 0 ? x[i - 1] : 0.0, right = i + 1 < x.size() ? x[i + 1] : 0.0;
      r[i] = std::sin(x[i]) * right + left * left + std::exp(0.3 * x[i]);
    }
  };
  std::mt19937 rng(pfreact::testing::test_seed());
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = d(rng);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    const double right = i + 1 < n ? x[i + 1] : 0.0;
    t.emplace_back(i, i, std::cos(x[i]) * right + 0.3 * std::exp(0.3 * x[i]));
    if (i > 0) t.emplace_back(i, i - 1, 2.0 * x[i - 1]);
    if (i + 1 < n) t.emplace_back(i, i + 1, std::sin(x[i]));
  }
  SparseMatrix exact(n, n);
  exact.setFromTriplets(t.begin(), t.end());
  const SparseMatrix fd = fd_jacobian(f, x, exact);
  CHECK((Eigen::MatrixXd(fd) - Eigen::MatrixXd(exact)).cwiseAbs().maxCoeff() <= 1e-8);
}
