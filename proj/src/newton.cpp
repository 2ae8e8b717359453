#include "pfreact/newton.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <string>
#include <vector>

#include "pfreact/errors.hpp"

namespace pfreact {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                          const NewtonOptions& opts, LinearSolver& solver, const StepLimiter& limiter) {
  NewtonResult out;
  Eigen::VectorXd r(x.size());
  residual(x, r);
  out.residual = r.lpNorm<Eigen::Infinity>();
  if (out.residual <= opts.tol) return out;

  SparseMatrix jac;
  bool fresh = false;
  bool refresh = !(opts.reuse_jacobian && solver.ready());
  Eigen::VectorXd trial(x.size()), rt(x.size());

  for (int it = 1; it <= opts.max_iter; ++it) {
    out.iterations = it;
    if (refresh) {
      jacobian(x, jac);
      solver.factorize(jac);
      ++out.factorizations;
      fresh = true;
      refresh = false;
    }
    Eigen::VectorXd dx;
    try {
      dx = solver.solve(-r);
    } catch (const LinearSolveFailed&) {
      if (fresh) throw;
      refresh = true;
      continue;
    }
    out.linear_iterations += solver.last_iterations();

    double alpha = 1.0;
    if (limiter) {
      alpha = std::min(1.0, limiter(x, dx));
      if (!(alpha > 0.0)) {
        if (!fresh) {
          refresh = true;
          continue;
        }
        throw PositivityLost("Newton step admits no positivity-preserving length");
      }
    }

    const double f0 = r.norm();
    bool accepted = false;
    while (alpha >= opts.min_step) {
      trial = x + alpha * dx;
      bool ok = true;
      try {
        residual(trial, rt);
      } catch (const PositivityLost&) {
        ok = false;
      }
      if (ok && rt.allFinite() && rt.norm() <= (1.0 - opts.armijo * alpha) * f0) {
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) {
      if (!fresh) {
        refresh = true;
        continue;
      }
      throw NewtonDiverged("line search failed at Newton iteration " + std::to_string(it) +
                           " (residual " + sci(out.residual) + ")");
    }

    const double ratio = rt.norm() / f0;
    x.swap(trial);
    r.swap(rt);
    out.residual = r.lpNorm<Eigen::Infinity>();
    if (out.residual <= opts.tol) return out;
    fresh = false;
    refresh = !opts.reuse_jacobian || ratio > opts.refresh_ratio;
  }
  throw NewtonDiverged("Newton iteration limit reached (residual " + sci(out.residual) + ")");
}

}  // namespace pfreact

namespace pfreact {

SparseMatrix fd_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, const SparseMatrix& pattern,
                         int dense_row_limit) {
  const int n = static_cast<int>(x.size());
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = pattern;
  std::vector<char> dense(n, 0);
  for (int r = 0; r < n; ++r)
    dense[r] = (rows.outerIndexPtr()[r + 1] - rows.outerIndexPtr()[r]) > dense_row_limit;

  // greedy coloring: two columns conflict when they share a non-dense row
  std::vector<int> color(n, -1);
  std::vector<int> mark;
  int ncolors = 0;
  for (int c = 0; c < n; ++c) {
    mark.assign(ncolors + 1, -1);
    for (SparseMatrix::InnerIterator it(pattern, c); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (dense[r]) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(rows, r); jt; ++jt) {
        const int other = static_cast<int>(jt.col());
        if (other < c && color[other] >= 0) mark[color[other]] = c;
      }
    }
    int k = 0;
    while (k < ncolors && mark[k] == c) ++k;
    color[c] = k;
    ncolors = std::max(ncolors, k + 1);
  }

  std::vector<std::vector<int>> groups(ncolors);
  for (int c = 0; c < n; ++c) groups[color[c]].push_back(c);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pattern.nonZeros());
  Eigen::VectorXd xp(n), xm(n), rp(n), rm(n);
  std::vector<double> step(n);
  for (const auto& grp : groups) {
    xp = x;
    xm = x;
    for (int c : grp) {
      step[c] = 1e-6 * std::max(1.0, std::abs(x[c]));
      xp[c] += step[c];
      xm[c] -= step[c];
    }
    residual(xp, rp);
    residual(xm, rm);
    for (int c : grp)
      for (SparseMatrix::InnerIterator it(pattern, c); it; ++it) {
        const int r = static_cast<int>(it.row());
        const double v = dense[r] ? it.value() : (rp[r] - rm[r]) / (2.0 * step[c]);
        trip.emplace_back(r, c, v);
      }
  }
  SparseMatrix jac(n, n);
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

}  // namespace pfreact
