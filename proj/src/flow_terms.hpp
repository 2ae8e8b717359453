#pragma once

// Shared assembly pieces for the staggered momentum/continuity block and for
// face-flux loops of cell-centered transport equations. Every term writes its
// residual contribution and, when a triplet list is attached, its exact
// partial derivatives, so residual and Jacobian come from one code path.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pfreact/boundary.hpp"
#include "pfreact/dof_map.hpp"

namespace pfreact::detail {

struct Assembly {
  Eigen::VectorXd& r;
  std::vector<Eigen::Triplet<double>>* jac = nullptr;

  void add(int row, double v) { r[row] += v; }
  void d(int row, int col, double v) {
    if (jac) jac->emplace_back(row, col, v);
  }
};

inline int wrap(int k, int n) { return ((k % n) + n) % n; }

inline Side low_side(int d) { return d == 0 ? Side::left : Side::bottom; }
inline Side high_side(int d) { return d == 0 ? Side::right : Side::top; }

/// Momentum rows without body forces, plus continuity rows. With gauge set,
/// the continuity row of cell 0 pins p there to zero (a dense mean row would
/// wreck the fill of the direct factorization).
void assemble_flow(const DofMap& m, const BoundaryPlan& bc, const FaceField& u_old, const Eigen::VectorXd& x,
                   double dt, double time_coef, double visc_coef, bool gauge, Assembly& A);

/// Visit every momentum row that carries body forces: (row, left cell,
/// right cell, normal spacing). Boundary, alias and outlet rows are skipped.
template <class F>
void for_each_forced_face(const DofMap& m, F&& f) {
  for (int d = 0; d < 2; ++d) {
    const int na = m.n_normal(d), nb = m.n_tangent(d);
    const bool periodic = m.bc_normal(d) == AxisBc::periodic;
    const int a_lo = periodic ? 0 : 1, a_hi = periodic ? na - 1 : na - 1;
    for (int b = 0; b < nb; ++b)
      for (int a = a_lo; a <= a_hi; ++a)
        f(m.face(d, a, b), m.cell_at(d, wrap(a - 1, na), b), m.cell_at(d, a, b), m.h_normal(d));
  }
}

/// Visit the faces of the cell-centered control volumes. interior(face dof,
/// left cell, right cell, h) for faces between two cells; boundary(face dof,
/// cell, face bc, low side?, h) for open (inflow/outlet) boundary faces.
/// Wall faces carry no flux and are not visited.
template <class In, class Bd>
void for_each_scalar_face(const DofMap& m, const BoundaryPlan& bc, In&& interior, Bd&& boundary) {
  for (int d = 0; d < 2; ++d) {
    const int na = m.n_normal(d), nb = m.n_tangent(d);
    const double h = m.h_normal(d);
    if (m.bc_normal(d) == AxisBc::periodic) {
      for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a)
          interior(m.face(d, a, b), m.cell_at(d, wrap(a - 1, na), b), m.cell_at(d, a, b), h);
      continue;
    }
    const auto& lo = bc.side(low_side(d));
    const auto& hi = bc.side(high_side(d));
    for (int b = 0; b < nb; ++b) {
      for (int a = 1; a < na; ++a) interior(m.face(d, a, b), m.cell_at(d, a - 1, b), m.cell_at(d, a, b), h);
      if (lo[b].kind != VelocityBc::wall || lo[b].c1_dirichlet)
        boundary(m.face(d, 0, b), m.cell_at(d, 0, b), lo[b], true, h);
      if (hi[b].kind != VelocityBc::wall || hi[b].c1_dirichlet)
        boundary(m.face(d, na, b), m.cell_at(d, na - 1, b), hi[b], false, h);
    }
  }
}

}  // namespace pfreact::detail
