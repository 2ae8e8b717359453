#include "flow_terms.hpp"

namespace pfreact::detail {

namespace {

// a * x[col] + c; col < 0 means a constant.
struct LinRef {
  int col;
  double coef;
  double cst;
  double eval(const Eigen::VectorXd& x) const { return (col >= 0 ? coef * x[col] : 0.0) + cst; }
};

// Adds w * ref to the row.
inline void term(Assembly& A, const Eigen::VectorXd& x, int row, double w, const LinRef& ref) {
  A.add(row, w * ref.eval(x));
  if (ref.col >= 0) A.d(row, ref.col, w * ref.coef);
}

struct Component {
  const DofMap& m;
  const BoundaryPlan& bc;
  const FaceField& u_old;
  int d;
  int na, nb;
  double hn, ht;
  bool per_n, per_t;

  Component(const DofMap& m_, const BoundaryPlan& bc_, const FaceField& uo, int d_)
      : m(m_),
        bc(bc_),
        u_old(uo),
        d(d_),
        na(m_.n_normal(d_)),
        nb(m_.n_tangent(d_)),
        hn(m_.h_normal(d_)),
        ht(m_.h_tangent(d_)),
        per_n(m_.bc_normal(d_) == AxisBc::periodic),
        per_t(m_.bc_tangent(d_) == AxisBc::periodic) {}

  // Old velocity of component c at (normal index a, tangent index b) in c's frame.
  double old(int c, int a, int b) const {
    const int nac = m.n_normal(c);
    if (m.bc_normal(c) == AxisBc::periodic && a == nac) a = 0;
    return c == 0 ? u_old.x(a, b) : u_old.y(b, a);
  }

  // Tangential neighbour of face (a, b) at tangent index b + step.
  LinRef tangent_neighbour(int a, int b, int step) const {
    const int bn = b + step;
    if (bn >= 0 && bn < nb) return {m.face(d, a, bn), 1.0, 0.0};
    if (per_t) return {m.face(d, a, wrap(bn, nb)), 1.0, 0.0};
    // ghost across a wall parallel to this component
    const Side side = (d == 0) ? (bn < 0 ? Side::bottom : Side::top) : (bn < 0 ? Side::left : Side::right);
    const auto& faces = bc.side(side);
    const int k1 = a - 1, k2 = a;
    const bool in1 = k1 >= 0 && k1 < static_cast<int>(faces.size());
    const bool in2 = k2 >= 0 && k2 < static_cast<int>(faces.size());
    const bool outlet = in1 && in2 && faces[k1].kind == VelocityBc::outlet && faces[k2].kind == VelocityBc::outlet;
    const int self = m.face(d, a, b);
    if (outlet) return {self, 1.0, 0.0};
    return {self, -1.0, 2.0 * bc.tangential(side)};
  }

  // Old velocity of the other component on the corner face of the momentum
  // control volume, averaged over the cells at normal indices c1 and c2.
  double corner_advecting(int b_corner, int c1, int c2) const {
    const int e = 1 - d;
    int be = b_corner;  // normal index of the other component
    if (per_t) be = wrap(be, nb);
    return 0.5 * (old(e, be, c1) + old(e, be, c2));
  }
};

void momentum_interior(const Component& C, const Eigen::VectorXd& x, int a, int b, double dt, double tc, double vc,
                       Assembly& A) {
  const DofMap& m = C.m;
  const int row = m.face(C.d, a, b);
  const int na = C.na;
  const int a_prev = C.per_n ? wrap(a - 1, na) : a - 1;
  const int a_next = C.per_n ? wrap(a + 1, na) : a + 1;
  const int cl = C.per_n ? wrap(a - 1, na) : a - 1;  // cells on either side
  const int cr = a;
  const LinRef self{row, 1.0, 0.0};
  const LinRef prev{m.face(C.d, a_prev, b), 1.0, 0.0};
  const LinRef next{m.face(C.d, a_next, b), 1.0, 0.0};
  const LinRef north = C.tangent_neighbour(a, b, +1);
  const LinRef south = C.tangent_neighbour(a, b, -1);

  // time derivative
  term(A, x, row, tc / dt, self);
  A.add(row, -tc / dt * C.old(C.d, a, b));

  // energy-conserving convection in divergence form
  const double ue = 0.5 * (C.old(C.d, a, b) + C.old(C.d, a_next, b));
  const double uw = 0.5 * (C.old(C.d, a_prev, b) + C.old(C.d, a, b));
  term(A, x, row, tc * ue * 0.5 / C.hn, self);
  term(A, x, row, tc * ue * 0.5 / C.hn, next);
  term(A, x, row, -tc * uw * 0.5 / C.hn, prev);
  term(A, x, row, -tc * uw * 0.5 / C.hn, self);
  const double vn = C.corner_advecting(b + 1, cl, cr);
  const double vs = C.corner_advecting(b, cl, cr);
  term(A, x, row, tc * vn * 0.5 / C.ht, self);
  term(A, x, row, tc * vn * 0.5 / C.ht, north);
  term(A, x, row, -tc * vs * 0.5 / C.ht, south);
  term(A, x, row, -tc * vs * 0.5 / C.ht, self);

  // viscous term
  const double ihn2 = 1.0 / (C.hn * C.hn), iht2 = 1.0 / (C.ht * C.ht);
  term(A, x, row, -vc * ihn2, next);
  term(A, x, row, -vc * ihn2, prev);
  term(A, x, row, 2.0 * vc * ihn2, self);
  term(A, x, row, -vc * iht2, north);
  term(A, x, row, -vc * iht2, south);
  term(A, x, row, 2.0 * vc * iht2, self);

  // pressure gradient
  const int pl = m.p(m.cell_at(C.d, cl, b)), pr = m.p(m.cell_at(C.d, cr, b));
  A.add(row, (x[pr] - x[pl]) / C.hn);
  A.d(row, pr, 1.0 / C.hn);
  A.d(row, pl, -1.0 / C.hn);
}

// Pressure outlet: zero normal derivative of velocity, p = 0 on the boundary.
void momentum_outlet(const Component& C, const Eigen::VectorXd& x, int a, int b, double dt, double tc, double vc,
                     Assembly& A) {
  const DofMap& m = C.m;
  const int row = m.face(C.d, a, b);
  const bool high = a == C.na;
  const int ai = high ? C.na - 1 : 0;     // adjacent cell
  const int a_in = high ? a - 1 : a + 1;  // inner neighbour face
  const LinRef self{row, 1.0, 0.0};
  const LinRef inner_face{m.face(C.d, a_in, b), 1.0, 0.0};
  const LinRef north = C.tangent_neighbour(a, b, +1);
  const LinRef south = C.tangent_neighbour(a, b, -1);

  term(A, x, row, tc / dt, self);
  A.add(row, -tc / dt * C.old(C.d, a, b));

  // convection: the ghost cell copies the boundary face
  const double u_ghost = C.old(C.d, a, b);
  const double u_mid = 0.5 * (C.old(C.d, a, b) + C.old(C.d, a_in, b));
  const double sgn = high ? 1.0 : -1.0;  // outward side carries the ghost flux
  term(A, x, row, sgn * tc * u_ghost / C.hn, self);
  term(A, x, row, -sgn * tc * u_mid * 0.5 / C.hn, self);
  term(A, x, row, -sgn * tc * u_mid * 0.5 / C.hn, inner_face);
  const double vn = C.corner_advecting(b + 1, ai, ai);
  const double vs = C.corner_advecting(b, ai, ai);
  term(A, x, row, tc * vn * 0.5 / C.ht, self);
  term(A, x, row, tc * vn * 0.5 / C.ht, north);
  term(A, x, row, -tc * vs * 0.5 / C.ht, south);
  term(A, x, row, -tc * vs * 0.5 / C.ht, self);

  const double ihn2 = 1.0 / (C.hn * C.hn), iht2 = 1.0 / (C.ht * C.ht);
  term(A, x, row, -vc * ihn2, inner_face);
  term(A, x, row, vc * ihn2, self);
  term(A, x, row, -vc * iht2, north);
  term(A, x, row, -vc * iht2, south);
  term(A, x, row, 2.0 * vc * iht2, self);

  const int p_in = m.p(m.cell_at(C.d, ai, b));
  const double g = high ? -2.0 / C.hn : 2.0 / C.hn;
  A.add(row, g * x[p_in]);
  A.d(row, p_in, g);
}

}  // namespace

void assemble_flow(const DofMap& m, const BoundaryPlan& bc, const FaceField& u_old, const Eigen::VectorXd& x,
                   double dt, double time_coef, double visc_coef, bool gauge, Assembly& A) {
  for (int d = 0; d < 2; ++d) {
    const Component C(m, bc, u_old, d);
    for (int b = 0; b < C.nb; ++b) {
      for (int a = 0; a <= C.na; ++a) {
        const int row = m.face(d, a, b);
        if (C.per_n) {
          if (a == C.na) {
            const int src = m.face(d, 0, b);
            A.add(row, x[row] - x[src]);
            A.d(row, row, 1.0);
            A.d(row, src, -1.0);
          } else {
            momentum_interior(C, x, a, b, dt, time_coef, visc_coef, A);
          }
          continue;
        }
        if (a == 0 || a == C.na) {
          const FaceBc& fb = bc.side(a == 0 ? low_side(d) : high_side(d))[b];
          if (fb.kind == VelocityBc::outlet) {
            momentum_outlet(C, x, a, b, dt, time_coef, visc_coef, A);
          } else {
            A.add(row, x[row] - (fb.kind == VelocityBc::inflow ? fb.normal_velocity : 0.0));
            A.d(row, row, 1.0);
          }
          continue;
        }
        momentum_interior(C, x, a, b, dt, time_coef, visc_coef, A);
      }
    }
  }

  // continuity
  const GridSpec& g = m.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int k = m.cell(i, j);
      const int row = m.p(k);
      if (gauge && k == 0) continue;
      const int ie = (g.bc_x == AxisBc::periodic && i + 1 == g.nx) ? 0 : i + 1;
      const int jn = (g.bc_y == AxisBc::periodic && j + 1 == g.ny) ? 0 : j + 1;
      const int e = m.ux(ie, j), w = m.ux(i, j), n = m.uy(i, jn), s = m.uy(i, j);
      A.add(row, (x[e] - x[w]) * ihx + (x[n] - x[s]) * ihy);
      A.d(row, e, ihx);
      A.d(row, w, -ihx);
      A.d(row, n, ihy);
      A.d(row, s, -ihy);
    }
  }
  if (gauge) {
    const int row = m.p(0);
    A.add(row, x[row]);
    A.d(row, row, 1.0);
  }
}

}  // namespace pfreact::detail
