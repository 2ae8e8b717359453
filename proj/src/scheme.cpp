#include "pfreact/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "flow_terms.hpp"
#include "pfreact/errors.hpp"

namespace pfreact {

std::string to_string(JacobianMode m) { return m == JacobianMode::analytic ? "analytic" : "finite_difference"; }

JacobianMode jacobian_mode_from_string(const std::string& s) {
  if (s == "analytic") return JacobianMode::analytic;
  if (s == "finite_difference" || s == "finite-difference" || s == "fd") return JacobianMode::finite_difference;
  throw std::invalid_argument("unknown jacobian mode '" + s + "'");
}

void SchemeConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SchemeConfig: " + what); };
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (newton_max < 1) fail("newton_max must be at least 1");
  if (!(c_floor > 0.0) || !(c_floor < 1e-2)) fail("c_floor must lie in (0, 1e-2)");
  if (!(lin_tol > 0.0)) fail("lin_tol must be positive");
  if (lin_max < 1) fail("lin_max must be at least 1");
}

NewtonOptions SchemeConfig::newton_options() const {
  NewtonOptions o;
  o.tol = newton_tol;
  o.max_iter = newton_max;
  o.reuse_jacobian = reuse_jacobian;
  return o;
}

void set_consistent_potentials(State& s, const PhysParams& p, const GridSpec& g) {
  s.mu_phi = mu_phi_scheme(s.phi, s.phi, s.c2, s.c3, s.c2, s.c3, p, g);
  s.mu1 = mu1_scheme(s.c1);
  s.mu2 = mu2_scheme(s.c2, s.phi, s.phi, p);
  s.mu3 = mu3_scheme(s.c3, s.c3, s.phi, s.phi, p, g);
}

MonolithicSystem::MonolithicSystem(const State& old, const PhysParams& p, const SchemeConfig& cfg,
                                   const BoundaryPlan& bc)
    : old_(old), p_(p), cfg_(cfg), bc_(bc), map_(bc.grid(), kFieldCount), gauge_(!bc.has_outlet()) {
  const GridSpec& g = bc.grid();
  if (!old.phi.matches(g) || !old.u.matches(g)) throw std::invalid_argument("MonolithicSystem: state/grid mismatch");
  cfg.validate();
  const int n = g.cells();
  lam_.resize(n);
  d1_.resize(n);
  prolif_.resize(n);
  fprime_.resize(n);
  adh_.resize(n);
  mphi2_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double po = old.phi[k];
    lam_[k] = lambda_of(old.c3[k], p);
    d1_[k] = d1_of(po, permeability(old.c3[k], p), p);
    prolif_[k] = proliferation(po, p.k_rate);
    fprime_[k] = f_trunc(po, p).d1;
    adh_[k] = p.n_adh * (old.c2[k] + 1.0) + p.n_adh * (old.c3[k] + 1.0);
    mphi2_[k] = p.m_pen * po * po;
  }
}

Eigen::VectorXd MonolithicSystem::pack(const State& s) const {
  const GridSpec& g = map_.grid();
  Eigen::VectorXd x(map_.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) x[map_.ux(i, j)] = s.u.x(i, j);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) x[map_.uy(i, j)] = s.u.y(i, j);
  const ScalarField* f[kFieldCount] = {&s.phi, &s.mu_phi, &s.c1, &s.c2, &s.c3, &s.mu1, &s.mu2, &s.mu3};
  // the vector form pins p at cell 0; the state form has zero mean
  const double p_shift = gauge_ ? s.p[0] : 0.0;
  for (int k = 0; k < g.cells(); ++k) {
    x[map_.p(k)] = s.p[k] - p_shift;
    for (int q = 0; q < kFieldCount; ++q) x[map_.field(q, k)] = (*f[q])[k];
  }
  return x;
}

State MonolithicSystem::unpack(const Eigen::VectorXd& x) const {
  const GridSpec& g = map_.grid();
  State s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s.u.x(i, j) = x[map_.ux(i, j)];
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.u.y(i, j) = x[map_.uy(i, j)];
  ScalarField* f[kFieldCount] = {&s.phi, &s.mu_phi, &s.c1, &s.c2, &s.c3, &s.mu1, &s.mu2, &s.mu3};
  double p_mean = 0.0;
  if (gauge_) {
    for (int k = 0; k < g.cells(); ++k) p_mean += x[map_.p(k)];
    p_mean /= g.cells();
  }
  for (int k = 0; k < g.cells(); ++k) {
    s.p[k] = x[map_.p(k)] - p_mean;
    for (int q = 0; q < kFieldCount; ++q) (*f[q])[k] = x[map_.field(q, k)];
  }
  sync_periodic(s.u, g);
  s.t = old_.t + cfg_.dt;
  return s;
}

void MonolithicSystem::assemble(const Eigen::VectorXd& x, Eigen::VectorXd& r,
                                std::vector<Eigen::Triplet<double>>* jac) const {
  const GridSpec& g = map_.grid();
  const DofMap& m = map_;
  const PhysParams& p = p_;
  const double dt = cfg_.dt;
  const double eps2 = p.eps * p.eps;
  const int n = g.cells();
  r.setZero(m.size());
  detail::Assembly A{r, jac};

  auto F = [&](int f, int k) { return m.field(f, k); };
  auto val = [&](int f, int k) { return x[m.field(f, k)]; };

  for (int k = 0; k < n; ++k)
    for (int f : {kC1, kC2, kC3})
      if (!(val(f, k) + 1.0 >= cfg_.c_floor))
        throw PositivityLost("concentration fell below the positivity floor at cell " + std::to_string(k));

  detail::assemble_flow(m, bc_, old_.u, x, dt, p.re, 1.0, gauge_, A);

  // species diffusion coefficients D (c + 1) / Pe at the new level
  const double dcoef[3] = {0.0, p.d2, p.d3};
  auto coef = [&](int s, int k) { return (s == 0 ? d1_[k] : dcoef[s]) * (val(kC1 + s, k) + 1.0) / p.pe; };
  auto dcoef_dc = [&](int s, int k) { return (s == 0 ? d1_[k] : dcoef[s]) / p.pe; };

  std::vector<double> lam_q(n);
  for (int k = 0; k < n; ++k) lam_q[k] = lambda_quotient(val(kC3, k), old_.c3[k], p);

  // cellwise terms
  for (int k = 0; k < n; ++k) {
    const double phi = val(kPhi, k), po = old_.phi[k];
    const double dphi = phi - po;

    const int rphi = F(kPhi, k);
    A.add(rphi, dphi / dt);
    A.d(rphi, rphi, 1.0 / dt);

    // mu_phi = lam F'(phi_o) + lam S dphi + 2 phi pen - (phi_o^3 - phi_o) adh + S dphi adh - eps^2 div(lam grad phi)
    const int rmu = F(kMuPhi, k);
    const double c2 = val(kC2, k), c3 = val(kC3, k);
    const double pen = p.m_pen * (c2 + 1.0) + p.m_pen * (c3 + 1.0);
    const double rhs = lam_[k] * fprime_[k] + lam_[k] * p.s_stab * dphi + 2.0 * phi * pen -
                       (po * po * po - po) * adh_[k] + p.s_stab * dphi * adh_[k];
    A.add(rmu, val(kMuPhi, k) - rhs);
    A.d(rmu, rmu, 1.0);
    A.d(rmu, rphi, -(lam_[k] * p.s_stab + 2.0 * pen + p.s_stab * adh_[k]));
    A.d(rmu, F(kC2, k), -2.0 * phi * p.m_pen);
    A.d(rmu, F(kC3, k), -2.0 * phi * p.m_pen);

    // species: time derivative and reaction
    const double mu1 = val(kMu1, k), mu2 = val(kMu2, k), mu3 = val(kMu3, k);
    const double rate = prolif_[k] * (p.a1 * mu1 + p.a2 * mu2 - p.a3 * mu3);
    const double w[3] = {p.a1, p.a2, -p.a3};
    for (int s = 0; s < 3; ++s) {
      const int row = F(kC1 + s, k);
      const double c_old = s == 0 ? old_.c1[k] : (s == 1 ? old_.c2[k] : old_.c3[k]);
      A.add(row, (val(kC1 + s, k) - c_old) / dt + w[s] * rate);
      A.d(row, row, 1.0 / dt);
      A.d(row, F(kMu1, k), w[s] * prolif_[k] * p.a1);
      A.d(row, F(kMu2, k), w[s] * prolif_[k] * p.a2);
      A.d(row, F(kMu3, k), -w[s] * prolif_[k] * p.a3);
    }

    // potential definitions
    const double well = phi * phi - 1.0;
    const double adh_new = 0.25 * p.n_adh * well * well;
    const double dadh_new = p.n_adh * well * phi;
    for (int s = 0; s < 3; ++s) {
      const int row = F(kMu1 + s, k);
      const int col = F(kC1 + s, k);
      const double c = val(kC1 + s, k);
      double res = val(kMu1 + s, k) - std::log(c + 1.0);
      A.d(row, row, 1.0);
      A.d(row, col, -1.0 / (c + 1.0));
      if (s > 0) {
        res += -mphi2_[k] + adh_new;
        A.d(row, rphi, dadh_new);
      }
      if (s == 2) {
        // the gradient part of the mixing energy is added in the face loop
        const PotentialEval fw = f_trunc(phi, p);
        res -= lam_q[k] * fw.value;
        A.d(row, rphi, -lam_q[k] * fw.d1);
      }
      A.add(row, res);
    }
  }

  // faces between two cells
  auto interior = [&](int face, int L, int R, double h) {
    const double uf = x[face];
    // phase transport with the old phase field on faces
    {
      const double phio_f = 0.5 * (old_.phi[L] + old_.phi[R]);
      const double dmu = val(kMuPhi, R) - val(kMuPhi, L);
      const double flux = uf * phio_f - p.mobility * dmu / h;
      for (auto [cell, sg] : {std::pair{L, 1.0}, std::pair{R, -1.0}}) {
        const int row = F(kPhi, cell);
        A.add(row, sg * flux / h);
        A.d(row, face, sg * phio_f / h);
        A.d(row, F(kMuPhi, R), -sg * p.mobility / (h * h));
        A.d(row, F(kMuPhi, L), sg * p.mobility / (h * h));
      }
    }
    // interfacial term of mu_phi: + eps^2 div(lam_o grad phi)
    const double grad = (val(kPhi, R) - val(kPhi, L)) / h;
    {
      const double lam_f = 0.5 * (lam_[L] + lam_[R]);
      for (auto [cell, sg] : {std::pair{L, 1.0}, std::pair{R, -1.0}}) {
        const int row = F(kMuPhi, cell);
        A.add(row, sg * eps2 * lam_f * grad / h);
        A.d(row, F(kPhi, R), sg * eps2 * lam_f / (h * h));
        A.d(row, F(kPhi, L), -sg * eps2 * lam_f / (h * h));
      }
    }
    // gradient part of the mixing energy in mu3: each face gives half its
    // squared gradient to both neighbours
    for (int cell : {L, R}) {
      const int row = F(kMu3, cell);
      const double c = -lam_q[cell] * 0.5 * eps2;
      A.add(row, c * 0.5 * grad * grad);
      A.d(row, F(kPhi, R), c * grad / h);
      A.d(row, F(kPhi, L), -c * grad / h);
    }
    // species
    for (int s = 0; s < 3; ++s) {
      const int fc = kC1 + s, fm = kMu1 + s;
      const double cL = val(fc, L), cR = val(fc, R);
      const double c_f = 0.5 * (cL + cR);
      const double a_f = 0.5 * (coef(s, L) + coef(s, R));
      const double dmu = val(fm, R) - val(fm, L);
      const double flux = uf * c_f - a_f * dmu / h;
      for (auto [cell, sg] : {std::pair{L, 1.0}, std::pair{R, -1.0}}) {
        const int row = F(fc, cell);
        A.add(row, sg * flux / h);
        A.d(row, face, sg * c_f / h);
        A.d(row, F(fc, L), sg * (0.5 * uf - 0.5 * dcoef_dc(s, L) * dmu / h) / h);
        A.d(row, F(fc, R), sg * (0.5 * uf - 0.5 * dcoef_dc(s, R) * dmu / h) / h);
        A.d(row, F(fm, R), -sg * a_f / (h * h));
        A.d(row, F(fm, L), sg * a_f / (h * h));
      }
    }
  };

  // open boundary faces (and walls carrying a Dirichlet concentration)
  auto boundary = [&](int face, int cell, const FaceBc& fb, bool low, double h) {
    const double sg = low ? -1.0 : 1.0;  // sign of the +d flux in the cell balance
    const bool open = fb.kind != VelocityBc::wall;
    const double uf = open ? x[face] : 0.0;
    if (open) {
      const int row = F(kPhi, cell);
      A.add(row, sg * uf * old_.phi[cell] / h);
      A.d(row, face, sg * old_.phi[cell] / h);
    }
    for (int s = 0; s < 3; ++s) {
      const int fc = kC1 + s, fm = kMu1 + s;
      const int row = F(fc, cell);
      const bool dirichlet = s == 0 && fb.c1_dirichlet.has_value();
      if (open) {
        if (dirichlet) {
          A.add(row, sg * uf * (*fb.c1_dirichlet) / h);
          A.d(row, face, sg * (*fb.c1_dirichlet) / h);
        } else {
          const double c = val(fc, cell);
          A.add(row, sg * uf * c / h);
          A.d(row, face, sg * c / h);
          A.d(row, F(fc, cell), sg * uf / h);
        }
      }
      if (dirichlet) {
        // outward gradient over half a cell towards the boundary value
        const double mu_b = std::log(*fb.c1_dirichlet + 1.0);
        const double a = coef(s, cell);
        const double grad = -sg * (val(fm, cell) - mu_b) / (0.5 * h);  // +d derivative at the face
        const double flux = -a * grad;
        A.add(row, sg * flux / h);
        A.d(row, F(fm, cell), sg * a * sg / (0.5 * h) / h);
        A.d(row, F(fc, cell), -sg * dcoef_dc(s, cell) * grad / h);
      }
    }
  };

  detail::for_each_scalar_face(m, bc_, interior, boundary);

  // capillary and osmotic forcing on momentum faces
  detail::for_each_forced_face(m, [&](int row, int L, int R, double h) {
    const double phio_f = 0.5 * (old_.phi[L] + old_.phi[R]);
    A.add(row, phio_f * (val(kMuPhi, R) - val(kMuPhi, L)) / h);
    A.d(row, F(kMuPhi, R), phio_f / h);
    A.d(row, F(kMuPhi, L), -phio_f / h);
    for (int s = 0; s < 3; ++s) {
      const int fc = kC1 + s, fm = kMu1 + s;
      const double c_f = 0.5 * (val(fc, L) + val(fc, R));
      const double dmu = val(fm, R) - val(fm, L);
      A.add(row, c_f * dmu / h);
      A.d(row, F(fm, R), c_f / h);
      A.d(row, F(fm, L), -c_f / h);
      A.d(row, F(fc, R), 0.5 * dmu / h);
      A.d(row, F(fc, L), 0.5 * dmu / h);
    }
  });
}

void MonolithicSystem::residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const { assemble(x, r, nullptr); }

void MonolithicSystem::jacobian(const Eigen::VectorXd& x, SparseMatrix& jac) const {
  Eigen::VectorXd r(map_.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(map_.size()) * 12);
  assemble(x, r, &trip);
  jac.resize(map_.size(), map_.size());
  jac.setFromTriplets(trip.begin(), trip.end());
  jac.makeCompressed();
}

void MonolithicSystem::jacobian_fd(const Eigen::VectorXd& x, SparseMatrix& jac) const {
  SparseMatrix pattern;
  jacobian(x, pattern);
  jac = fd_jacobian([this](const Eigen::VectorXd& y, Eigen::VectorXd& r) { residual(y, r); }, x, pattern);
  jac.makeCompressed();
}

double MonolithicSystem::max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const {
  double alpha = 1.0;
  const int n = map_.grid().cells();
  for (int f : {kC1, kC2, kC3})
    for (int k = 0; k < n; ++k) {
      const int i = map_.field(f, k);
      if (dx[i] < 0.0 && x[i] + dx[i] + 1.0 < cfg_.c_floor) {
        const double room = x[i] + 1.0 - cfg_.c_floor;
        alpha = std::min(alpha, 0.99 * std::max(0.0, room) / -dx[i]);
      }
    }
  return alpha;
}

Eigen::VectorXd residual(const State& old, const State& guess, const PhysParams& p, const SchemeConfig& cfg,
                         const BoundaryPlan& bc) {
  const MonolithicSystem sys(old, p, cfg, bc);
  Eigen::VectorXd r(sys.dofs().size());
  sys.residual(sys.pack(guess), r);
  return r;
}

Eigen::VectorXd residual(const State& old, const State& guess, const PhysParams& p, const SchemeConfig& cfg,
                         const GridSpec& g) {
  return residual(old, guess, p, cfg, BoundaryPlan(g));
}

Stepper::Stepper(const PhysParams& p, const SchemeConfig& cfg, const BoundaryPlan& bc)
    : p_(p), cfg_(cfg), bc_(bc), solver_(cfg.lin_solver, cfg.lin_tol, cfg.lin_max) {
  p_.validate();
  cfg_.validate();
  bc_.validate();
}

std::pair<State, StepReport> Stepper::step(const State& old) {
  const auto t0 = std::chrono::steady_clock::now();
  const MonolithicSystem sys(old, p_, cfg_, bc_);
  Eigen::VectorXd x = sys.pack(old);
  const ResidualFn res = [&sys](const Eigen::VectorXd& y, Eigen::VectorXd& r) { sys.residual(y, r); };
  JacobianFn jac;
  if (cfg_.jac_mode == JacobianMode::analytic)
    jac = [&sys](const Eigen::VectorXd& y, SparseMatrix& j) { sys.jacobian(y, j); };
  else
    jac = [&sys](const Eigen::VectorXd& y, SparseMatrix& j) { sys.jacobian_fd(y, j); };
  const StepLimiter lim = [&sys](const Eigen::VectorXd& y, const Eigen::VectorXd& d) { return sys.max_step(y, d); };

  const NewtonResult nr = newton_solve(res, jac, x, cfg_.newton_options(), solver_, lim);
  State next = sys.unpack(x);
  StepReport rep;
  rep.newton_iterations = nr.iterations;
  rep.residual = nr.residual;
  rep.linear_iterations = nr.linear_iterations;
  rep.factorizations = nr.factorizations;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(next), rep};
}

std::pair<State, StepReport> step(const State& old, const PhysParams& p, const SchemeConfig& cfg,
                                  const BoundaryPlan& bc) {
  Stepper s(p, cfg, bc);
  return s.step(old);
}

}  // namespace pfreact
