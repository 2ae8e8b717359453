#include "pfreact/reduced.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "flow_terms.hpp"
#include "pfreact/diagnostics.hpp"
#include "pfreact/errors.hpp"
#include "pfreact/physics.hpp"

namespace pfreact {

void ReducedParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("ReducedParams: " + what); };
  if (!(re > 0.0)) fail("Re must be positive");
  if (!(eps > 0.0)) fail("eps must be positive");
  if (mobility < 0.0 || k_rate < 0.0 || diffusivity < 0.0) fail("coefficients must be nonnegative");
  if (f_trunc < 1.0) fail("truncation radius must be at least 1");
  if (!(s_stab > 2.0 * lipschitz())) fail("stabilization needs S > 2L");
}

void set_consistent_potential(ReducedState& s, const ReducedParams& p, const GridSpec& g) {
  const ScalarField lap = div_coeff_grad(ScalarField(g, 1.0), s.phi, g);
  for (std::size_t k = 0; k < s.mu.size(); ++k)
    s.mu[k] = -p.eps * p.eps * lap[k] + f_trunc(s.phi[k], p.f_trunc).d1;
}

double reduced_energy(const ReducedState& s, const ReducedParams& p, const GridSpec& g) {
  const ScalarField gsq = grad_sq_center(s.phi, g);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    const double c = s.c[k] + 1.0;
    acc += 0.5 * p.eps * p.eps * gsq[k] + f_trunc(s.phi[k], p.f_trunc).value + c * (std::log(c) - 1.0);
  }
  return 0.5 * inner_face(s.u, s.u, g) + acc * g.cell_area();
}

ReducedSystem::ReducedSystem(const ReducedState& old, const ReducedParams& p, const SchemeConfig& cfg,
                             const BoundaryPlan& bc)
    : old_(old), p_(p), cfg_(cfg), bc_(bc), map_(bc.grid(), kFieldCount), gauge_(!bc.has_outlet()) {
  if (!old.phi.matches(bc.grid())) throw std::invalid_argument("ReducedSystem: state/grid mismatch");
  cfg.validate();
}

Eigen::VectorXd ReducedSystem::pack(const ReducedState& s) const {
  const GridSpec& g = map_.grid();
  Eigen::VectorXd x(map_.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) x[map_.ux(i, j)] = s.u.x(i, j);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) x[map_.uy(i, j)] = s.u.y(i, j);
  // the vector form pins p at cell 0; the state form has zero mean
  const double p_shift = gauge_ ? s.p[0] : 0.0;
  for (int k = 0; k < g.cells(); ++k) {
    x[map_.p(k)] = s.p[k] - p_shift;
    x[map_.field(kPhi, k)] = s.phi[k];
    x[map_.field(kMu, k)] = s.mu[k];
    x[map_.field(kC, k)] = s.c[k];
  }
  return x;
}

ReducedState ReducedSystem::unpack(const Eigen::VectorXd& x) const {
  const GridSpec& g = map_.grid();
  ReducedState s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s.u.x(i, j) = x[map_.ux(i, j)];
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.u.y(i, j) = x[map_.uy(i, j)];
  double p_mean = 0.0;
  if (gauge_) {
    for (int k = 0; k < g.cells(); ++k) p_mean += x[map_.p(k)];
    p_mean /= g.cells();
  }
  for (int k = 0; k < g.cells(); ++k) {
    s.p[k] = x[map_.p(k)] - p_mean;
    s.phi[k] = x[map_.field(kPhi, k)];
    s.mu[k] = x[map_.field(kMu, k)];
    s.c[k] = x[map_.field(kC, k)];
  }
  sync_periodic(s.u, g);
  s.t = old_.t + cfg_.dt;
  return s;
}

void ReducedSystem::assemble(const Eigen::VectorXd& x, Eigen::VectorXd& r,
                             std::vector<Eigen::Triplet<double>>* jac) const {
  const GridSpec& g = map_.grid();
  const DofMap& m = map_;
  const ReducedParams& p = p_;
  const double dt = cfg_.dt, eps2 = p.eps * p.eps;
  r.setZero(m.size());
  detail::Assembly A{r, jac};
  auto F = [&](int f, int k) { return m.field(f, k); };
  auto val = [&](int f, int k) { return x[m.field(f, k)]; };

  for (int k = 0; k < g.cells(); ++k)
    if (!(val(kC, k) + 1.0 >= cfg_.c_floor))
      throw PositivityLost("concentration fell below the positivity floor at cell " + std::to_string(k));

  detail::assemble_flow(m, bc_, old_.u, x, dt, 1.0, 1.0 / p.re, gauge_, A);

  for (int k = 0; k < g.cells(); ++k) {
    const double phi = val(kPhi, k), po = old_.phi[k];
    const int rphi = F(kPhi, k), rmu = F(kMu, k), rc = F(kC, k);
    A.add(rphi, (phi - po) / dt);
    A.d(rphi, rphi, 1.0 / dt);

    A.add(rmu, val(kMu, k) - f_trunc(po, p.f_trunc).d1 - p.s_stab * (phi - po));
    A.d(rmu, rmu, 1.0);
    A.d(rmu, rphi, -p.s_stab);

    const double c = val(kC, k);
    const double sink = proliferation(po, p.k_rate);
    A.add(rc, (c - old_.c[k]) / dt + sink * std::log(c + 1.0));
    A.d(rc, rc, 1.0 / dt + sink / (c + 1.0));
  }

  auto interior = [&](int face, int L, int R, double h) {
    const double uf = x[face];
    const double phio_f = 0.5 * (old_.phi[L] + old_.phi[R]);
    const double dmu = val(kMu, R) - val(kMu, L);
    const double fphi = uf * phio_f - p.mobility * dmu / h;
    const double gphi = (val(kPhi, R) - val(kPhi, L)) / h;
    const double c_f = 0.5 * (val(kC, L) + val(kC, R));
    const double fc = uf * c_f - p.diffusivity * (val(kC, R) - val(kC, L)) / h;
    for (auto [cell, sg] : {std::pair{L, 1.0}, std::pair{R, -1.0}}) {
      const int rphi = F(kPhi, cell), rmu = F(kMu, cell), rc = F(kC, cell);
      A.add(rphi, sg * fphi / h);
      A.d(rphi, face, sg * phio_f / h);
      A.d(rphi, F(kMu, R), -sg * p.mobility / (h * h));
      A.d(rphi, F(kMu, L), sg * p.mobility / (h * h));

      A.add(rmu, sg * eps2 * gphi / h);
      A.d(rmu, F(kPhi, R), sg * eps2 / (h * h));
      A.d(rmu, F(kPhi, L), -sg * eps2 / (h * h));

      A.add(rc, sg * fc / h);
      A.d(rc, face, sg * c_f / h);
      A.d(rc, F(kC, L), sg * (0.5 * uf + p.diffusivity / h) / h);
      A.d(rc, F(kC, R), sg * (0.5 * uf - p.diffusivity / h) / h);
    }
  };
  auto boundary = [&](int face, int cell, const FaceBc& fb, bool low, double h) {
    if (fb.kind == VelocityBc::wall) return;
    const double sg = low ? -1.0 : 1.0;
    const double uf = x[face];
    A.add(F(kPhi, cell), sg * uf * old_.phi[cell] / h);
    A.d(F(kPhi, cell), face, sg * old_.phi[cell] / h);
    const double c = val(kC, cell);
    A.add(F(kC, cell), sg * uf * c / h);
    A.d(F(kC, cell), face, sg * c / h);
    A.d(F(kC, cell), F(kC, cell), sg * uf / h);
  };
  detail::for_each_scalar_face(m, bc_, interior, boundary);

  detail::for_each_forced_face(m, [&](int row, int L, int R, double h) {
    const double phio_f = 0.5 * (old_.phi[L] + old_.phi[R]);
    A.add(row, (phio_f * (val(kMu, R) - val(kMu, L)) + (val(kC, R) - val(kC, L))) / h);
    A.d(row, F(kMu, R), phio_f / h);
    A.d(row, F(kMu, L), -phio_f / h);
    A.d(row, F(kC, R), 1.0 / h);
    A.d(row, F(kC, L), -1.0 / h);
  });
}

void ReducedSystem::residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const { assemble(x, r, nullptr); }

void ReducedSystem::jacobian(const Eigen::VectorXd& x, SparseMatrix& jac) const {
  Eigen::VectorXd r(map_.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(map_.size()) * 10);
  assemble(x, r, &trip);
  jac.resize(map_.size(), map_.size());
  jac.setFromTriplets(trip.begin(), trip.end());
  jac.makeCompressed();
}

double ReducedSystem::max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const {
  double alpha = 1.0;
  for (int k = 0; k < map_.grid().cells(); ++k) {
    const int i = map_.field(kC, k);
    if (dx[i] < 0.0 && x[i] + dx[i] + 1.0 < cfg_.c_floor)
      alpha = std::min(alpha, 0.99 * std::max(0.0, x[i] + 1.0 - cfg_.c_floor) / -dx[i]);
  }
  return alpha;
}

ReducedStepper::ReducedStepper(const ReducedParams& p, const SchemeConfig& cfg, const GridSpec& g)
    : p_(p), cfg_(cfg), bc_(g), solver_(cfg.lin_solver, cfg.lin_tol, cfg.lin_max) {
  p_.validate();
  cfg_.validate();
}

std::pair<ReducedState, StepReport> ReducedStepper::step(const ReducedState& old) {
  const auto t0 = std::chrono::steady_clock::now();
  const ReducedSystem sys(old, p_, cfg_, bc_);
  Eigen::VectorXd x = sys.pack(old);
  const ResidualFn res = [&sys](const Eigen::VectorXd& y, Eigen::VectorXd& r) { sys.residual(y, r); };
  JacobianFn jac;
  if (cfg_.jac_mode == JacobianMode::analytic) {
    jac = [&sys](const Eigen::VectorXd& y, SparseMatrix& j) { sys.jacobian(y, j); };
  } else {
    jac = [&sys, &res](const Eigen::VectorXd& y, SparseMatrix& j) {
      SparseMatrix pattern;
      sys.jacobian(y, pattern);
      j = fd_jacobian(res, y, pattern);
    };
  }
  const StepLimiter lim = [&sys](const Eigen::VectorXd& y, const Eigen::VectorXd& d) { return sys.max_step(y, d); };
  const NewtonResult nr = newton_solve(res, jac, x, cfg_.newton_options(), solver_, lim);
  StepReport rep;
  rep.newton_iterations = nr.iterations;
  rep.residual = nr.residual;
  rep.linear_iterations = nr.linear_iterations;
  rep.factorizations = nr.factorizations;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {sys.unpack(x), rep};
}

std::pair<ReducedState, StepReport> reduced_step(const ReducedState& old, const ReducedParams& p,
                                                 const SchemeConfig& cfg, const GridSpec& g) {
  ReducedStepper s(p, cfg, g);
  return s.step(old);
}

double RateTable::order(std::size_t r, std::size_t c) const {
  if (r == 0 || r >= dts.size()) throw std::out_of_range("RateTable::order: row");
  return std::log(errors[r - 1][c] / errors[r][c]) / std::log(dts[r - 1] / dts[r]);
}

void RateTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open rate table '" + path + "'");
  out << "dt";
  for (const auto& n : names) out << ',' << n;
  for (const auto& n : names) out << ",order_" << n;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < dts.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17e", dts[r]);
    out << buf;
    for (double e : errors[r]) {
      std::snprintf(buf, sizeof buf, "%.17e", e);
      out << ',' << buf;
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      out << ',';
      if (r > 0) {
        std::snprintf(buf, sizeof buf, "%.17e", order(r, c));
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

ReducedState smooth_reduced_initial(const GridSpec& g, const ReducedParams& p) {
  ReducedState s(g);
  const double tau = 2.0 * std::numbers::pi;
  // stream function at cell corners gives a discretely divergence-free flow
  auto psi = [&](int i, int j) {
    const double x = i * g.hx(), y = j * g.hy();
    return 0.5 / tau * std::sin(tau * x / g.lx) * std::sin(tau * y / g.ly);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s.u.x(i, j) = (psi(i, j + 1) - psi(i, j)) / g.hy();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.u.y(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.hx();
  sync_periodic(s.u, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.xc(i) / g.lx, y = g.yc(j) / g.ly;
      s.phi(i, j) = 0.5 * std::sin(tau * x) * std::cos(tau * y);
      s.c(i, j) = 0.5 + 0.25 * std::cos(tau * x) * std::cos(2.0 * tau * y);
    }
  set_consistent_potential(s, p, g);
  return s;
}

namespace {

double scalar_h1_sq(const ScalarField& e, const GridSpec& g) {
  const FaceField ge = grad_c2f(e, g);
  return inner(e, e, g) + inner_face(ge, ge, g);
}

double grad_sq(const ScalarField& e, const GridSpec& g) {
  const FaceField ge = grad_c2f(e, g);
  return inner_face(ge, ge, g);
}

// ||Lap_h u||^2 over the momentum unknowns, no-slip ghosts at walls.
double velocity_laplacian_sq(const FaceField& u, const GridSpec& g) {
  const DofMap m(g, 0);
  double acc = 0.0;
  for (int d = 0; d < 2; ++d) {
    const int na = m.n_normal(d), nb = m.n_tangent(d);
    const double hn = m.h_normal(d), ht = m.h_tangent(d);
    const bool per_n = m.bc_normal(d) == AxisBc::periodic, per_t = m.bc_tangent(d) == AxisBc::periodic;
    auto at = [&](int a, int b) {
      if (per_n) a = detail::wrap(a, na);
      if (b < 0 || b >= nb) {
        if (per_t) {
          b = detail::wrap(b, nb);
        } else {
          const int bi = b < 0 ? 0 : nb - 1;
          return -(d == 0 ? u.x(a, bi) : u.y(bi, a));
        }
      }
      return d == 0 ? u.x(a, b) : u.y(b, a);
    };
    const int a0 = per_n ? 0 : 1;
    for (int b = 0; b < nb; ++b)
      for (int a = a0; a < na; ++a) {
        const double lap = (at(a + 1, b) - 2.0 * at(a, b) + at(a - 1, b)) / (hn * hn) +
                           (at(a, b + 1) - 2.0 * at(a, b) + at(a, b - 1)) / (ht * ht);
        acc += lap * lap;
      }
  }
  return acc * g.cell_area();
}

FaceField face_diff(const FaceField& a, const FaceField& b) {
  FaceField out = a;
  for (std::size_t k = 0; k < out.x_values().size(); ++k) out.x_values()[k] -= b.x_values()[k];
  for (std::size_t k = 0; k < out.y_values().size(); ++k) out.y_values()[k] -= b.y_values()[k];
  return out;
}

ScalarField cell_diff(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= b[k];
  return out;
}

long whole_ratio(double num, double den, const char* what) {
  const double q = num / den;
  const long n = std::lround(q);
  if (n < 1 || std::abs(q - n) > 1e-9 * q) throw std::invalid_argument(std::string("convergence_study: ") + what);
  return n;
}

}  // namespace

RateTable convergence_study(const GridSpec& g, const ReducedParams& p, const SchemeConfig& base,
                            const std::vector<double>& dts, double reference_dt, double t_final,
                            const ReducedState& initial) {
  if (dts.empty()) throw std::invalid_argument("convergence_study: empty ladder");
  double dt_min = dts.front();
  for (std::size_t k = 0; k < dts.size(); ++k) {
    if (k > 0 && !(dts[k] < dts[k - 1])) throw std::invalid_argument("convergence_study: dts must decrease");
    dt_min = std::min(dt_min, dts[k]);
  }
  if (!(reference_dt < dt_min / 4.0)) throw std::invalid_argument("convergence_study: reference_dt >= min(dts)/4");
  const long per_sample = whole_ratio(dt_min, reference_dt, "reference_dt must divide every dt");
  const long samples = whole_ratio(t_final, dt_min, "every dt must divide t_final");

  // reference trajectory sampled at multiples of the finest ladder step
  std::vector<ReducedState> ref;
  ref.reserve(samples + 1);
  {
    SchemeConfig cfg = base;
    cfg.dt = reference_dt;
    ReducedStepper stepper(p, cfg, g);
    ReducedState s = initial;
    ref.push_back(s);
    for (long n = 0; n < samples; ++n) {
      for (long k = 0; k < per_sample; ++k) s = stepper.step(s).first;
      ref.push_back(s);
    }
  }

  RateTable table;
  table.names = {"err_u_H1", "err_phi_H1", "err_c_L2", "acc_u_H2", "acc_p_H1", "acc_mu_H1semi", "acc_c_H1semi"};
  const BoundaryPlan bc(g);
  for (double dt : dts) {
    const long stride = whole_ratio(dt, dt_min, "every dt must be a multiple of the finest");
    const long steps = whole_ratio(t_final, dt, "every dt must divide t_final");
    SchemeConfig cfg = base;
    cfg.dt = dt;
    ReducedStepper stepper(p, cfg, g);
    ReducedState s = initial;
    double acc_u = 0, acc_p = 0, acc_mu = 0, acc_c = 0;
    for (long n = 1; n <= steps; ++n) {
      s = stepper.step(s).first;
      const ReducedState& r = ref[n * stride];
      acc_u += dt * velocity_laplacian_sq(face_diff(s.u, r.u), g);
      acc_p += dt * scalar_h1_sq(cell_diff(s.p, r.p), g);
      acc_mu += dt * grad_sq(cell_diff(s.mu, r.mu), g);
      acc_c += dt * grad_sq(cell_diff(s.c, r.c), g);
    }
    const ReducedState& r = ref.back();
    const FaceField eu = face_diff(s.u, r.u);
    const ScalarField ephi = cell_diff(s.phi, r.phi), ec = cell_diff(s.c, r.c);
    table.dts.push_back(dt);
    table.errors.push_back({std::sqrt(inner_face(eu, eu, g) + velocity_grad_sq(eu, bc)),
                            std::sqrt(scalar_h1_sq(ephi, g)), std::sqrt(inner(ec, ec, g)), std::sqrt(acc_u),
                            std::sqrt(acc_p), std::sqrt(acc_mu), std::sqrt(acc_c)});
  }
  return table;
}

}  // namespace pfreact
