#include "pfreact/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pfreact {

EnergyReport energy(const State& s, const PhysParams& p, const GridSpec& g) {
  EnergyReport e;
  e.kinetic = 0.5 * p.re * inner_face(s.u, s.u, g);
  const ScalarField gsq = grad_sq_center(s.phi, g);
  const int n = g.cells();
  double mix = 0, ent1 = 0, ent2 = 0, ent3 = 0, pen = 0, adh = 0, mass = 0;
#pragma omp parallel for reduction(+ : mix, ent1, ent2, ent3, pen, adh, mass) schedule(static)
  for (int k = 0; k < n; ++k) {
    const double phi = s.phi[k];
    const double c1 = s.c1[k] + 1.0, c2 = s.c2[k] + 1.0, c3 = s.c3[k] + 1.0;
    mix += lambda_of(s.c3[k], p) * (0.5 * p.eps * p.eps * gsq[k] + f_trunc(phi, p).value);
    ent1 += c1 * (std::log(c1) - 1.0);
    ent2 += c2 * (std::log(c2) - 1.0);
    ent3 += c3 * (std::log(c3) - 1.0);
    pen += phi * phi * (p.m_pen * c2 + p.m_pen * c3);
    const double w = phi * phi - 1.0;
    adh -= 0.25 * w * w * (p.n_adh * c2 + p.n_adh * c3);
    mass += s.c1[k] + s.c2[k] + s.c3[k];
  }
  const double area = g.cell_area();
  e.mixing = mix * area;
  e.entropy = {ent1 * area, ent2 * area, ent3 * area};
  e.penalty = pen * area;
  e.adhesion = adh * area;
  e.mass_total = mass * area;
  e.total = e.kinetic + e.mixing + e.entropy[0] + e.entropy[1] + e.entropy[2] + e.penalty + e.adhesion;
  return e;
}

namespace {

int wrapi(int k, int n) { return ((k % n) + n) % n; }

// Viscous pairing <-Lap_h u, u> of one velocity component, including the
// no-slip ghost contribution at walls parallel to it.
double viscous_component(const FaceField& u, int d, const BoundaryPlan& bc) {
  const GridSpec& g = bc.grid();
  const int na = d == 0 ? g.nx : g.ny, nb = d == 0 ? g.ny : g.nx;
  const double hn = d == 0 ? g.hx() : g.hy(), ht = d == 0 ? g.hy() : g.hx();
  const bool per_n = (d == 0 ? g.bc_x : g.bc_y) == AxisBc::periodic;
  const bool per_t = (d == 0 ? g.bc_y : g.bc_x) == AxisBc::periodic;
  auto at = [&](int a, int b) {
    if (per_n && a == na) a = 0;
    return d == 0 ? u.x(a, b) : u.y(b, a);
  };
  const Side lo = d == 0 ? Side::bottom : Side::left, hi = d == 0 ? Side::top : Side::right;
  double acc = 0.0;
  for (int b = 0; b < nb; ++b)
    for (int a = 0; a < na; ++a) {
      const double du = (at(a + 1, b) - at(a, b)) / hn;
      acc += du * du;
    }
  const int a0 = per_n ? 0 : 1, a1 = na - 1;
  for (int a = a0; a <= a1; ++a) {
    for (int b = 0; b + 1 < nb; ++b) {
      const double du = (at(a, b + 1) - at(a, b)) / ht;
      acc += du * du;
    }
    if (per_t) {
      const double du = (at(a, 0) - at(a, wrapi(nb - 1, nb))) / ht;
      acc += du * du;
    } else {
      const double u0 = at(a, 0), u1 = at(a, nb - 1);
      acc += 2.0 * u0 * (u0 - bc.tangential(lo)) / (ht * ht);
      acc += 2.0 * u1 * (u1 - bc.tangential(hi)) / (ht * ht);
    }
  }
  return acc * g.cell_area();
}

}  // namespace

double velocity_grad_sq(const FaceField& u, const BoundaryPlan& bc) {
  return viscous_component(u, 0, bc) + viscous_component(u, 1, bc);
}

Dissipation dissipation(const State& old, const State& next, const PhysParams& p, const BoundaryPlan& bc) {
  const GridSpec& g = bc.grid();
  Dissipation d;
  d.viscous = velocity_grad_sq(next.u, bc);

  const FaceField gmu = grad_c2f(next.mu_phi, g);
  d.phase = p.mobility * inner_face(gmu, gmu, g);

  const int n = g.cells();
  ScalarField coef(g);
  const ScalarField* cs[3] = {&next.c1, &next.c2, &next.c3};
  const ScalarField* ms[3] = {&next.mu1, &next.mu2, &next.mu3};
  for (int s = 0; s < 3; ++s) {
    for (int k = 0; k < n; ++k) {
      const double dk = s == 0 ? d1_of(old.phi[k], permeability(old.c3[k], p), p) : (s == 1 ? p.d2 : p.d3);
      coef[k] = dk * ((*cs[s])[k] + 1.0) / p.pe;
    }
    // -<div(a grad mu), mu> equals the face-weighted a |grad mu|^2
    d.species[s] = -inner(div_coeff_grad(coef, *ms[s], g), *ms[s], g);
  }

  double rate = 0.0;
  for (int k = 0; k < n; ++k) {
    const double aff = p.a1 * next.mu1[k] + p.a2 * next.mu2[k] - p.a3 * next.mu3[k];
    rate += proliferation(old.phi[k], p.k_rate) * aff * aff;
  }
  d.reaction = rate * g.cell_area();
  return d;
}

Dissipation dissipation(const State& old, const State& next, const PhysParams& p, const GridSpec& g) {
  return dissipation(old, next, p, BoundaryPlan(g));
}

std::array<double, 3> boundary_inflow(const State& old, const State& next, const PhysParams& p,
                                      const BoundaryPlan& bc) {
  const GridSpec& g = bc.grid();
  const double dt = next.t - old.t;
  std::array<double, 3> in{0.0, 0.0, 0.0};
  const ScalarField* cs[3] = {&next.c1, &next.c2, &next.c3};
  for (Side side : {Side::left, Side::right, Side::bottom, Side::top}) {
    const auto& faces = bc.side(side);
    const bool xside = side == Side::left || side == Side::right;
    const bool low = side == Side::left || side == Side::bottom;
    const double h = xside ? g.hx() : g.hy();
    const double len = xside ? g.hy() : g.hx();
    for (int b = 0; b < static_cast<int>(faces.size()); ++b) {
      const FaceBc& fb = faces[b];
      const int i = xside ? (low ? 0 : g.nx - 1) : b;
      const int j = xside ? b : (low ? 0 : g.ny - 1);
      const double un = xside ? next.u.x(low ? 0 : g.nx, j) : next.u.y(i, low ? 0 : g.ny);
      const double inward = low ? 1.0 : -1.0;
      for (int s = 0; s < 3; ++s) {
        const bool dir = s == 0 && fb.c1_dirichlet.has_value();
        if (fb.kind != VelocityBc::wall) {
          const double cb = dir ? *fb.c1_dirichlet : (*cs[s])(i, j);
          in[s] += inward * un * cb * len * dt;
        }
        if (dir) {
          const int k = i + g.nx * j;
          const double a = d1_of(old.phi[k], permeability(old.c3[k], p), p) * (next.c1[k] + 1.0) / p.pe;
          in[s] += a * (std::log(*fb.c1_dirichlet + 1.0) - next.mu1[k]) / (0.5 * h) * len * dt;
        }
      }
    }
  }
  return in;
}

const char* DiagnosticsWriter::header() {
  return "t,dt,total_mass,E_total,E_kinetic,E_mixing,E_entropy1,E_entropy2,E_entropy3,E_penalty,E_adhesion,"
         "D_viscous,D_phase,D_c1,D_c2,D_c3,D_reaction,newton_iters,residual";
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw std::runtime_error("cannot open diagnostics file '" + path + "'");
  out_ << header() << '\n';
}

void DiagnosticsWriter::write(double t, double dt, const EnergyReport& e, int newton_iters, double residual) {
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17e", v);
    out_ << buf << ',';
  };
  const Dissipation& d = e.dissipation;
  for (double v : {t, dt, e.mass_total, e.total, e.kinetic, e.mixing, e.entropy[0], e.entropy[1], e.entropy[2],
                   e.penalty, e.adhesion, d.viscous, d.phase, d.species[0], d.species[1], d.species[2], d.reaction})
    put(v);
  out_ << newton_iters << ',';
  std::snprintf(buf, sizeof buf, "%.17e", residual);
  out_ << buf << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed on '" + path_ + "'");
  ++rows_;
}

}  // namespace pfreact
