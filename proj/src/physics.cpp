#include "pfreact/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfreact {

std::string to_string(QMode q) { return q == QMode::constant ? "constant" : "affine"; }

QMode q_mode_from_string(const std::string& s) {
  if (s == "constant") return QMode::constant;
  if (s == "affine") return QMode::affine;
  throw std::invalid_argument("unknown q_mode '" + s + "'");
}

void PhysParams::validate(bool reduced) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("PhysParams: " + what); };
  if (!(eps > 0.0)) fail("eps must be positive");
  if (!(re > 0.0) || !(pe > 0.0)) fail("Re and Pe must be positive");
  if (mobility < 0 || d2 < 0 || d3 < 0 || k_rate < 0 || m_pen < 0 || n_adh < 0)
    fail("mobility, diffusivities, rates and penalties must be nonnegative");
  if (!(d1_plus > 0.0) || !(d1_minus > 0.0)) fail("bulk diffusivities of species 1 must be positive");
  if (std::abs(a1 + a2 - a3) > 1e-12 * std::max(1.0, std::abs(a3))) fail("stoichiometry needs a1 + a2 = a3");
  if (f_trunc < 1.0) fail("truncation radius must be at least 1");
  if (s_stab < 0.5 * lipschitz()) fail("stabilization S must satisfy S >= L/2");
  if (reduced && !(s_stab > 2.0 * lipschitz())) fail("reduced system needs S > 2L");
  if (q_mode == QMode::constant && !(q0 > 0.0)) fail("q0 must be positive");
}

double lambda_of(double c3, const PhysParams& p) { return 1.0 + p.lambda0 * c3; }

double dlambda(const PhysParams& p) { return p.lambda0; }

PotentialEval f_trunc(double phi, double r) {
  const double a = std::abs(phi);
  if (a <= r) {
    const double s = phi * phi - 1.0;
    return {0.25 * s * s, phi * s, 3.0 * phi * phi - 1.0};
  }
  const double s = r * r - 1.0;
  const double f0 = 0.25 * s * s, f1 = r * s, f2 = 3.0 * r * r - 1.0;
  const double d = a - r;
  const double sign = phi > 0 ? 1.0 : -1.0;
  return {f0 + f1 * d + 0.5 * f2 * d * d, sign * (f1 + f2 * d), f2};
}

double proliferation(double phi, double k) {
  if (phi < -1.0 || phi > 1.0) return 0.0;
  const double s = phi * phi - 1.0;
  return k * s * s;
}

double permeability(double c3, const PhysParams& p) {
  if (p.q_mode == QMode::constant) return p.q0;
  // 1 + 2 c3 turns nonpositive for c3 <= -1/2, which the shifted
  // concentrations can reach (only c3 + 1 > 0 is guaranteed); the floor keeps
  // the membrane resistance finite there.
  return std::max(1.0 + 2.0 * c3, kPermeabilityFloor);
}

double d1_of(double phi, double q, const PhysParams& p) {
  if (!(q > 0.0)) throw std::invalid_argument("d1_of: permeability must be positive");
  const double ph = std::clamp(phi, -1.0, 1.0);
  const double s = ph * ph - 1.0;
  const double resistance = s * s / (q * p.eps) + (1.0 - ph) / (2.0 * p.d1_minus) + (1.0 + ph) / (2.0 * p.d1_plus);
  return 1.0 / resistance;
}

double lambda_quotient(double c3_new, double c3_old, const PhysParams& p) {
  const double dc = c3_new - c3_old;
  // lambda is affine, so its increment is formed as lambda0 * dc rather than
  // as a difference of two O(1) values (which cancels badly for small dc).
  if (std::abs(dc) > 1e-12) return (p.lambda0 * dc) / dc;
  return dlambda(p);
}

namespace {

double safe_log1p_shift(double c) {
  if (!(c + 1.0 > 0.0)) throw std::domain_error("chemical potential: log of nonpositive argument");
  return std::log(c + 1.0);
}

}  // namespace

ScalarField mu_phi_scheme(const ScalarField& phi_new, const ScalarField& phi_old, const ScalarField& c2_new,
                          const ScalarField& c3_new, const ScalarField& c2_old, const ScalarField& c3_old,
                          const PhysParams& p, const GridSpec& g) {
  for (const ScalarField* f : {&phi_new, &phi_old, &c2_new, &c3_new, &c2_old, &c3_old})
    if (!f->matches(g)) throw std::invalid_argument("mu_phi_scheme: shape mismatch");
  ScalarField lam(g);
  for (std::size_t k = 0; k < lam.size(); ++k) lam[k] = lambda_of(c3_old[k], p);
  const ScalarField lap = div_coeff_grad(lam, phi_new, g);
  ScalarField mu(g);
  const std::size_t n = mu.size();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) {
    const double po = phi_old[k], pn = phi_new[k];
    const double dphi = pn - po;
    const double pen = p.m_pen * (c2_new[k] + 1.0) + p.m_pen * (c3_new[k] + 1.0);
    const double adh = p.n_adh * (c2_old[k] + 1.0) + p.n_adh * (c3_old[k] + 1.0);
    mu[k] = -p.eps * p.eps * lap[k] + lam[k] * f_trunc(po, p).d1 + lam[k] * p.s_stab * dphi + 2.0 * pn * pen -
            (po * po * po - po) * adh + p.s_stab * dphi * adh;
  }
  return mu;
}

ScalarField mu1_scheme(const ScalarField& c1_new) {
  ScalarField mu(c1_new.nx(), c1_new.ny());
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = safe_log1p_shift(c1_new[k]);
  return mu;
}

ScalarField mu2_scheme(const ScalarField& c2_new, const ScalarField& phi_old, const ScalarField& phi_new,
                       const PhysParams& p) {
  ScalarField mu(c2_new.nx(), c2_new.ny());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double s = phi_new[k] * phi_new[k] - 1.0;
    mu[k] = safe_log1p_shift(c2_new[k]) + p.m_pen * phi_old[k] * phi_old[k] - 0.25 * p.n_adh * s * s;
  }
  return mu;
}

ScalarField mu3_scheme(const ScalarField& c3_new, const ScalarField& c3_old, const ScalarField& phi_new,
                       const ScalarField& phi_old, const PhysParams& p, const GridSpec& g) {
  const ScalarField gsq = grad_sq_center(phi_new, g);
  ScalarField mu(g);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double s = phi_new[k] * phi_new[k] - 1.0;
    const double mix = f_trunc(phi_new[k], p).value + 0.5 * p.eps * p.eps * gsq[k];
    mu[k] = lambda_quotient(c3_new[k], c3_old[k], p) * mix + safe_log1p_shift(c3_new[k]) +
            p.m_pen * phi_old[k] * phi_old[k] - 0.25 * p.n_adh * s * s;
  }
  return mu;
}

ScalarField reaction_rate(const ScalarField& phi_old, const ScalarField& mu1, const ScalarField& mu2,
                          const ScalarField& mu3, const PhysParams& p) {
  ScalarField r(phi_old.nx(), phi_old.ny());
  for (std::size_t k = 0; k < r.size(); ++k)
    r[k] = proliferation(phi_old[k], p.k_rate) * (p.a1 * mu1[k] + p.a2 * mu2[k] - p.a3 * mu3[k]);
  return r;
}

}  // namespace pfreact
