#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "homogeneous_oracle.hpp"
#include "pfreact/diagnostics.hpp"
#include "pfreact/errors.hpp"
#include "pfreact/scheme.hpp"
#include "support.hpp"

using namespace pfreact;
using namespace pfreact::testing;

namespace {

double state_distance(const State& a, const State& b) {
  double d = 0.0;
  auto upd = [&d](std::span<const double> x, std::span<const double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, std::abs(x[k] - y[k]));
  };
  upd(a.u.x_values(), b.u.x_values());
  upd(a.u.y_values(), b.u.y_values());
  for (auto f : {&State::p, &State::phi, &State::c1, &State::c2, &State::c3, &State::mu_phi, &State::mu1,
                 &State::mu2, &State::mu3})
    upd((a.*f).values(), (b.*f).values());
  return d;
}

/// Random admissible state: solenoidal velocity, phi around the wells,
/// concentrations well inside c + 1 > 0.
State random_state(const GridSpec& g, std::mt19937& rng) {
  State s(g);
  s.u = random_solenoidal(g, rng, 0.05);
  s.p = random_scalar(g, rng);
  s.phi = random_scalar(g, rng, -1.1, 1.1);
  s.c1 = random_scalar(g, rng, 0.0, 1.5);
  s.c2 = random_scalar(g, rng, 0.0, 1.5);
  s.c3 = random_scalar(g, rng, 0.0, 1.5);
  s.mu_phi = random_scalar(g, rng);
  s.mu1 = random_scalar(g, rng);
  s.mu2 = random_scalar(g, rng);
  s.mu3 = random_scalar(g, rng);
  return s;
}

BoundaryPlan vessel_plan() {
  const GridSpec g = grid(8, 8, AxisBc::wall, AxisBc::wall, 2.0, 2.0);
  BoundaryPlan bc(g);
  bc.set_inflow(Side::left, 0.6, 1.4, [](double y) { return 6.0 * (y - 0.6) * (1.4 - y); });
  bc.set_c1_dirichlet(Side::left, 0.6, 1.4, 2.0);
  bc.set_outlet(Side::right, 0.6, 1.4);
  return bc;
}

PhysParams lively_params() {
  PhysParams p;
  p.lambda0 = 0.4;
  p.d1_minus = 0.5;
  p.k_rate = 2.0;
  return p;
}

}  // namespace

TEST_CASE("configuration validation and names") {
  SchemeConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SchemeConfig{};
  c.c_floor = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SchemeConfig{};
  c.newton_tol = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(jacobian_mode_from_string("finite_difference") == JacobianMode::finite_difference);
  CHECK(jacobian_mode_from_string(to_string(JacobianMode::analytic)) == JacobianMode::analytic);
  CHECK_THROWS(jacobian_mode_from_string("secant"));
}

TEST_CASE("pack and unpack are inverse up to the pressure gauge") {
  std::mt19937 rng(test_seed());
  const GridSpec g = grid(6, 7, AxisBc::periodic, AxisBc::wall);
  State s = random_state(g, rng);
  double mean = 0.0;
  for (std::size_t k = 0; k < s.p.size(); ++k) mean += s.p[k];
  mean /= static_cast<double>(s.p.size());
  for (std::size_t k = 0; k < s.p.size(); ++k) s.p[k] -= mean;
  const MonolithicSystem sys(s, PhysParams{}, SchemeConfig{}, BoundaryPlan(g));
  CHECK(sys.gauged());
  const Eigen::VectorXd x = sys.pack(s);
  CHECK(x[sys.dofs().p(0)] == 0.0);
  State back = sys.unpack(x);
  back.t = s.t;
  CHECK(state_distance(s, back) <= 1e-14);
}

TEST_CASE("the uniform rest state is a fixed point") {
  const PhysParams p;
  SchemeConfig cfg;
  cfg.dt = 1e-3;
  for (AxisBc bx : {AxisBc::periodic, AxisBc::wall})
    for (AxisBc by : {AxisBc::periodic, AxisBc::wall}) {
      const GridSpec g = grid(8, 8, bx, by);
      const State s = uniform_state(g, p, 1.0, 2.0, 2.0, 0.2);
      const Eigen::VectorXd r = residual(s, s, p, cfg, g);
      CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-13);
      const auto [next, rep] = step(s, p, cfg, BoundaryPlan(g));
      CHECK(state_distance(s, next) <= 1e-12);
      CHECK(next.t == doctest::Approx(1e-3));
      CHECK(rep.newton_iterations == 0);
    }
}

TEST_CASE("plane Couette flow between moving walls is a fixed point") {
  const PhysParams p;
  SchemeConfig cfg;
  cfg.dt = 1e-2;
  const GridSpec g = grid(8, 10, AxisBc::periodic, AxisBc::wall);
  BoundaryPlan bc(g);
  bc.set_tangential(Side::top, 0.5);
  bc.set_tangential(Side::bottom, -0.5);
  State s = uniform_state(g, p, 1.0, 0.2, 0.2, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s.u.x(i, j) = g.yc(j) - 0.5;
  const auto [next, rep] = step(s, p, cfg, bc);
  CHECK(state_distance(s, next) <= 1e-12);
}

TEST_CASE("residual rejects concentrations below the positivity floor") {
  const PhysParams p;
  const GridSpec g = grid(6, 6, AxisBc::wall, AxisBc::wall);
  const State s = uniform_state(g, p, 1.0, 0.5, 0.5, 0.5);
  State bad = s;
  bad.c2[5] = -1.0;
  CHECK_THROWS_AS(residual(s, bad, p, SchemeConfig{}, g), PositivityLost);
}

TEST_CASE("analytic Jacobian-vector products match central differences") {
  std::mt19937 rng(test_seed() + 1);
  const PhysParams p = lively_params();
  SchemeConfig cfg;
  cfg.dt = 2e-3;

  std::vector<BoundaryPlan> plans;
  plans.emplace_back(grid(6, 6, AxisBc::periodic, AxisBc::periodic));
  plans.emplace_back(grid(6, 6, AxisBc::periodic, AxisBc::wall));
  plans.emplace_back(grid(6, 7, AxisBc::wall, AxisBc::wall, 1.0, 1.2));
  {
    BoundaryPlan shear(grid(6, 6, AxisBc::periodic, AxisBc::wall));
    shear.set_tangential(Side::top, 1.0);
    shear.set_tangential(Side::bottom, -1.0);
    plans.push_back(shear);
  }
  plans.push_back(vessel_plan());

  PhysParams affine = p;
  affine.q_mode = QMode::affine;
  for (const BoundaryPlan& bc : plans)
    for (const PhysParams& pp : {p, affine}) {
      const GridSpec& g = bc.grid();
      const State old = random_state(g, rng);
      const State guess = random_state(g, rng);
      const MonolithicSystem sys(old, pp, cfg, bc);
      const Eigen::VectorXd x = sys.pack(guess);
      SparseMatrix jac;
      sys.jacobian(x, jac);
      for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd dir(x.size());
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int k = 0; k < dir.size(); ++k) dir[k] = d(rng);
        dir *= 0.1;  // keep x +- h dir admissible
        const double h = 1e-5;
        Eigen::VectorXd rp, rm;
        sys.residual(x + h * dir, rp);
        sys.residual(x - h * dir, rm);
        const Eigen::VectorXd fd = (rp - rm) / (2.0 * h);
        const Eigen::VectorXd an = jac * dir;
        const double err = (fd - an).norm() / std::max(1.0, an.norm());
        CHECK(err <= 1e-5);
      }
    }
}

TEST_CASE("finite-difference Jacobian mode reproduces the analytic step") {
  const PhysParams p = lively_params();
  const GridSpec g = grid(6, 6, AxisBc::periodic, AxisBc::wall);
  State s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      s.phi(i, j) = std::tanh((0.3 - std::hypot(g.xc(i) - 0.5, g.yc(j) - 0.5)) / 0.1);
      s.c1(i, j) = 1.0;
      s.c2(i, j) = 0.5 + 0.2 * g.xc(i);
      s.c3(i, j) = 0.2;
    }
  set_consistent_potentials(s, p, g);
  SchemeConfig a;
  a.dt = 1e-3;
  SchemeConfig f = a;
  f.jac_mode = JacobianMode::finite_difference;
  const State na = step(s, p, a, BoundaryPlan(g)).first;
  const State nf = step(s, p, f, BoundaryPlan(g)).first;
  CHECK(state_distance(na, nf) <= 1e-9);

  const MonolithicSystem sys(s, p, a, BoundaryPlan(g));
  SparseMatrix ja, jf;
  const Eigen::VectorXd x = sys.pack(na);
  sys.jacobian(x, ja);
  sys.jacobian_fd(x, jf);
  const double scale = Eigen::MatrixXd(ja).cwiseAbs().maxCoeff();
  CHECK((Eigen::MatrixXd(ja) - Eigen::MatrixXd(jf)).cwiseAbs().maxCoeff() <= 1e-6 * scale);
}

TEST_CASE("a step conserves mass, dissipates energy and keeps the constraints") {
  const PhysParams p;
  SchemeConfig cfg;
  cfg.dt = 1e-3;
  const GridSpec g = grid(12, 12, AxisBc::periodic, AxisBc::wall);
  State s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      s.phi(i, j) = std::tanh((0.25 - std::hypot(g.xc(i) - 0.5, g.yc(j) - 0.5)) / (std::sqrt(2.0) * 0.08));
      s.c1(i, j) = 2.0;
      s.c2(i, j) = 2.0;
      s.c3(i, j) = 0.2;
    }
  set_consistent_potentials(s, p, g);
  Stepper stepper(p, cfg, BoundaryPlan(g));
  double mass0 = energy(s, p, g).mass_total;
  for (int n = 0; n < 4; ++n) {
    const auto [next, rep] = stepper.step(s);
    CHECK(rep.residual <= cfg.newton_tol);
    CHECK(rep.wall_seconds >= 0.0);
    const EnergyReport e0 = energy(s, p, g), e1 = energy(next, p, g);
    CHECK(std::abs(e1.mass_total - mass0) <= 1e-10 * std::abs(mass0));
    CHECK(e1.total - e0.total <= 10.0 * cfg.newton_tol);
    const Dissipation d = dissipation(s, next, p, g);
    CHECK(e1.total - e0.total + cfg.dt * d.total() <= 10.0 * cfg.newton_tol);
    CHECK(max_abs(div_f2c(next.u, g)) <= 10.0 * cfg.lin_tol);
    double pm = 0.0;
    for (std::size_t k = 0; k < next.p.size(); ++k) pm += next.p[k];
    CHECK(std::abs(pm) <= 1e-10);
    s = next;
  }
}

TEST_CASE("homogeneous data follow the scalar reaction recurrence") {
  PhysParams p;
  p.lambda0 = 0.05;
  SchemeConfig cfg;
  cfg.dt = 1e-3;
  cfg.newton_tol = 1e-12;
  const GridSpec g = grid(4, 4, AxisBc::periodic, AxisBc::wall);
  const double phi0 = 0.3;
  State s = uniform_state(g, p, phi0, 2.0, 2.0, 0.2);
  const HomogeneousReaction oracle{p, phi0};
  const auto ref = oracle.implicit_trajectory({2.0L, 2.0L, 0.2L}, cfg.dt, 20);
  Stepper stepper(p, cfg, BoundaryPlan(g));
  for (int n = 1; n <= 20; ++n) {
    s = stepper.step(s).first;
    for (std::size_t k = 0; k < s.c1.size(); ++k) {
      CHECK(s.phi[k] == doctest::Approx(phi0).epsilon(1e-13));
      CHECK(std::abs(s.c1[k] - static_cast<double>(ref[n][0])) <= 1e-10);
      CHECK(std::abs(s.c2[k] - static_cast<double>(ref[n][1])) <= 1e-10);
      CHECK(std::abs(s.c3[k] - static_cast<double>(ref[n][2])) <= 1e-10);
    }
  }
  // the continuous-time reduction is reached to first order
  const auto exact = oracle.rk4({2.0L, 2.0L, 0.2L}, 20 * cfg.dt, 20000);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(ref[20][i] - exact[i])) <= 5.0 * cfg.dt);
}

TEST_CASE("an open vessel step balances species mass against boundary inflow") {
  const PhysParams p = lively_params();
  SchemeConfig cfg;
  cfg.dt = 5e-3;
  const BoundaryPlan bc = vessel_plan();
  const GridSpec& g = bc.grid();
  State s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      s.phi(i, j) = std::abs(g.yc(j) - 1.0) <= 0.4 ? 0.95 : -0.95;
      s.c1(i, j) = 0.3;
      s.c2(i, j) = 0.3;
    }
  set_consistent_potentials(s, p, g);
  CHECK_FALSE(bc.closed());
  const auto [next, rep] = step(s, p, cfg, bc);
  const auto in = boundary_inflow(s, next, p, bc);
  const double change = energy(next, p, g).mass_total - energy(s, p, g).mass_total;
  CHECK(std::abs(change - (in[0] + in[1] + in[2])) <= 1e-9 * std::max(1.0, std::abs(change)));
  CHECK(max_abs(div_f2c(next.u, g)) <= 1e-8);
}
