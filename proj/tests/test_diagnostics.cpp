#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pfreact/diagnostics.hpp"
#include "support.hpp"

using namespace pfreact;
using namespace pfreact::testing;

namespace {

State bump_state(const GridSpec& g, const PhysParams& p) {
  State s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double r = std::hypot(g.xc(i) - 0.5, g.yc(j) - 0.5);
      s.phi(i, j) = std::tanh((0.25 - r) / (std::sqrt(2.0) * 0.08));
      s.c1(i, j) = 1.0 + 0.5 * std::cos(2.0 * M_PI * g.xc(i));
      s.c2(i, j) = 1.5;
      s.c3(i, j) = 0.3 * (1.0 - std::abs(s.phi(i, j)));
    }
  set_consistent_potentials(s, p, g);
  return s;
}

}  // namespace

TEST_CASE("energy of the resting pure phase has a closed form") {
  PhysParams p;
  p.m_pen = 0.7;
  const GridSpec g = grid(10, 8, AxisBc::wall, AxisBc::periodic, 2.0, 1.0);
  const State s = uniform_state(g, p, 1.0, 0.0, 0.0, 0.0);
  const EnergyReport e = energy(s, p, g);
  const double area = 2.0;
  CHECK(e.kinetic == 0.0);
  CHECK(e.mixing == doctest::Approx(0.0).epsilon(1e-15));
  for (double v : e.entropy) CHECK(v == doctest::Approx(-area).epsilon(1e-14));
  CHECK(e.penalty == doctest::Approx(2.0 * p.m_pen * area).epsilon(1e-14));
  CHECK(e.adhesion == 0.0);
  CHECK(e.total == doctest::Approx(-3.0 * area + 2.0 * p.m_pen * area).epsilon(1e-14));
  CHECK(e.mass_total == 0.0);

  // phi = 0 puts the whole domain at the well top: mixing = lambda F(0) area
  const State mid = uniform_state(g, p, 0.0, 1.0, 2.0, 0.5);
  const EnergyReport m = energy(mid, p, g);
  CHECK(m.mixing == doctest::Approx(lambda_of(0.5, p) * 0.25 * area).epsilon(1e-14));
  CHECK(m.penalty == 0.0);
  CHECK(m.adhesion == doctest::Approx(-p.n_adh / 4.0 * (3.0 + 1.5) * area).epsilon(1e-14));
  CHECK(m.entropy[1] == doctest::Approx(3.0 * (std::log(3.0) - 1.0) * area).epsilon(1e-14));
  CHECK(m.mass_total == doctest::Approx(3.5 * area).epsilon(1e-14));
}

TEST_CASE("scaling the velocity only scales the kinetic energy") {
  std::mt19937 rng(test_seed());
  const PhysParams p;
  const GridSpec g = grid(12, 12, AxisBc::periodic, AxisBc::wall);
  State s = bump_state(g, p);
  s.u = random_solenoidal(g, rng, 0.3);
  const EnergyReport a = energy(s, p, g);
  for (double& v : s.u.x_values()) v *= 2.0;
  for (double& v : s.u.y_values()) v *= 2.0;
  const EnergyReport b = energy(s, p, g);
  CHECK(a.kinetic > 0.0);
  CHECK(b.kinetic == doctest::Approx(4.0 * a.kinetic).epsilon(1e-14));
  CHECK(b.mixing == a.mixing);
  CHECK(b.entropy == a.entropy);
  CHECK(b.penalty == a.penalty);
  CHECK(b.adhesion == a.adhesion);
}

TEST_CASE("uniform rest states dissipate nothing") {
  const PhysParams p;
  const GridSpec g = grid(8, 8, AxisBc::wall, AxisBc::wall);
  const State s = uniform_state(g, p, 1.0, 2.0, 2.0, 0.2);
  const Dissipation d = dissipation(s, s, p, g);
  CHECK(d.viscous == 0.0);
  CHECK(d.phase == doctest::Approx(0.0).epsilon(1e-20));
  for (double v : d.species) CHECK(v == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(d.reaction == 0.0);  // P(1) = 0
  CHECK(d.total() == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("each dissipation term sees only its own field") {
  std::mt19937 rng(test_seed() + 3);
  const PhysParams p;
  const GridSpec g = grid(10, 10, AxisBc::periodic, AxisBc::periodic);
  const State s = uniform_state(g, p, 1.0, 1.0, 1.0, 1.0);

  State v = s;
  v.u = random_solenoidal(g, rng, 0.2);
  Dissipation d = dissipation(s, v, p, g);
  CHECK(d.viscous > 0.0);
  CHECK(d.phase == 0.0);
  CHECK(d.species[0] == 0.0);

  State m = s;
  m.mu_phi = random_scalar(g, rng);
  d = dissipation(s, m, p, g);
  CHECK(d.viscous == 0.0);
  CHECK(d.phase > 0.0);
  const FaceField gm = grad_c2f(m.mu_phi, g);
  CHECK(d.phase == doctest::Approx(p.mobility * inner_face(gm, gm, g)).epsilon(1e-14));

  State c = s;
  c.mu2 = random_scalar(g, rng);
  d = dissipation(s, c, p, g);
  CHECK(d.species[0] == 0.0);
  CHECK(d.species[1] > 0.0);
  CHECK(d.species[2] == 0.0);
  CHECK(d.reaction == 0.0);  // phi = 1 switches the reaction off

  // uniform gradient-free affinity away from the wells: reaction term alone
  State r = uniform_state(g, p, 0.0, 1.0, 1.0, 1.0);
  State rn = r;
  for (std::size_t k = 0; k < rn.mu1.size(); ++k) rn.mu1[k] += 0.5;
  d = dissipation(r, rn, p, g);
  const double aff = p.a1 * rn.mu1[0] + p.a2 * rn.mu2[0] - p.a3 * rn.mu3[0];
  CHECK(d.reaction == doctest::Approx(proliferation(0.0, p.k_rate) * aff * aff * g.lx * g.ly).epsilon(1e-13));
  CHECK(d.species[0] == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("moving walls enter the viscous term through the ghost values") {
  const GridSpec g = grid(6, 8, AxisBc::periodic, AxisBc::wall);
  BoundaryPlan bc(g);
  bc.set_tangential(Side::top, 0.5);
  bc.set_tangential(Side::bottom, -0.5);
  FaceField u(g);
  CHECK(velocity_grad_sq(u, bc) == 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.x(i, j) = g.yc(j) - 0.5;
  // linear shear matching the walls: the wall work (u du/dn summed over both
  // walls = 1) cancels the integral of |grad u|^2 = 1 in <-Lap u, u>
  CHECK(velocity_grad_sq(u, bc) == doctest::Approx(0.0).epsilon(1e-12));
  // against resting walls the same field pays the jump to the wall value
  const double h = g.hy(), u0 = g.yc(0) - 0.5;
  // per column: ny - 1 interior differences of size 1 plus two ghost jumps
  const double per_column = (g.ny - 1) + 4.0 * u0 * u0 / (h * h);
  CHECK(velocity_grad_sq(u, BoundaryPlan(g)) == doctest::Approx(g.nx * per_column * g.cell_area()).epsilon(1e-12));
}

TEST_CASE("the energy budget inequality holds along a short run") {
  const PhysParams p;
  SchemeConfig cfg;
  cfg.dt = 2e-3;
  const GridSpec g = grid(12, 12, AxisBc::wall, AxisBc::wall);
  State s = bump_state(g, p);
  Stepper stepper(p, cfg, BoundaryPlan(g));
  for (int n = 0; n < 3; ++n) {
    const State next = stepper.step(s).first;
    const double de = energy(next, p, g).total - energy(s, p, g).total;
    const Dissipation d = dissipation(s, next, p, g);
    CHECK(d.viscous >= 0.0);
    CHECK(d.phase >= 0.0);
    for (double v : d.species) CHECK(v >= 0.0);
    CHECK(d.reaction >= 0.0);
    CHECK(de <= 0.0);
    CHECK(de + cfg.dt * d.total() <= 1e-9);
    s = next;
  }
}

TEST_CASE("diagnostics ledger format") {
  const auto dir = std::filesystem::temp_directory_path() / ("pfreact_diag_" + std::to_string(test_seed()));
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "diag.csv").string();
  EnergyReport e;
  e.total = -1.25;
  e.kinetic = 0.1;
  e.mass_total = 1.0 / 3.0;
  e.dissipation.species = {1e-300, 2.0, 3.0};
  {
    DiagnosticsWriter w(path);
    w.write(0.0, 1e-3, e, 0, 0.0);
    w.write(1e-3, 1e-3, e, 4, 3.5e-11);
    CHECK(w.rows() == 2);
  }
  std::ifstream in(path);
  std::string header, row0, row1, extra;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK_FALSE(static_cast<bool>(std::getline(in, extra)));
  CHECK(header ==
        "t,dt,total_mass,E_total,E_kinetic,E_mixing,E_entropy1,E_entropy2,E_entropy3,E_penalty,E_adhesion,"
        "D_viscous,D_phase,D_c1,D_c2,D_c3,D_reaction,newton_iters,residual");
  std::vector<std::string> cells;
  std::stringstream ss(row1);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() == 19);
  CHECK(std::stod(cells[2]) == 1.0 / 3.0);  // round trip at full precision
  CHECK(std::stod(cells[3]) == -1.25);
  CHECK(std::stod(cells[13]) == 1e-300);
  CHECK(cells[17] == "4");
  CHECK(std::stod(cells[18]) == 3.5e-11);
  CHECK_THROWS_AS(DiagnosticsWriter((dir / "missing" / "x.csv").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}
