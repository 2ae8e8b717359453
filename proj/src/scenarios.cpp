#include "pfreact/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "pfreact/config_io.hpp"
#include "pfreact/errors.hpp"
#include "pfreact/output.hpp"

namespace pfreact {

std::string to_string(InvariantCheck c) {
  switch (c) {
    case InvariantCheck::off: return "off";
    case InvariantCheck::warn: return "warn";
    case InvariantCheck::fail: return "fail";
  }
  return "fail";
}

InvariantCheck invariant_check_from_string(const std::string& s) {
  if (s == "off") return InvariantCheck::off;
  if (s == "warn") return InvariantCheck::warn;
  if (s == "fail") return InvariantCheck::fail;
  throw std::invalid_argument("unknown invariant check mode '" + s + "'");
}

namespace {

const char* const kScenarios[] = {"convergence", "shear", "vessel_straight", "vessel_bifurcated", "custom", "rates"};
const char* const kInitials[] = {"uniform", "circle", "ellipse", "strip", "y_channel"};

long step_count(double t_final, double dt) {
  const double q = t_final / dt;
  const long n = std::lround(q);
  if (n >= 1 && std::abs(q - n) <= 1e-9 * q) return n;
  return static_cast<long>(std::ceil(q));
}

double deg(double a) { return a * std::numbers::pi / 180.0; }

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("ScenarioConfig: " + what); };
  if (std::find(std::begin(kScenarios), std::end(kScenarios), scenario) == std::end(kScenarios))
    fail("unknown scenario '" + scenario + "'");
  if (std::find(std::begin(kInitials), std::end(kInitials), initial) == std::end(kInitials))
    fail("unknown initial data '" + initial + "'");
  grid.validate();
  phys.validate(scenario == "rates");
  scheme.validate();
  invariant_check_from_string(check_invariants);
  if (!(t_final > 0.0)) fail("t_final must be positive");
  if (output_every < 0) fail("output_every must be nonnegative");
  if (scenario == "shear" && grid.bc_y != AxisBc::wall) fail("shear needs walls in y");
  if (scenario == "vessel_straight" || scenario == "vessel_bifurcated") {
    if (grid.bc_x != AxisBc::wall || grid.bc_y != AxisBc::wall) fail("vessel scenarios need walls on all sides");
    if (!(half_width > 0.0)) fail("half_width must be positive");
  }
  if (scenario == "vessel_bifurcated" && !(bifurcation_angle > 0.0 && bifurcation_angle < 80.0))
    fail("bifurcation_angle must lie in (0, 80) degrees");
  if (!(reference_dt > 0.0)) fail("reference_dt must be positive");
  for (double d : ladder)
    if (!(d > 0.0)) fail("ladder entries must be positive");
}

ScenarioConfig preset(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.grid.nx = c.grid.ny = 64;
  c.grid.lx = c.grid.ly = 1.0;
  c.grid.bc_x = AxisBc::periodic;
  c.grid.bc_y = AxisBc::wall;
  c.scheme.dt = 1e-3;
  c.t_final = 0.1;
  c.output_dir = "out/" + scenario;
  if (scenario == "convergence" || scenario == "custom") {
    c.initial = "circle";
    c.phys.lambda0 = 0.05;
  } else if (scenario == "shear") {
    c.initial = "ellipse";
    c.phys.lambda0 = 0.0;
    c.c1_init = 0.2;
    c.c2_init = 0.2;
    c.c3_init = 0.0;
  } else if (scenario == "vessel_straight" || scenario == "vessel_bifurcated") {
    c.initial = scenario == "vessel_straight" ? "strip" : "y_channel";
    c.grid.lx = c.grid.ly = 2.0;
    c.grid.bc_x = c.grid.bc_y = AxisBc::wall;
    c.phys.q_mode = QMode::affine;
    c.phys.d1_plus = 1.0;
    c.phys.d1_minus = 0.5;
    c.phys.lambda0 = 0.5;
    c.scheme.dt = 1e-2;
    c.t_final = 3.0;
    c.output_every = 100;
  } else if (scenario == "rates") {
    c.initial = "circle";
    c.grid.nx = c.grid.ny = 32;
    c.grid.bc_x = c.grid.bc_y = AxisBc::periodic;
    c.phys.s_stab = 8.0;
    c.reference_dt = 6.25e-5;
  } else {
    throw std::invalid_argument("unknown scenario '" + scenario + "'");
  }
  return c;
}

double y_channel_distance(double x, double y, const ScenarioConfig& cfg) {
  // union of three capsules: the parent vessel ending at the bifurcation point
  // and two branches leaving it at +/- the bifurcation angle
  auto segment = [](double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double t = std::clamp(((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(px - ax - t * vx, py - ay - t * vy);
  };
  const double xb = cfg.bifurcation_x, yb = cfg.bifurcation_y;
  const double far = 4.0 * (cfg.grid.lx + cfg.grid.ly);
  const double th = deg(cfg.bifurcation_angle);
  const double d_parent = segment(x, y, xb - far, yb, xb, yb);
  const double d_up = segment(x, y, xb, yb, xb + far * std::cos(th), yb + far * std::sin(th));
  const double d_down = segment(x, y, xb, yb, xb + far * std::cos(th), yb - far * std::sin(th));
  return cfg.half_width - std::min({d_parent, d_up, d_down});
}

State build_initial(const ScenarioConfig& cfg) {
  const GridSpec& g = cfg.grid;
  State s(g);
  const double w = std::sqrt(2.0) * cfg.phys.eps;
  const double xm = 0.5 * g.lx, ym = 0.5 * g.ly;
  std::string kind = cfg.initial;
  if (cfg.scenario == "convergence" || cfg.scenario == "rates") kind = "circle";
  if (cfg.scenario == "shear") kind = "ellipse";
  if (cfg.scenario == "vessel_straight") kind = "strip";
  if (cfg.scenario == "vessel_bifurcated") kind = "y_channel";

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.xc(i), y = g.yc(j);
      double phi = cfg.phi_init, c1 = cfg.c1_init, c2 = cfg.c2_init, c3 = cfg.c3_init;
      if (kind == "circle") {
        phi = std::tanh((cfg.circle_radius - std::hypot(x - xm, y - ym)) / w);
      } else if (kind == "ellipse") {
        const double r = std::sqrt((x - xm) * (x - xm) + 0.5 * (y - ym) * (y - ym));
        phi = std::tanh((cfg.circle_radius - r) / w);
        c2 = cfg.c2_init * (1.0 - std::abs(phi));
      } else if (kind == "strip" || kind == "y_channel") {
        if (kind == "strip")
          phi = std::abs(y - ym) <= cfg.half_width ? 0.95 : -0.95;
        else
          phi = 0.95 * std::tanh(y_channel_distance(x, y, cfg) / w);
        const double hot =
            std::tanh((cfg.hotspot_radius - std::hypot(x - cfg.hotspot_x, y - cfg.hotspot_y)) / w) + 1.2;
        c1 = c2 = hot;
        c3 = 0.0;
      }
      s.phi(i, j) = phi;
      s.c1(i, j) = c1;
      s.c2(i, j) = c2;
      s.c3(i, j) = c3;
    }
  if (kind == "ellipse") {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) s.u.x(i, j) = cfg.shear_rate * (g.yc(j) - ym);
    sync_periodic(s.u, g);
  }
  set_consistent_potentials(s, cfg.phys, g);
  return s;
}

BoundaryPlan build_boundary(const ScenarioConfig& cfg) {
  const GridSpec& g = cfg.grid;
  BoundaryPlan bc(g);
  const double hw = cfg.half_width;
  auto parabola = [amp = cfg.inlet_amplitude](double lo, double hi) {
    return [amp, lo, hi](double y) { return amp * (y - lo) * (hi - y); };
  };
  if (cfg.scenario == "shear") {
    bc.set_tangential(Side::top, cfg.shear_rate * (g.ly - 0.5 * g.ly));
    bc.set_tangential(Side::bottom, cfg.shear_rate * (0.0 - 0.5 * g.ly));
  } else if (cfg.scenario == "vessel_straight") {
    const double lo = 0.5 * g.ly - hw, hi = 0.5 * g.ly + hw;
    bc.set_inflow(Side::left, lo, hi, parabola(lo, hi));
    bc.set_c1_dirichlet(Side::left, lo, hi, cfg.inlet_c1);
    bc.set_outlet(Side::right, lo, hi);
  } else if (cfg.scenario == "vessel_bifurcated") {
    const double lo = cfg.bifurcation_y - hw, hi = cfg.bifurcation_y + hw;
    bc.set_inflow(Side::left, lo, hi, parabola(lo, hi));
    bc.set_c1_dirichlet(Side::left, lo, hi, cfg.inlet_c1);
    const double th = deg(cfg.bifurcation_angle);
    const double rise = (g.lx - cfg.bifurcation_x) * std::tan(th);
    const double half = hw / std::cos(th);
    for (double yc : {cfg.bifurcation_y + rise, cfg.bifurcation_y - rise}) {
      if (yc - half < 0.0 || yc + half > g.ly)
        throw std::invalid_argument("bifurcated vessel: a branch leaves the domain before x = lx");
      bc.set_outlet(Side::right, yc - half, yc + half);
    }
  }
  bc.validate();
  return bc;
}

double band_fraction(const ScalarField& c, const ScalarField& phi, double threshold) {
  double band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double v = std::max(c[k], 0.0);
    total += v;
    if (std::abs(phi[k]) < threshold) band += v;
  }
  return total > 0.0 ? band / total : 0.0;
}

double band_fraction_signed(const ScalarField& c, const ScalarField& phi, double threshold) {
  double band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    total += c[k];
    if (std::abs(phi[k]) < threshold) band += c[k];
  }
  return total != 0.0 ? band / total : 0.0;
}

double upper_interface_height(const ScalarField& phi, const GridSpec& g, double x0, double half_window,
                              double y_center) {
  double best = std::numeric_limits<double>::quiet_NaN();
  const int j0 = std::clamp(static_cast<int>(std::floor(y_center / g.hy())), 0, g.ny - 1);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(g.xc(i) - x0) > half_window) continue;
    if (phi(i, j0) < 0.0) continue;
    for (int j = j0; j + 1 < g.ny; ++j) {
      const double a = phi(i, j), b = phi(i, j + 1);
      if (a >= 0.0 && b < 0.0) {
        const double y = g.yc(j) + g.hy() * a / (a - b);
        if (!(y <= best)) best = y;
        break;
      }
    }
  }
  return best;
}

double wall_band_max(const ScalarField& c3, const ScalarField& phi, const GridSpec& g, double x0, double y0,
                     double radius) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (std::abs(phi(i, j)) >= 0.9) continue;
      if (std::hypot(g.xc(i) - x0, g.yc(j) - y0) > radius) continue;
      if (!(c3(i, j) <= best)) best = c3(i, j);
    }
  return best;
}

double vessel_bulge_height(const State& s, const ScenarioConfig& cfg) {
  return upper_interface_height(s.phi, cfg.grid, cfg.hotspot_x, 0.1, 0.5 * cfg.grid.ly);
}

double bifurcation_wall_c3(const State& s, const ScenarioConfig& cfg) {
  return wall_band_max(s.c3, s.phi, cfg.grid, cfg.bifurcation_x, cfg.bifurcation_y, 2.0 * cfg.phys.eps);
}

namespace {

nlohmann::json config_json(const ScenarioConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  const std::string text = serialize_config(cfg);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    const std::size_t eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
    pos = end + 1;
  }
  return j;
}

std::string snapshot_name(int step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06d", step);
  return buf;
}

double max_abs_divergence(const State& s, const GridSpec& g) {
  const ScalarField d = div_f2c(s.u, g);
  double m = 0.0;
  for (double v : d.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

RunSummary run(const ScenarioConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  const InvariantCheck mode = invariant_check_from_string(cfg.check_invariants);
  const GridSpec& g = cfg.grid;
  const BoundaryPlan bc = build_boundary(cfg);
  State s = build_initial(cfg);
  Stepper stepper(cfg.phys, cfg.scheme, bc);
  const double dt = cfg.scheme.dt;
  const long steps = step_count(cfg.t_final, dt);

  namespace fs = std::filesystem;
  const bool write = !cfg.output_dir.empty();
  std::unique_ptr<DiagnosticsWriter> diag;
  if (write) {
    fs::create_directories(cfg.output_dir);
    save_config(cfg, (fs::path(cfg.output_dir) / "config.txt").string());
    diag = std::make_unique<DiagnosticsWriter>((fs::path(cfg.output_dir) / "diagnostics.csv").string());
  }
  auto snapshot = [&](const State& st, int step) {
    if (!write) return;
    const fs::path base = fs::path(cfg.output_dir) / snapshot_name(step);
    write_snapshot(st, g, base.string() + ".vtk");
    nlohmann::json meta;
    meta["scenario"] = cfg.scenario;
    meta["time"] = st.t;
    meta["step"] = step;
    meta["config"] = config_json(cfg);
    meta["linear_solver"] = LinearSolver::backend_name(cfg.scheme.lin_solver);
    if (cfg.scenario == "vessel_bifurcated") {
      meta["bifurcation_extraction"] = {
          {"definition", "max of c3 over cells with |phi| < 0.9 within radius 2*eps of the bifurcation point"},
          {"value", wall_band_max(st.c3, st.phi, g, cfg.bifurcation_x, cfg.bifurcation_y, 2.0 * cfg.phys.eps)}};
    }
    write_json(meta, base.string() + ".json");
  };

  RunSummary sum;
  const bool species_closed = !bc.has_inflow() && !bc.has_outlet() && !bc.has_dirichlet_scalar();
  const bool energy_closed = bc.closed();
  const double e_tol = 10.0 * cfg.scheme.newton_tol;
  const double div_tol = 10.0 * std::max(cfg.scheme.lin_tol, cfg.scheme.newton_tol);

  auto violation = [&](long step, const std::string& what) {
    const std::string msg = "step " + std::to_string(step) + ": " + what;
    sum.violations.push_back(msg);
    if (mode == InvariantCheck::warn) std::cerr << "invariant warning: " << msg << '\n';
    if (mode == InvariantCheck::fail) throw std::runtime_error("invariant violated at " + msg);
  };

  EnergyReport e0 = energy(s, cfg.phys, g);
  const double mass0 = e0.mass_total;
  if (diag) diag->write(s.t, 0.0, e0, 0, 0.0);
  if (cfg.output_every > 0) snapshot(s, 0);

  std::vector<char> sampled(hooks.sample_times.size(), 0);
  for (long n = 1; n <= steps; ++n) {
    State next;
    StepReport rep;
    try {
      std::tie(next, rep) = stepper.step(s);
    } catch (const SchemeError& err) {
      std::string where;
      if (write) {
        where = (fs::path(cfg.output_dir) / "failed_state.vtk").string();
        write_snapshot(s, g, where);
        where = " (state before the step dumped to " + where + ")";
      }
      throw std::runtime_error("step " + std::to_string(n) + " at t=" + std::to_string(s.t) + " failed: " +
                               err.what() + where);
    }
    EnergyReport e1 = energy(next, cfg.phys, g);
    e1.dissipation = dissipation(s, next, cfg.phys, bc);

    const double div = max_abs_divergence(next, g);
    sum.max_divergence = std::max(sum.max_divergence, div);
    if (mode != InvariantCheck::off) {
      if (div > div_tol) violation(n, "discrete divergence " + std::to_string(div));
      for (const ScalarField* c : {&next.c1, &next.c2, &next.c3})
        for (double v : c->values())
          if (!(v + 1.0 >= cfg.scheme.c_floor)) {
            violation(n, "concentration below the positivity floor");
            break;
          }
    }
    if (species_closed) {
      const double drift = std::abs(e1.mass_total - mass0) / std::max(std::abs(mass0), 1e-300);
      sum.max_mass_drift = std::max(sum.max_mass_drift, drift);
      if (mode != InvariantCheck::off && drift > 1e-8) violation(n, "mass drift " + std::to_string(drift));
    } else {
      const std::array<double, 3> in = boundary_inflow(s, next, cfg.phys, bc);
      const double balance = std::abs(e1.mass_total - e0.mass_total - (in[0] + in[1] + in[2])) /
                             std::max(std::abs(e0.mass_total), 1e-300);
      sum.max_balance_error = std::max(sum.max_balance_error, balance);
    }
    const double rise = e1.total - e0.total;
    sum.max_energy_rise = std::max(sum.max_energy_rise, rise);
    if (energy_closed) {
      const double budget = rise + dt * e1.dissipation.total();
      sum.max_budget_violation = std::max(sum.max_budget_violation, budget);
      if (mode != InvariantCheck::off) {
        if (rise > e_tol) violation(n, "energy increased by " + std::to_string(rise));
        if (budget > e_tol) violation(n, "energy budget exceeded by " + std::to_string(budget));
      }
    }

    if (diag) diag->write(next.t, dt, e1, rep.newton_iterations, rep.residual);
    if (cfg.output_every > 0 && n % cfg.output_every == 0) snapshot(next, static_cast<int>(n));
    if (hooks.on_step) hooks.on_step(static_cast<int>(n), next);
    for (std::size_t k = 0; k < sampled.size(); ++k)
      if (!sampled[k] && next.t >= hooks.sample_times[k] - 1e-9 * dt) {
        sampled[k] = 1;
        if (hooks.on_sample) hooks.on_sample(hooks.sample_times[k], next);
      }
    s = std::move(next);
    e0 = e1;
    sum.steps = static_cast<int>(n);
  }
  if (write && (cfg.output_every == 0 || steps % cfg.output_every != 0)) snapshot(s, static_cast<int>(steps));
  if (write) {
    nlohmann::json j;
    j["scenario"] = cfg.scenario;
    j["steps"] = sum.steps;
    j["max_mass_drift"] = sum.max_mass_drift;
    j["max_energy_rise"] = sum.max_energy_rise;
    j["max_budget_violation"] = sum.max_budget_violation;
    j["max_divergence"] = sum.max_divergence;
    j["max_boundary_balance_error"] = sum.max_balance_error;
    j["violations"] = sum.violations;
    write_json(j, (fs::path(cfg.output_dir) / "summary.json").string());
  }
  sum.final_state = std::move(s);
  return sum;
}

RateTable full_convergence(const ScenarioConfig& cfg) {
  cfg.validate();
  const BoundaryPlan bc = build_boundary(cfg);
  const State init = build_initial(cfg);
  auto advance = [&](double dt) {
    const double q = cfg.t_final / dt;
    const long n = std::lround(q);
    if (n < 1 || std::abs(q - n) > 1e-9 * q)
      throw std::invalid_argument("convergence ladder: dt must divide t_final");
    SchemeConfig sc = cfg.scheme;
    sc.dt = dt;
    Stepper st(cfg.phys, sc, bc);
    State s = init;
    for (long k = 0; k < n; ++k) s = st.step(s).first;
    return s;
  };
  for (double dt : cfg.ladder)
    if (!(cfg.reference_dt < dt)) throw std::invalid_argument("convergence ladder: reference_dt must be finest");
  const State ref = advance(cfg.reference_dt);
  const GridSpec& g = cfg.grid;
  RateTable t;
  t.names = {"err_u_L2", "err_phi_L2", "err_c1_L2", "err_c2_L2", "err_c3_L2"};
  for (double dt : cfg.ladder) {
    const State s = advance(dt);
    FaceField eu = s.u;
    for (std::size_t k = 0; k < eu.x_values().size(); ++k) eu.x_values()[k] -= ref.u.x_values()[k];
    for (std::size_t k = 0; k < eu.y_values().size(); ++k) eu.y_values()[k] -= ref.u.y_values()[k];
    auto l2 = [&](const ScalarField& a, const ScalarField& b) {
      ScalarField e = a;
      for (std::size_t k = 0; k < e.size(); ++k) e[k] -= b[k];
      return std::sqrt(inner(e, e, g));
    };
    t.dts.push_back(dt);
    t.errors.push_back({std::sqrt(inner_face(eu, eu, g)), l2(s.phi, ref.phi), l2(s.c1, ref.c1), l2(s.c2, ref.c2),
                        l2(s.c3, ref.c3)});
  }
  return t;
}

ReducedParams reduced_params_from(const ScenarioConfig& cfg) {
  ReducedParams r;
  r.re = cfg.phys.re;
  r.mobility = cfg.phys.mobility;
  r.eps = cfg.phys.eps;
  r.s_stab = cfg.phys.s_stab;
  r.f_trunc = cfg.phys.f_trunc;
  r.k_rate = cfg.phys.k_rate;
  r.diffusivity = cfg.phys.d2;
  return r;
}

}  // namespace pfreact
