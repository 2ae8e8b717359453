// Command-line driver for the scenario experiments.
//
//   pfreact converge   [flags]   dt ladder of the closed-box problem + rate table
//   pfreact shear      [flags]   interface confinement with and without M, N
//   pfreact vessel     [flags]   straight vessel, bulge height at t = 1, 2, 3
//   pfreact bifurcate  [flags]   bifurcated vessel over a set of angles
//   pfreact rates      [flags]   reduced-system self-convergence table
//   pfreact custom <config> [flags]

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfreact/config_io.hpp"
#include "pfreact/output.hpp"
#include "pfreact/scenarios.hpp"

namespace fs = std::filesystem;
using namespace pfreact;

namespace {

struct SharedFlags {
  std::optional<double> dt, tfinal;
  std::optional<int> nx, ny;
  std::optional<std::string> out;
  std::optional<unsigned> seed;
  std::string check = "fail";
  std::vector<std::string> set;  // extra key=value overrides
};

void add_shared(CLI::App* app, SharedFlags& f) {
  app->add_option("--dt", f.dt, "time step");
  app->add_option("--nx", f.nx, "cells along x");
  app->add_option("--ny", f.ny, "cells along y");
  app->add_option("--tfinal", f.tfinal, "final time");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--seed", f.seed, "seed for randomized fixtures");
  app->add_option("--check-invariants", f.check, "off | warn | fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}));
  app->add_option("--set", f.set, "extra config override key=value (repeatable)");
}

void apply(const SharedFlags& f, ScenarioConfig& cfg) {
  if (f.dt) cfg.scheme.dt = *f.dt;
  if (f.nx) cfg.grid.nx = *f.nx;
  if (f.ny) cfg.grid.ny = *f.ny;
  if (f.tfinal) cfg.t_final = *f.tfinal;
  if (f.out) cfg.output_dir = *f.out;
  if (f.seed) cfg.seed = *f.seed;
  cfg.check_invariants = f.check;
  for (const std::string& kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, CLI::detail::trim_copy(kv.substr(0, eq)), CLI::detail::trim_copy(kv.substr(eq + 1)));
  }
  cfg.validate();
}

void print_summary(const RunSummary& s) {
  std::printf("steps %d  max mass drift %.3e  max energy rise %.3e  max divergence %.3e\n", s.steps,
              s.max_mass_drift, s.max_energy_rise, s.max_divergence);
  if (s.max_balance_error > 0.0) std::printf("boundary balance error %.3e\n", s.max_balance_error);
  for (const auto& v : s.violations) std::printf("warning: %s\n", v.c_str());
}

RunHooks progress_hooks(const ScenarioConfig& cfg) {
  RunHooks h;
  const long every = std::max<long>(1, std::lround(cfg.t_final / cfg.scheme.dt) / 20);
  h.on_step = [every](int n, const State& s) {
    if (n % every == 0) std::fprintf(stderr, "  step %d  t = %.4f\n", n, s.t);
  };
  return h;
}

void print_table(const RateTable& t) {
  std::printf("%-10s", "dt");
  for (const auto& n : t.names) std::printf(" %14s %6s", n.c_str(), "order");
  std::printf("\n");
  for (std::size_t r = 0; r < t.dts.size(); ++r) {
    std::printf("%-10.3e", t.dts[r]);
    for (std::size_t c = 0; c < t.names.size(); ++c) {
      if (r == 0)
        std::printf(" %14.6e %6s", t.errors[r][c], "-");
      else
        std::printf(" %14.6e %6.2f", t.errors[r][c], t.order(r, c));
    }
    std::printf("\n");
  }
}

int cmd_converge(const SharedFlags& f, bool skip_run, std::optional<double> ref_dt) {
  ScenarioConfig cfg = preset("convergence");
  apply(f, cfg);
  if (ref_dt) cfg.reference_dt = *ref_dt;
  fs::create_directories(cfg.output_dir);
  if (!skip_run) {
    std::printf("closed-box run at dt = %g\n", cfg.scheme.dt);
    print_summary(run(cfg, progress_hooks(cfg)));
  }
  std::printf("dt ladder against reference dt = %g\n", cfg.reference_dt);
  const RateTable t = full_convergence(cfg);
  print_table(t);
  const std::string path = (fs::path(cfg.output_dir) / "rates.csv").string();
  t.write_csv(path);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_shear(const SharedFlags& f) {
  const ScenarioConfig base = [&] {
    ScenarioConfig c = preset("shear");
    apply(f, c);
    return c;
  }();
  nlohmann::json out;
  for (const double mn : {1.0, 0.0}) {
    ScenarioConfig cfg = base;
    cfg.phys.m_pen = cfg.phys.n_adh = mn;
    const std::string tag = mn > 0.0 ? "coupled" : "uncoupled";
    cfg.output_dir = (fs::path(base.output_dir) / tag).string();
    std::printf("M = N = %g\n", mn);
    const RunSummary s = run(cfg, progress_hooks(cfg));
    print_summary(s);
    const double b2 = band_fraction(s.final_state.c2, s.final_state.phi, 0.95);
    const double b3 = band_fraction(s.final_state.c3, s.final_state.phi, 0.95);
    const double s2 = band_fraction_signed(s.final_state.c2, s.final_state.phi, 0.95);
    const double s3 = band_fraction_signed(s.final_state.c3, s.final_state.phi, 0.95);
    std::printf("band fraction (|phi| < 0.95, positive part): c2 %.6f  c3 %.6f\n", b2, b3);
    std::printf("signed band quotient:                       c2 %.6f  c3 %.6f\n", s2, s3);
    out[tag] = {{"m_pen", mn},      {"n_adh", mn},      {"band_c2", b2},         {"band_c3", b3},
                {"signed_c2", s2}, {"signed_c3", s3}, {"t", s.final_state.t}};
  }
  write_json(out, (fs::path(base.output_dir) / "shear_summary.json").string());
  return 0;
}

int cmd_vessel(const SharedFlags& f) {
  ScenarioConfig cfg = preset("vessel_straight");
  apply(f, cfg);
  RunHooks h = progress_hooks(cfg);
  nlohmann::json samples = nlohmann::json::array();
  for (double t = 1.0; t <= cfg.t_final + 1e-12; t += 1.0) h.sample_times.push_back(t);
  h.on_sample = [&](double t, const State& s) {
    const double height = vessel_bulge_height(s, cfg);
    const double band = band_fraction(s.c3, s.phi, 1.0);
    std::printf("t = %.3f  bulge height %.6f  c3 band fraction %.6f\n", t, height, band);
    samples.push_back({{"t", t}, {"bulge_height", height}, {"c3_band_fraction", band}});
  };
  print_summary(run(cfg, h));
  write_json({{"samples", samples}}, (fs::path(cfg.output_dir) / "vessel_summary.json").string());
  return 0;
}

int cmd_bifurcate(const SharedFlags& f, const std::vector<double>& angles) {
  ScenarioConfig base = preset("vessel_bifurcated");
  apply(f, base);
  nlohmann::json rows = nlohmann::json::array();
  for (const double a : angles) {
    ScenarioConfig cfg = base;
    cfg.bifurcation_angle = a;
    cfg.output_dir = (fs::path(base.output_dir) / ("angle_" + std::to_string(static_cast<int>(a)))).string();
    cfg.validate();
    std::printf("bifurcation angle %g deg\n", a);
    const RunSummary s = run(cfg, progress_hooks(cfg));
    print_summary(s);
    const double v = bifurcation_wall_c3(s.final_state, cfg);
    std::printf("max wall-band c3 near the bifurcation point: %.6f\n", v);
    rows.push_back({{"angle", a}, {"wall_band_c3", v}});
  }
  write_json({{"angles", rows}}, (fs::path(base.output_dir) / "bifurcation_summary.json").string());
  return 0;
}

int cmd_rates(const SharedFlags& f) {
  ScenarioConfig cfg = preset("rates");
  apply(f, cfg);
  const ReducedParams p = reduced_params_from(cfg);
  p.validate();
  std::printf("reduced system, S = %g (2L = %g), reference dt = %g\n", p.s_stab, 2.0 * p.lipschitz(),
              cfg.reference_dt);
  const RateTable t = convergence_study(cfg.grid, p, cfg.scheme, cfg.ladder, cfg.reference_dt, cfg.t_final,
                                        smooth_reduced_initial(cfg.grid, p));
  print_table(t);
  fs::create_directories(cfg.output_dir);
  const std::string path = (fs::path(cfg.output_dir) / "rates.csv").string();
  t.write_csv(path);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_custom(const SharedFlags& f, const std::string& config_path) {
  ScenarioConfig cfg = load_config(config_path);
  apply(f, cfg);
  print_summary(run(cfg, progress_hooks(cfg)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field interfacial reaction / transport / deformation simulator"};
  app.require_subcommand(1);

  SharedFlags f;
  bool skip_run = false;
  std::optional<double> ref_dt;
  std::vector<double> angles{14.0, 20.0, 26.0};
  std::string config_path;

  auto* converge = app.add_subcommand("converge", "closed-box run and the full-system dt ladder");
  add_shared(converge, f);
  converge->add_flag("--ladder-only", skip_run, "skip the single run at --dt");
  converge->add_option("--reference-dt", ref_dt, "time step of the reference solution");
  auto* shear = app.add_subcommand("shear", "shear-driven adsorption with M = N = 1 and M = N = 0");
  add_shared(shear, f);
  auto* vessel = app.add_subcommand("vessel", "straight vessel");
  add_shared(vessel, f);
  auto* bifurcate = app.add_subcommand("bifurcate", "bifurcated vessel over bifurcation angles");
  add_shared(bifurcate, f);
  bifurcate->add_option("--angles", angles, "bifurcation angles in degrees")->expected(1, -1);
  auto* rates = app.add_subcommand("rates", "reduced-system self-convergence");
  add_shared(rates, f);
  auto* custom = app.add_subcommand("custom", "run a configuration file");
  custom->add_option("config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
  add_shared(custom, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*converge) return cmd_converge(f, skip_run, ref_dt);
    if (*shear) return cmd_shear(f);
    if (*vessel) return cmd_vessel(f);
    if (*bifurcate) return cmd_bifurcate(f, angles);
    if (*rates) return cmd_rates(f);
    if (*custom) return cmd_custom(f, config_path);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
