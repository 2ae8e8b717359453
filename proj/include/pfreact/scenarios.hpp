#pragma once

// Experiment definitions: configuration, initial data, boundary plans, the
// time loop with invariant checks, and the scenario-specific measurements.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pfreact/boundary.hpp"
#include "pfreact/diagnostics.hpp"
#include "pfreact/mesh.hpp"
#include "pfreact/physics.hpp"
#include "pfreact/reduced.hpp"
#include "pfreact/scheme.hpp"

namespace pfreact {

enum class InvariantCheck { off, warn, fail };

std::string to_string(InvariantCheck c);
InvariantCheck invariant_check_from_string(const std::string& s);

struct ScenarioConfig {
  std::string scenario = "convergence";  // convergence | shear | vessel_straight | vessel_bifurcated | custom
  std::string initial = "circle";        // custom only: uniform | circle | ellipse | strip | y_channel
  GridSpec grid;
  PhysParams phys;
  SchemeConfig scheme;
  double t_final = 0.1;
  int output_every = 0;  // snapshot cadence in steps; 0 writes only the final state
  std::string output_dir = "out";
  std::string check_invariants = "fail";
  unsigned seed = 0;

  // scenario knobs
  double circle_radius = 0.20;
  double phi_init = 1.0;  // uniform custom state
  double c1_init = 2.0;
  double c2_init = 2.0;
  double c3_init = 0.2;
  double shear_rate = 10.0;
  double inlet_amplitude = 25.0;  // profile amplitude * (y - y0)(y1 - y)
  double inlet_c1 = 2.0;
  double half_width = 0.2;
  double bifurcation_angle = 14.0;  // degrees between each branch and the parent axis
  double bifurcation_x = 0.5;
  double bifurcation_y = 1.0;
  double hotspot_x = 1.0;
  double hotspot_y = 1.2;
  double hotspot_radius = 0.08;
  // convergence ladder
  std::vector<double> ladder{4e-3, 2e-3, 1e-3, 5e-4};
  double reference_dt = 1e-4;

  /// Throws std::invalid_argument on an invalid combination.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Defaults of each named scenario (grid, parameters, time step, knobs).
ScenarioConfig preset(const std::string& scenario);

State build_initial(const ScenarioConfig& cfg);
BoundaryPlan build_boundary(const ScenarioConfig& cfg);

/// Signed-distance-like indicator of the Y-shaped channel: positive inside.
double y_channel_distance(double x, double y, const ScenarioConfig& cfg);

// ---- measurements ----

/// Fraction of the integral of max(c, 0) lying in the band {|phi| < threshold}.
/// The shifted concentrations may dip below zero, where a signed quotient
/// stops being a fraction; the positive part keeps the result in [0, 1].
double band_fraction(const ScalarField& c, const ScalarField& phi, double threshold);
/// The signed quotient (band integral of c over the total integral of c).
double band_fraction_signed(const ScalarField& c, const ScalarField& phi, double threshold);
/// Height of the phi = 0 crossing above y_center, maximised over the columns
/// whose centers lie within half_window of x0.
double upper_interface_height(const ScalarField& phi, const GridSpec& g, double x0, double half_window,
                              double y_center);
/// Max of c3 over the wall band {|phi| < 0.9} within radius of (x0, y0).
double wall_band_max(const ScalarField& c3, const ScalarField& phi, const GridSpec& g, double x0, double y0,
                     double radius);

/// Straight vessel: upper interface height in the columns around the hotspot
/// abscissa (window of half-width 0.1).
double vessel_bulge_height(const State& s, const ScenarioConfig& cfg);
/// Bifurcated vessel: max wall-band c3 within 2 eps of the bifurcation point.
double bifurcation_wall_c3(const State& s, const ScenarioConfig& cfg);

// ---- time loop ----

struct RunSummary {
  int steps = 0;
  double max_mass_drift = 0.0;    // relative, closed-boundary runs only
  double max_energy_rise = 0.0;   // max of E^{n+1} - E^n
  double max_budget_violation = 0.0;  // max of (E^{n+1} - E^n) + dt D
  double max_divergence = 0.0;
  double max_balance_error = 0.0;  // open runs: |mass change - boundary inflow|, relative
  std::vector<std::string> violations;
  State final_state;
};

struct RunHooks {
  /// Called after every accepted step with (step index, state).
  std::function<void(int, const State&)> on_step;
  /// Times at which on_sample is called (first step reaching each).
  std::vector<double> sample_times;
  std::function<void(double, const State&)> on_sample;
};

/// Time loop from build_initial to t_final. With an empty output_dir nothing
/// is written; otherwise diagnostics.csv, snapshots and metadata go there.
/// Invariant violations follow cfg.check_invariants.
RunSummary run(const ScenarioConfig& cfg, const RunHooks& hooks = {});

/// Full-system dt ladder against a fine reference: L2 errors of u, phi, c1,
/// c2, c3 at t_final.
RateTable full_convergence(const ScenarioConfig& cfg);

ReducedParams reduced_params_from(const ScenarioConfig& cfg);

}  // namespace pfreact
