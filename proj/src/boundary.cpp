#include "pfreact/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace pfreact {

namespace {

bool on_periodic_axis(Side s, const GridSpec& g) {
  return (s == Side::left || s == Side::right) ? g.bc_x == AxisBc::periodic : g.bc_y == AxisBc::periodic;
}

// Face-center coordinate along a side.
double along(Side s, int k, const GridSpec& g) { return (s == Side::left || s == Side::right) ? g.yc(k) : g.xc(k); }

}  // namespace

BoundaryPlan::BoundaryPlan(const GridSpec& g) : grid_(g) {
  g.validate();
  if (g.bc_x == AxisBc::wall) {
    sides_[0].assign(g.ny, FaceBc{});
    sides_[1].assign(g.ny, FaceBc{});
  }
  if (g.bc_y == AxisBc::wall) {
    sides_[2].assign(g.nx, FaceBc{});
    sides_[3].assign(g.nx, FaceBc{});
  }
}

void BoundaryPlan::set_inflow(Side s, double lo, double hi, const std::function<double(double)>& profile) {
  if (on_periodic_axis(s, grid_)) throw std::invalid_argument("inflow on a periodic axis");
  auto& faces = side(s);
  for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
    const double c = along(s, k, grid_);
    if (c >= lo && c <= hi) {
      faces[k].kind = VelocityBc::inflow;
      faces[k].normal_velocity = profile(c);
    }
  }
}

void BoundaryPlan::set_outlet(Side s, double lo, double hi) {
  if (on_periodic_axis(s, grid_)) throw std::invalid_argument("outlet on a periodic axis");
  auto& faces = side(s);
  for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
    const double c = along(s, k, grid_);
    if (c >= lo && c <= hi) faces[k].kind = VelocityBc::outlet;
  }
}

void BoundaryPlan::set_c1_dirichlet(Side s, double lo, double hi, double value) {
  if (on_periodic_axis(s, grid_)) throw std::invalid_argument("Dirichlet data on a periodic axis");
  auto& faces = side(s);
  for (int k = 0; k < static_cast<int>(faces.size()); ++k) {
    const double c = along(s, k, grid_);
    if (c >= lo && c <= hi) faces[k].c1_dirichlet = value;
  }
}

bool BoundaryPlan::has_outlet() const {
  for (const auto& faces : sides_)
    for (const auto& f : faces)
      if (f.kind == VelocityBc::outlet) return true;
  return false;
}

bool BoundaryPlan::has_inflow() const {
  for (const auto& faces : sides_)
    for (const auto& f : faces)
      if (f.kind == VelocityBc::inflow) return true;
  return false;
}

bool BoundaryPlan::has_dirichlet_scalar() const {
  for (const auto& faces : sides_)
    for (const auto& f : faces)
      if (f.c1_dirichlet) return true;
  return false;
}

bool BoundaryPlan::closed() const {
  for (double t : tangential_)
    if (t != 0.0) return false;
  return !has_outlet() && !has_inflow() && !has_dirichlet_scalar();
}

void BoundaryPlan::validate() const {
  grid_.validate();
  const std::array<int, 4> expected{grid_.bc_x == AxisBc::wall ? grid_.ny : 0, grid_.bc_x == AxisBc::wall ? grid_.ny : 0,
                                    grid_.bc_y == AxisBc::wall ? grid_.nx : 0, grid_.bc_y == AxisBc::wall ? grid_.nx : 0};
  for (int s = 0; s < 4; ++s)
    if (static_cast<int>(sides_[s].size()) != expected[s])
      throw std::invalid_argument("boundary plan does not match grid");
  if (has_inflow() && !has_outlet()) throw std::invalid_argument("inflow without an outlet");
  for (const auto& faces : sides_)
    for (const auto& f : faces) {
      if (!std::isfinite(f.normal_velocity)) throw std::invalid_argument("non-finite boundary velocity");
      if (f.c1_dirichlet && !(*f.c1_dirichlet > -1.0)) throw std::invalid_argument("Dirichlet c1 must exceed -1");
    }
}

}  // namespace pfreact
