#pragma once

// Per-side boundary data for the velocity and species fields. Sides on a
// periodic axis carry no entries. Everything not listed is a no-slip wall
// for velocity and a zero-flux (Neumann) wall for scalars.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "pfreact/mesh.hpp"

namespace pfreact {

enum class Side { left = 0, right = 1, bottom = 2, top = 3 };

enum class VelocityBc { wall, inflow, outlet };

struct FaceBc {
  VelocityBc kind = VelocityBc::wall;
  double normal_velocity = 0.0;  // signed along +x / +y; used for inflow
  std::optional<double> c1_dirichlet;
};

class BoundaryPlan {
 public:
  BoundaryPlan() = default;
  /// All walls (or periodic, per the grid's axis families).
  explicit BoundaryPlan(const GridSpec& g);

  const GridSpec& grid() const { return grid_; }

  /// Boundary faces of a side, indexed by the cell index along the side.
  const std::vector<FaceBc>& side(Side s) const { return sides_[static_cast<int>(s)]; }
  std::vector<FaceBc>& side(Side s) { return sides_[static_cast<int>(s)]; }

  /// Tangential wall velocity of a side (moving lid), applied at no-slip ghosts.
  double tangential(Side s) const { return tangential_[static_cast<int>(s)]; }
  void set_tangential(Side s, double v) { tangential_[static_cast<int>(s)] = v; }

  /// Mark faces whose center coordinate lies in [lo, hi] along the side.
  void set_inflow(Side s, double lo, double hi, const std::function<double(double)>& profile);
  void set_outlet(Side s, double lo, double hi);
  void set_c1_dirichlet(Side s, double lo, double hi, double value);

  bool has_outlet() const;
  bool has_inflow() const;
  bool has_dirichlet_scalar() const;
  /// Closed: no inflow, no outlet, no moving walls, no Dirichlet scalars.
  bool closed() const;

  /// Throws std::invalid_argument when the plan contradicts the grid.
  void validate() const;

 private:
  GridSpec grid_;
  std::array<std::vector<FaceBc>, 4> sides_;
  std::array<double, 4> tangential_{0.0, 0.0, 0.0, 0.0};
};

}  // namespace pfreact
