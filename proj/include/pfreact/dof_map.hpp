#pragma once

// Unknown numbering for a monolithic staggered solve: x-face velocities,
// y-face velocities, pressure, then a fixed number of cell-centered fields.

#include "pfreact/mesh.hpp"

namespace pfreact {

class DofMap {
 public:
  DofMap(const GridSpec& g, int cell_fields)
      : g_(g),
        cell_fields_(cell_fields),
        uy0_(g.x_faces()),
        p0_(g.x_faces() + g.y_faces()),
        f0_(p0_ + g.cells()),
        size_(f0_ + cell_fields * g.cells()) {}

  const GridSpec& grid() const { return g_; }
  int size() const { return size_; }
  int cell_fields() const { return cell_fields_; }

  int ux(int i, int j) const { return i + (g_.nx + 1) * j; }
  int uy(int i, int j) const { return uy0_ + i + g_.nx * j; }
  int p(int k) const { return p0_ + k; }
  int field(int f, int k) const { return f0_ + f * g_.cells() + k; }
  int cell(int i, int j) const { return i + g_.nx * j; }

  int uy_offset() const { return uy0_; }
  int p_offset() const { return p0_; }
  int field_offset(int f) const { return f0_ + f * g_.cells(); }

  // Direction-generic face addressing. For component d, a is the index along
  // the component's normal (0..n_a) and b the index along the tangent.
  int n_normal(int d) const { return d == 0 ? g_.nx : g_.ny; }
  int n_tangent(int d) const { return d == 0 ? g_.ny : g_.nx; }
  double h_normal(int d) const { return d == 0 ? g_.hx() : g_.hy(); }
  double h_tangent(int d) const { return d == 0 ? g_.hy() : g_.hx(); }
  AxisBc bc_normal(int d) const { return d == 0 ? g_.bc_x : g_.bc_y; }
  AxisBc bc_tangent(int d) const { return d == 0 ? g_.bc_y : g_.bc_x; }
  int face(int d, int a, int b) const { return d == 0 ? ux(a, b) : uy(b, a); }
  /// Cell whose index along d's normal is a and along its tangent b.
  int cell_at(int d, int a, int b) const { return d == 0 ? cell(a, b) : cell(b, a); }

 private:
  GridSpec g_;
  int cell_fields_;
  int uy0_, p0_, f0_, size_;
};

}  // namespace pfreact
