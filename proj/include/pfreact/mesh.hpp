#pragma once

// Uniform staggered (MAC) grid on a rectangle. Scalars live at cell centers,
// velocity components on the faces normal to them.
//
// Face indexing: x-faces are (i, j) with 0 <= i <= nx, 0 <= j < ny, the face
// at x = i*hx. y-faces are (i, j) with 0 <= i < nx, 0 <= j <= ny. On a
// periodic axis the last face (index n) is an alias of face 0; operators read
// face 0 and write both.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pfreact {

enum class AxisBc { periodic, wall };

std::string to_string(AxisBc bc);
AxisBc axis_bc_from_string(const std::string& s);

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;
  AxisBc bc_x = AxisBc::wall;
  AxisBc bc_y = AxisBc::wall;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  int cells() const { return nx * ny; }
  int x_faces() const { return (nx + 1) * ny; }
  int y_faces() const { return nx * (ny + 1); }

  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }

  /// Throws std::invalid_argument when nx, ny < 4 or an extent is not positive.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), v_(static_cast<std::size_t>(nx) * ny, value) {}
  explicit ScalarField(const GridSpec& g, double value = 0.0) : ScalarField(g.nx, g.ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(j) * nx_ + i]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(j) * nx_ + i]; }
  double& operator[](std::size_t k) { return v_[k]; }
  double operator[](std::size_t k) const { return v_[k]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  bool matches(const GridSpec& g) const { return nx_ == g.nx && ny_ == g.ny; }
  bool all_finite() const;

  bool operator==(const ScalarField&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> v_;
};

class FaceField {
 public:
  FaceField() = default;
  FaceField(int nx, int ny, double value = 0.0)
      : nx_(nx),
        ny_(ny),
        x_(static_cast<std::size_t>(nx + 1) * ny, value),
        y_(static_cast<std::size_t>(nx) * (ny + 1), value) {}
  explicit FaceField(const GridSpec& g, double value = 0.0) : FaceField(g.nx, g.ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  double& x(int i, int j) { return x_[static_cast<std::size_t>(j) * (nx_ + 1) + i]; }
  double x(int i, int j) const { return x_[static_cast<std::size_t>(j) * (nx_ + 1) + i]; }
  double& y(int i, int j) { return y_[static_cast<std::size_t>(j) * nx_ + i]; }
  double y(int i, int j) const { return y_[static_cast<std::size_t>(j) * nx_ + i]; }

  std::span<double> x_values() { return x_; }
  std::span<const double> x_values() const { return x_; }
  std::span<double> y_values() { return y_; }
  std::span<const double> y_values() const { return y_; }

  bool matches(const GridSpec& g) const { return nx_ == g.nx && ny_ == g.ny; }
  bool all_finite() const;

  bool operator==(const FaceField&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Copy face 0 onto the alias face n along every periodic axis.
void sync_periodic(FaceField& f, const GridSpec& g);

// Discrete operators. Scalars close with a mirror ghost at walls (zero
// normal gradient) and wrap on periodic axes. All are OpenMP-parallel over
// grid rows; pfreact::serial holds the ghost-padded reference versions.

FaceField grad_c2f(const ScalarField& s, const GridSpec& g);
ScalarField div_f2c(const FaceField& f, const GridSpec& g);
/// div(a grad s) with a averaged arithmetically onto faces. Requires a >= 0.
ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& s, const GridSpec& g);
/// div(u s) with the face value of s taken as the centered average.
ScalarField advect_div_form(const FaceField& u, const ScalarField& s, const GridSpec& g);

/// Centered average of a cell field onto faces (mirror at walls, wrap on periodic axes).
FaceField average_c2f(const ScalarField& s, const GridSpec& g);
/// Cell-centered |grad s|^2 as the mean of the squared face gradients on each axis.
ScalarField grad_sq_center(const ScalarField& s, const GridSpec& g);

double inner(const ScalarField& a, const ScalarField& b, const GridSpec& g);
/// Face inner product. Wall boundary faces carry half weight, periodic alias faces none.
double inner_face(const FaceField& a, const FaceField& b, const GridSpec& g);
double sum_cells(const ScalarField& s, const GridSpec& g);

/// Quadrature weight of an x-face / y-face under inner_face.
double x_face_weight(int i, const GridSpec& g);
double y_face_weight(int j, const GridSpec& g);

namespace serial {
FaceField grad_c2f(const ScalarField& s, const GridSpec& g);
ScalarField div_f2c(const FaceField& f, const GridSpec& g);
ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& s, const GridSpec& g);
ScalarField advect_div_form(const FaceField& u, const ScalarField& s, const GridSpec& g);
double inner(const ScalarField& a, const ScalarField& b, const GridSpec& g);
}  // namespace serial

}  // namespace pfreact
