#include "pfreact/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace pfreact {

std::string to_string(AxisBc bc) { return bc == AxisBc::periodic ? "periodic" : "wall"; }

AxisBc axis_bc_from_string(const std::string& s) {
  if (s == "periodic") return AxisBc::periodic;
  if (s == "wall") return AxisBc::wall;
  throw std::invalid_argument("unknown axis boundary family '" + s + "'");
}

void GridSpec::validate() const {
  if (nx < 4 || ny < 4) throw std::invalid_argument("grid needs at least 4 cells per axis");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("domain extents must be positive");
}

bool ScalarField::all_finite() const {
  for (double v : v_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool FaceField::all_finite() const {
  for (double v : x_)
    if (!std::isfinite(v)) return false;
  for (double v : y_)
    if (!std::isfinite(v)) return false;
  return true;
}

void sync_periodic(FaceField& f, const GridSpec& g) {
  if (g.bc_x == AxisBc::periodic)
    for (int j = 0; j < g.ny; ++j) f.x(g.nx, j) = f.x(0, j);
  if (g.bc_y == AxisBc::periodic)
    for (int i = 0; i < g.nx; ++i) f.y(i, g.ny) = f.y(i, 0);
}

namespace {

void require(const ScalarField& s, const GridSpec& g) {
  if (!s.matches(g)) throw std::invalid_argument("scalar field does not match grid");
}

void require(const FaceField& f, const GridSpec& g) {
  if (!f.matches(g)) throw std::invalid_argument("face field does not match grid");
}

// Neighbour cell index along an axis, or -1 when the neighbour is outside a wall.
inline int neighbour(int k, int step, int n, AxisBc bc) {
  int m = k + step;
  if (m >= 0 && m < n) return m;
  if (bc == AxisBc::periodic) return (m + n) % n;
  return -1;
}

// Face index after periodic aliasing (face n reads face 0).
inline int face_read(int k, int n, AxisBc bc) { return (bc == AxisBc::periodic && k == n) ? 0 : k; }

}  // namespace

FaceField grad_c2f(const ScalarField& s, const GridSpec& g) {
  require(s, g);
  FaceField f(g);
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int l = neighbour(i, -1, nx, g.bc_x);
      const int r = (i < nx) ? i : neighbour(i - 1, 1, nx, g.bc_x);
      f.x(i, j) = (l < 0 || r < 0) ? 0.0 : (s(r, j) - s(l, j)) / hx;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j) {
    const int b = neighbour(j, -1, ny, g.bc_y);
    const int t = (j < ny) ? j : neighbour(j - 1, 1, ny, g.bc_y);
    for (int i = 0; i < nx; ++i) f.y(i, j) = (b < 0 || t < 0) ? 0.0 : (s(i, t) - s(i, b)) / hy;
  }
  return f;
}

ScalarField div_f2c(const FaceField& f, const GridSpec& g) {
  require(f, g);
  ScalarField d(g);
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = face_read(j + 1, ny, g.bc_y);
    for (int i = 0; i < nx; ++i) {
      const int ie = face_read(i + 1, nx, g.bc_x);
      d(i, j) = (f.x(ie, j) - f.x(i, j)) / hx + (f.y(i, jn) - f.y(i, j)) / hy;
    }
  }
  return d;
}

ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& s, const GridSpec& g) {
  require(a, g);
  require(s, g);
  for (double v : a.values())
    if (v < 0.0) throw std::invalid_argument("div_coeff_grad: negative coefficient");
  ScalarField out(g);
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jb = neighbour(j, -1, ny, g.bc_y), jt = neighbour(j, 1, ny, g.bc_y);
    for (int i = 0; i < nx; ++i) {
      const int il = neighbour(i, -1, nx, g.bc_x), ir = neighbour(i, 1, nx, g.bc_x);
      const double c = s(i, j), ac = a(i, j);
      double acc = 0.0;
      if (ir >= 0) acc += 0.5 * (ac + a(ir, j)) * (s(ir, j) - c) / hx2;
      if (il >= 0) acc -= 0.5 * (ac + a(il, j)) * (c - s(il, j)) / hx2;
      if (jt >= 0) acc += 0.5 * (ac + a(i, jt)) * (s(i, jt) - c) / hy2;
      if (jb >= 0) acc -= 0.5 * (ac + a(i, jb)) * (c - s(i, jb)) / hy2;
      out(i, j) = acc;
    }
  }
  return out;
}

ScalarField advect_div_form(const FaceField& u, const ScalarField& s, const GridSpec& g) {
  require(u, g);
  require(s, g);
  ScalarField out(g);
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jb = neighbour(j, -1, ny, g.bc_y), jt = neighbour(j, 1, ny, g.bc_y);
    const int jn = face_read(j + 1, ny, g.bc_y);
    for (int i = 0; i < nx; ++i) {
      const int il = neighbour(i, -1, nx, g.bc_x), ir = neighbour(i, 1, nx, g.bc_x);
      const int ie = face_read(i + 1, nx, g.bc_x);
      const double c = s(i, j);
      const double se = ir >= 0 ? 0.5 * (c + s(ir, j)) : c;
      const double sw = il >= 0 ? 0.5 * (c + s(il, j)) : c;
      const double sn = jt >= 0 ? 0.5 * (c + s(i, jt)) : c;
      const double ss = jb >= 0 ? 0.5 * (c + s(i, jb)) : c;
      out(i, j) = (u.x(ie, j) * se - u.x(i, j) * sw) / hx + (u.y(i, jn) * sn - u.y(i, j) * ss) / hy;
    }
  }
  return out;
}

FaceField average_c2f(const ScalarField& s, const GridSpec& g) {
  require(s, g);
  FaceField f(g);
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      int l = neighbour(i, -1, nx, g.bc_x);
      int r = (i < nx) ? i : neighbour(i - 1, 1, nx, g.bc_x);
      if (l < 0) l = r;
      if (r < 0) r = l;
      f.x(i, j) = 0.5 * (s(l, j) + s(r, j));
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j) {
    int b = neighbour(j, -1, ny, g.bc_y);
    int t = (j < ny) ? j : neighbour(j - 1, 1, ny, g.bc_y);
    if (b < 0) b = t;
    if (t < 0) t = b;
    for (int i = 0; i < nx; ++i) f.y(i, j) = 0.5 * (s(i, b) + s(i, t));
  }
  return f;
}

ScalarField grad_sq_center(const ScalarField& s, const GridSpec& g) {
  const FaceField gr = grad_c2f(s, g);
  ScalarField out(g);
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double w = gr.x(i, j), e = gr.x(i + 1, j);
      const double so = gr.y(i, j), n = gr.y(i, j + 1);
      out(i, j) = 0.5 * (w * w + e * e) + 0.5 * (so * so + n * n);
    }
  }
  return out;
}

double inner(const ScalarField& a, const ScalarField& b, const GridSpec& g) {
  require(a, g);
  require(b, g);
  double acc = 0.0;
  const std::size_t n = a.size();
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc * g.cell_area();
}

double sum_cells(const ScalarField& s, const GridSpec& g) {
  require(s, g);
  double acc = 0.0;
  const std::size_t n = s.size();
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::size_t k = 0; k < n; ++k) acc += s[k];
  return acc * g.cell_area();
}

double x_face_weight(int i, const GridSpec& g) {
  if (i == 0 || i == g.nx) {
    if (g.bc_x == AxisBc::periodic) return i == 0 ? 1.0 : 0.0;
    return 0.5;
  }
  return 1.0;
}

double y_face_weight(int j, const GridSpec& g) {
  if (j == 0 || j == g.ny) {
    if (g.bc_y == AxisBc::periodic) return j == 0 ? 1.0 : 0.0;
    return 0.5;
  }
  return 1.0;
}

double inner_face(const FaceField& a, const FaceField& b, const GridSpec& g) {
  require(a, g);
  require(b, g);
  double acc = 0.0;
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) acc += x_face_weight(i, g) * a.x(i, j) * b.x(i, j);
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (int j = 0; j <= ny; ++j) {
    const double w = y_face_weight(j, g);
    for (int i = 0; i < nx; ++i) acc += w * a.y(i, j) * b.y(i, j);
  }
  return acc * g.cell_area();
}

}  // namespace pfreact
