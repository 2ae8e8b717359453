// Serial reference operators built on an explicit one-cell ghost layer.
// They follow a different indexing route than the parallel kernels in
// mesh.cpp and are used by the tests and the benchmark as the baseline.

#include <stdexcept>
#include <vector>

#include "pfreact/mesh.hpp"

namespace pfreact::serial {

namespace {

class Padded {
 public:
  Padded(const ScalarField& s, const GridSpec& g) : nx_(g.nx), ny_(g.ny), v_((g.nx + 2) * (g.ny + 2)) {
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) at(i, j) = s(i, j);
    const bool px = g.bc_x == AxisBc::periodic, py = g.bc_y == AxisBc::periodic;
    for (int j = 0; j < ny_; ++j) {
      at(-1, j) = px ? s(nx_ - 1, j) : s(0, j);
      at(nx_, j) = px ? s(0, j) : s(nx_ - 1, j);
    }
    for (int i = -1; i <= nx_; ++i) {
      at(i, -1) = py ? at(i, ny_ - 1) : at(i, 0);
      at(i, ny_) = py ? at(i, 0) : at(i, ny_ - 1);
    }
  }
  double& at(int i, int j) { return v_[(j + 1) * (nx_ + 2) + (i + 1)]; }
  double operator()(int i, int j) const { return v_[(j + 1) * (nx_ + 2) + (i + 1)]; }

 private:
  int nx_, ny_;
  std::vector<double> v_;
};

FaceField synced(const FaceField& f, const GridSpec& g) {
  FaceField out = f;
  sync_periodic(out, g);
  return out;
}

void check(bool ok) {
  if (!ok) throw std::invalid_argument("field does not match grid");
}

}  // namespace

FaceField grad_c2f(const ScalarField& s, const GridSpec& g) {
  check(s.matches(g));
  const Padded p(s, g);
  FaceField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) f.x(i, j) = (p(i, j) - p(i - 1, j)) / g.hx();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.y(i, j) = (p(i, j) - p(i, j - 1)) / g.hy();
  return f;
}

ScalarField div_f2c(const FaceField& f, const GridSpec& g) {
  check(f.matches(g));
  const FaceField s = synced(f, g);
  ScalarField d(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d(i, j) = (s.x(i + 1, j) - s.x(i, j)) / g.hx() + (s.y(i, j + 1) - s.y(i, j)) / g.hy();
  return d;
}

ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& s, const GridSpec& g) {
  check(a.matches(g) && s.matches(g));
  for (double v : a.values())
    if (v < 0.0) throw std::invalid_argument("div_coeff_grad: negative coefficient");
  const Padded pa(a, g), ps(s, g);
  FaceField flux(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      flux.x(i, j) = 0.5 * (pa(i, j) + pa(i - 1, j)) * (ps(i, j) - ps(i - 1, j)) / g.hx();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      flux.y(i, j) = 0.5 * (pa(i, j) + pa(i, j - 1)) * (ps(i, j) - ps(i, j - 1)) / g.hy();
  return serial::div_f2c(flux, g);
}

ScalarField advect_div_form(const FaceField& u, const ScalarField& s, const GridSpec& g) {
  check(u.matches(g) && s.matches(g));
  const Padded ps(s, g);
  const FaceField us = synced(u, g);
  FaceField flux(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) flux.x(i, j) = us.x(i, j) * 0.5 * (ps(i, j) + ps(i - 1, j));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) flux.y(i, j) = us.y(i, j) * 0.5 * (ps(i, j) + ps(i, j - 1));
  return serial::div_f2c(flux, g);
}

double inner(const ScalarField& a, const ScalarField& b, const GridSpec& g) {
  check(a.matches(g) && b.matches(g));
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) acc += a(i, j) * b(i, j);
  return acc * g.hx() * g.hy();
}

}  // namespace pfreact::serial
