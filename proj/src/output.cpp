#include "pfreact/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pfreact {

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

template <class Range>
void put_block(std::ostream& out, const Range& values) {
  int col = 0;
  for (double v : values) {
    put(out, v);
    out << (++col % 6 == 0 ? '\n' : ' ');
  }
  if (col % 6 != 0) out << '\n';
}

struct NamedField {
  const char* name;
  ScalarField State::*member;
};

constexpr NamedField kFields[] = {
    {"p", &State::p},       {"phi", &State::phi},       {"c1", &State::c1},   {"c2", &State::c2},
    {"c3", &State::c3},     {"mu_phi", &State::mu_phi}, {"mu1", &State::mu1}, {"mu2", &State::mu2},
    {"mu3", &State::mu3},
};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::runtime_error("snapshot '" + path + "': " + what);
}

std::vector<double> read_values(std::istream& in, std::size_t n, const std::string& path) {
  std::vector<double> v(n);
  std::string tok;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(in >> tok)) bad(path, "truncated data block");
    v[k] = std::stod(tok);
  }
  return v;
}

}  // namespace

void write_snapshot(const State& s, const GridSpec& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  out << "# vtk DataFile Version 3.0\n";
  out << "pfreact state t=";
  put(out, s.t);
  out << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.nx + 1 << ' ' << g.ny + 1 << " 1\n";
  out << "ORIGIN 0 0 0\nSPACING ";
  put(out, g.hx());
  out << ' ';
  put(out, g.hy());
  out << " 1\n";
  out << "FIELD FieldData 3\n";
  out << "time 1 1 double\n";
  put(out, s.t);
  out << '\n';
  out << "u_xfaces 1 " << g.x_faces() << " double\n";
  put_block(out, s.u.x_values());
  out << "u_yfaces 1 " << g.y_faces() << " double\n";
  put_block(out, s.u.y_values());
  out << "CELL_DATA " << g.cells() << '\n';
  for (const NamedField& f : kFields) {
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    put_block(out, (s.*f.member).values());
  }
  out << "VECTORS velocity double\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      put(out, 0.5 * (s.u.x(i, j) + s.u.x(i + 1, j)));
      out << ' ';
      put(out, 0.5 * (s.u.y(i, j) + s.u.y(i, j + 1)));
      out << " 0\n";
    }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

State read_snapshot(const std::string& path, const GridSpec& like, GridSpec* grid_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::string line;
  for (int k = 0; k < 4; ++k)
    if (!std::getline(in, line)) bad(path, "truncated header");
  if (line != "DATASET STRUCTURED_POINTS") bad(path, "not a structured-points dataset");
  GridSpec g = like;
  std::string tok;
  int nxp = 0, nyp = 0, nz = 0;
  double ox, oy, oz, hx, hy, hz;
  in >> tok >> nxp >> nyp >> nz;
  if (tok != "DIMENSIONS") bad(path, "missing DIMENSIONS");
  in >> tok >> ox >> oy >> oz;
  if (tok != "ORIGIN") bad(path, "missing ORIGIN");
  in >> tok;
  if (tok != "SPACING") bad(path, "missing SPACING");
  hx = std::stod((in >> tok, tok));
  hy = std::stod((in >> tok, tok));
  hz = std::stod((in >> tok, tok));
  (void)hz;
  g.nx = nxp - 1;
  g.ny = nyp - 1;
  g.lx = hx * g.nx;
  g.ly = hy * g.ny;
  State s(g);
  int narrays = 0;
  in >> tok >> tok >> narrays;
  for (int a = 0; a < narrays; ++a) {
    std::string name, type;
    int comps = 0;
    long tuples = 0;
    in >> name >> comps >> tuples >> type;
    const std::vector<double> v = read_values(in, static_cast<std::size_t>(comps) * tuples, path);
    if (name == "time") {
      s.t = v.at(0);
    } else if (name == "u_xfaces") {
      if (v.size() != s.u.x_values().size()) bad(path, "x-face array size");
      std::copy(v.begin(), v.end(), s.u.x_values().begin());
    } else if (name == "u_yfaces") {
      if (v.size() != s.u.y_values().size()) bad(path, "y-face array size");
      std::copy(v.begin(), v.end(), s.u.y_values().begin());
    }
  }
  long ncells = 0;
  in >> tok >> ncells;
  if (tok != "CELL_DATA" || ncells != g.cells()) bad(path, "CELL_DATA size");
  while (in >> tok) {
    if (tok == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps >> tok >> tok;
      const std::vector<double> v = read_values(in, g.cells(), path);
      for (const NamedField& f : kFields)
        if (name == f.name) std::copy(v.begin(), v.end(), (s.*f.member).values().begin());
    } else if (tok == "VECTORS") {
      in >> tok >> tok;
      read_values(in, 3 * static_cast<std::size_t>(g.cells()), path);
    } else {
      bad(path, "unexpected token '" + tok + "'");
    }
  }
  if (grid_out) *grid_out = g;
  return s;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

}  // namespace pfreact
