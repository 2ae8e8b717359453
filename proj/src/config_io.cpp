#include "pfreact/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace pfreact {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s;
}

struct Key {
  const char* name;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

#define PF_DOUBLE(name, expr) \
  Key { #name, [](const ScenarioConfig& c) { return fmt(c.expr); }, [](ScenarioConfig& c, const std::string& v) { c.expr = to_double(v); } }
#define PF_INT(name, expr) \
  Key { #name, [](const ScenarioConfig& c) { return std::to_string(c.expr); }, [](ScenarioConfig& c, const std::string& v) { c.expr = static_cast<decltype(c.expr)>(to_long(v)); } }
#define PF_STRING(name, expr) \
  Key { #name, [](const ScenarioConfig& c) { return c.expr; }, [](ScenarioConfig& c, const std::string& v) { c.expr = v; } }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      PF_STRING(scenario, scenario),
      PF_STRING(initial, initial),
      PF_INT(nx, grid.nx),
      PF_INT(ny, grid.ny),
      PF_DOUBLE(lx, grid.lx),
      PF_DOUBLE(ly, grid.ly),
      Key{"bc_x", [](const ScenarioConfig& c) { return to_string(c.grid.bc_x); },
          [](ScenarioConfig& c, const std::string& v) { c.grid.bc_x = axis_bc_from_string(v); }},
      Key{"bc_y", [](const ScenarioConfig& c) { return to_string(c.grid.bc_y); },
          [](ScenarioConfig& c, const std::string& v) { c.grid.bc_y = axis_bc_from_string(v); }},
      PF_DOUBLE(re, phys.re),
      PF_DOUBLE(pe, phys.pe),
      PF_DOUBLE(mobility, phys.mobility),
      PF_DOUBLE(d2, phys.d2),
      PF_DOUBLE(d3, phys.d3),
      PF_DOUBLE(d1_plus, phys.d1_plus),
      PF_DOUBLE(d1_minus, phys.d1_minus),
      PF_DOUBLE(m_pen, phys.m_pen),
      PF_DOUBLE(n_adh, phys.n_adh),
      PF_DOUBLE(k_rate, phys.k_rate),
      PF_DOUBLE(eps, phys.eps),
      PF_DOUBLE(lambda0, phys.lambda0),
      PF_DOUBLE(s_stab, phys.s_stab),
      PF_DOUBLE(a1, phys.a1),
      PF_DOUBLE(a2, phys.a2),
      PF_DOUBLE(a3, phys.a3),
      PF_DOUBLE(f_trunc, phys.f_trunc),
      Key{"q_mode", [](const ScenarioConfig& c) { return to_string(c.phys.q_mode); },
          [](ScenarioConfig& c, const std::string& v) { c.phys.q_mode = q_mode_from_string(v); }},
      PF_DOUBLE(q0, phys.q0),
      PF_DOUBLE(dt, scheme.dt),
      PF_DOUBLE(newton_tol, scheme.newton_tol),
      PF_INT(newton_max, scheme.newton_max),
      PF_DOUBLE(c_floor, scheme.c_floor),
      PF_DOUBLE(lin_tol, scheme.lin_tol),
      PF_INT(lin_max, scheme.lin_max),
      Key{"jac_mode", [](const ScenarioConfig& c) { return to_string(c.scheme.jac_mode); },
          [](ScenarioConfig& c, const std::string& v) { c.scheme.jac_mode = jacobian_mode_from_string(v); }},
      Key{"lin_solver", [](const ScenarioConfig& c) { return to_string(c.scheme.lin_solver); },
          [](ScenarioConfig& c, const std::string& v) { c.scheme.lin_solver = linear_solver_from_string(v); }},
      Key{"reuse_jacobian", [](const ScenarioConfig& c) { return std::string(c.scheme.reuse_jacobian ? "true" : "false"); },
          [](ScenarioConfig& c, const std::string& v) { c.scheme.reuse_jacobian = to_bool(v); }},
      PF_DOUBLE(t_final, t_final),
      PF_INT(output_every, output_every),
      PF_STRING(output_dir, output_dir),
      PF_STRING(check_invariants, check_invariants),
      PF_INT(seed, seed),
      PF_DOUBLE(circle_radius, circle_radius),
      PF_DOUBLE(phi_init, phi_init),
      PF_DOUBLE(c1_init, c1_init),
      PF_DOUBLE(c2_init, c2_init),
      PF_DOUBLE(c3_init, c3_init),
      PF_DOUBLE(shear_rate, shear_rate),
      PF_DOUBLE(inlet_amplitude, inlet_amplitude),
      PF_DOUBLE(inlet_c1, inlet_c1),
      PF_DOUBLE(half_width, half_width),
      PF_DOUBLE(bifurcation_angle, bifurcation_angle),
      PF_DOUBLE(bifurcation_x, bifurcation_x),
      PF_DOUBLE(bifurcation_y, bifurcation_y),
      PF_DOUBLE(hotspot_x, hotspot_x),
      PF_DOUBLE(hotspot_y, hotspot_y),
      PF_DOUBLE(hotspot_radius, hotspot_radius),
      Key{"ladder", [](const ScenarioConfig& c) { return from_list(c.ladder); },
          [](ScenarioConfig& c, const std::string& v) { c.ladder = to_list(v); }},
      PF_DOUBLE(reference_dt, reference_dt),
  };
  return k;
}

#undef PF_DOUBLE
#undef PF_INT
#undef PF_STRING

struct Line {
  int number;
  std::string key, value;
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected 'key = value'");
    out.push_back({number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.emplace_back(k.name);
  return out;
}

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  for (const Key& k : keys())
    if (key == k.name) {
      k.set(cfg, value);
      return;
    }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  const std::vector<Line> lines = split_lines(text);
  ScenarioConfig cfg;
  for (const Line& l : lines)
    if (l.key == "scenario") cfg = preset(l.value);
  for (const Line& l : lines) {
    try {
      set_config_value(cfg, l.key, l.value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config '" + path + "'");
  out << serialize_config(cfg);
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

}  // namespace pfreact
