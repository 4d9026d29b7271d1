#include "ctunnel/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "toml.hpp"

#include "ctunnel/errors.hpp"
#include "ctunnel/expression.hpp"

namespace ctunnel {

namespace {

void reject_unknown(const toml::table& t, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [k, v] : t) {
    if (!known.contains(std::string(k.str())))
      throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

// Numbers, or strings holding a constant expression such as "pi/2".
double scalar(const toml::node& node, const std::string& what) {
  if (auto v = node.value<double>()) return *v;
  if (auto s = node.value<std::string>()) {
    const double v = Expression::parse(*s)(0.0);
    if (!std::isfinite(v)) throw ConfigError(what + ": '" + *s + "' is not finite");
    return v;
  }
  throw ConfigError(what + " must be a number or a constant expression string");
}

double get_double(const toml::table& t, const std::string& key, double fallback) {
  const toml::node* n = t.get(key);
  return n ? scalar(*n, key) : fallback;
}

int get_int(const toml::table& t, const std::string& key, int fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  auto v = n->value<int64_t>();
  if (!v) throw ConfigError(key + " must be an integer");
  return static_cast<int>(*v);
}

std::vector<double> h_values(const toml::node& node) {
  std::vector<double> h;
  if (const toml::array* arr = node.as_array()) {
    for (const auto& e : *arr) h.push_back(scalar(e, "h_grid entry"));
    return h;
  }
  const toml::table* t = node.as_table();
  if (!t) throw ConfigError("h_grid must be an array or a table");
  reject_unknown(*t, {"min", "max", "count", "spacing"}, "h_grid");
  const double lo = get_double(*t, "min", 0.0);
  const double hi = get_double(*t, "max", 0.0);
  const int count = get_int(*t, "count", 0);
  const std::string spacing = (*t)["spacing"].value_or(std::string("geometric"));
  if (count < 1) return h;
  if (!(lo > 0 && hi >= lo)) throw ConfigError("h_grid needs 0 < min <= max");
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    if (spacing == "geometric")
      h.push_back(hi * std::pow(lo / hi, s));
    else if (spacing == "linear")
      h.push_back(hi + (lo - hi) * s);
    else if (spacing == "inverse")
      h.push_back(1.0 / (1.0 / hi + (1.0 / lo - 1.0 / hi) * s));
    else
      throw ConfigError("h_grid.spacing must be geometric, linear or inverse");
  }
  return h;
}

void check(const RunConfig& c) {
  if (c.alphas.empty()) throw ConfigError("alphas is empty");
  for (double a : c.alphas)
    if (!(std::abs(a) < std::numbers::pi))
      throw ConfigError("alpha " + std::to_string(a) + " outside (-pi, pi)");
  if (c.h_grid.empty()) throw ConfigError("h_grid is empty");
  for (double h : c.h_grid)
    if (!(h > 0)) throw ConfigError("h_grid entries must be positive");
  for (std::size_t i = 1; i < c.h_grid.size(); ++i)
    if (!(c.h_grid[i] < c.h_grid[i - 1])) throw ConfigError("h_grid has repeated values");
  if (c.solver.n_points < 200) throw ConfigError("solver.n_points must be at least 200");
  if (!(c.solver.X > 0)) throw ConfigError("solver.X must be positive");
  if (!(c.solver.R > 0)) throw ConfigError("solver.R must be positive");
  if (c.solver.n_contour < 4) throw ConfigError("solver.n_contour must be at least 4");
  if (c.wkb.J < 1 || c.wkb.J > 8) throw ConfigError("wkb.J must lie in 1..8");
  if (c.wkb.n_max < 1) throw ConfigError("wkb.n_max must be positive");
  if (c.potential.kind == "custom" && c.potential.expr.empty())
    throw ConfigError("custom potential needs expr");
  if (c.potential.kind != "quartic" && c.potential.kind != "figure" &&
      c.potential.kind != "custom")
    throw ConfigError("potential.kind must be quartic, figure or custom");
  for (const auto& f : c.outputs.plot_formats)
    if (f != "svg") throw ConfigError("unsupported plot format '" + f + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  reject_unknown(root, {"name", "alphas", "h_grid", "potential", "solver", "wkb", "outputs"},
                 "config");

  RunConfig c;
  c.source = text;
  c.name = root["name"].value_or(std::string("run"));

  if (const toml::table* p = root["potential"].as_table()) {
    reject_unknown(*p, {"kind", "expr", "x_well", "vpp", "v_inf", "seal_eta", "seal_amplitude"},
                   "potential");
    c.potential.kind = (*p)["kind"].value_or(std::string("quartic"));
    c.potential.expr = (*p)["expr"].value_or(std::string());
    c.potential.x_well = get_double(*p, "x_well", 1.0);
    if (p->contains("vpp")) c.potential.vpp = get_double(*p, "vpp", 0.0);
    if (p->contains("v_inf")) c.potential.v_inf = get_double(*p, "v_inf", 0.0);
    c.potential.seal_eta = get_double(*p, "seal_eta", 0.0);
    c.potential.seal_amplitude = get_double(*p, "seal_amplitude", 0.0);
  }

  if (const toml::array* a = root["alphas"].as_array()) {
    for (const auto& e : *a) c.alphas.push_back(scalar(e, "alphas entry"));
  } else if (root.contains("alphas")) {
    throw ConfigError("alphas must be an array");
  }

  if (const toml::node* hg = root.get("h_grid")) c.h_grid = h_values(*hg);
  std::sort(c.h_grid.begin(), c.h_grid.end(), std::greater<>());

  if (const toml::table* s = root["solver"].as_table()) {
    reject_unknown(*s,
                   {"X", "n_points", "scheme", "R", "n_contour", "residual_tol", "rank_tol",
                    "proj_tol", "resolution_factor", "ladder"},
                   "solver");
    c.solver.X = get_double(*s, "X", c.solver.X);
    c.solver.n_points = get_int(*s, "n_points", c.solver.n_points);
    try {
      c.solver.scheme = parse_scheme((*s)["scheme"].value_or(std::string("fd4")));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    c.solver.R = get_double(*s, "R", c.solver.R);
    c.solver.n_contour = get_int(*s, "n_contour", c.solver.n_contour);
    c.solver.residual_tol_rel = get_double(*s, "residual_tol", c.solver.residual_tol_rel);
    c.solver.rank_tol = get_double(*s, "rank_tol", c.solver.rank_tol);
    c.solver.proj_tol = get_double(*s, "proj_tol", c.solver.proj_tol);
    c.resolution_factor = get_double(*s, "resolution_factor", c.resolution_factor);
    if (const toml::array* l = (*s)["ladder"].as_array()) {
      c.ladder.clear();
      for (const auto& rung : *l) {
        const toml::array* r = rung.as_array();
        if (!r || r->size() != 2) throw ConfigError("solver.ladder entries must be [X, n]");
        auto n = (*r)[1].value<int64_t>();
        if (!n) throw ConfigError("solver.ladder point counts must be integers");
        c.ladder.emplace_back(scalar((*r)[0], "ladder X"), static_cast<int>(*n));
      }
    }
  }

  if (const toml::table* w = root["wkb"].as_table()) {
    reject_unknown(*w, {"n_max", "J", "dump"}, "wkb");
    c.wkb.n_max = get_int(*w, "n_max", c.wkb.n_max);
    c.wkb.J = get_int(*w, "J", c.wkb.J);
    c.wkb.dump = (*w)["dump"].value_or(false);
  }

  if (const toml::table* o = root["outputs"].as_table()) {
    reject_unknown(*o, {"directory", "plot_formats"}, "outputs");
    c.outputs.directory = (*o)["directory"].value_or(c.outputs.directory);
    if (const toml::array* f = (*o)["plot_formats"].as_array()) {
      c.outputs.plot_formats.clear();
      for (const auto& e : *f) c.outputs.plot_formats.push_back(e.value_or(std::string()));
    }
  }

  check(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

PotentialSpec make_potential(const RunConfig& cfg) {
  const PotentialBlock& p = cfg.potential;
  if (p.kind == "quartic") return PotentialSpec::quartic();
  if (p.kind == "figure") return PotentialSpec::figure();
  return PotentialSpec::custom(p.expr, p.x_well, p.vpp, p.v_inf);
}

GapOptions gap_options(const RunConfig& cfg) {
  GapOptions g;
  g.solver = cfg.solver;
  g.seal_eta = cfg.potential.seal_eta;
  g.seal_amplitude = cfg.potential.seal_amplitude;
  g.resolution_factor = cfg.resolution_factor;
  return g;
}

}  // namespace ctunnel
