#include "pptaxis/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace pptaxis {

std::string_view to_string(InitProfile p) {
  switch (p) {
    case InitProfile::constant: return "constant";
    case InitProfile::cosine_bump: return "cosine-bump";
    case InitProfile::equilibrium: return "equilibrium";
    case InitProfile::file: return "file";
  }
  return "unknown";
}

std::string_view to_string(SolverChoice s) { return s == SolverChoice::imex ? "imex" : "picard"; }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s, const std::string& key) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(key + ": expected a number, got '" + std::string(s) + "'", 0, key);
  return x;
}

std::size_t parse_size(std::string_view s, const std::string& key) {
  std::size_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + std::string(s) + "'", 0, key);
  return x;
}

bool parse_bool(std::string_view s, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(key + ": expected true or false", 0, key);
}

std::vector<double> parse_list(std::string_view s, const std::string& key) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(parse_double(trim(s.substr(start, comma - start)), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ",";
    out += format_double(xs[k]);
  }
  return out;
}

struct Key {
  std::string name;
  bool required;
  std::string default_doc;
  std::string doc;
  std::function<void(RunSpec&, std::string_view)> set;
  std::function<std::optional<std::string>(const RunSpec&)> get;
};

template <class M>
Key real_key(std::string name, bool required, std::string def, std::string doc, M member_of) {
  const std::string n = name;
  return {name, required, std::move(def), std::move(doc),
          [n, member_of](RunSpec& s, std::string_view v) { member_of(s) = parse_double(v, n); },
          [member_of](const RunSpec& s) -> std::optional<std::string> {
            return format_double(member_of(const_cast<RunSpec&>(s)));
          }};
}

template <class M>
Key opt_real_key(std::string name, std::string doc, M member_of) {
  const std::string n = name;
  return {name, false, "unset", std::move(doc),
          [n, member_of](RunSpec& s, std::string_view v) { member_of(s) = parse_double(v, n); },
          [member_of](const RunSpec& s) -> std::optional<std::string> {
            const auto& o = member_of(const_cast<RunSpec&>(s));
            if (!o) return std::nullopt;
            return format_double(*o);
          }};
}

template <class M>
Key size_key(std::string name, bool required, std::string def, std::string doc, M member_of) {
  const std::string n = name;
  return {name, required, std::move(def), std::move(doc),
          [n, member_of](RunSpec& s, std::string_view v) { member_of(s) = parse_size(v, n); },
          [member_of](const RunSpec& s) -> std::optional<std::string> {
            return std::to_string(member_of(const_cast<RunSpec&>(s)));
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    auto model = [&](const char* name, double ModelParams::*m, const char* doc) {
      k.push_back(real_key(std::string("model.") + name, true, "required", doc,
                           [m](RunSpec& s) -> double& { return s.model.*m; }));
    };
    model("d1", &ModelParams::d1, "predator diffusivity (> 0)");
    model("d2", &ModelParams::d2, "prey diffusivity (> 0)");
    model("chi", &ModelParams::chi, "prey-taxis coefficient (>= 0)");
    model("xi", &ModelParams::xi, "predator-taxis coefficient (>= 0)");
    model("a1", &ModelParams::a1, "predator mortality (>= 0)");
    model("b1", &ModelParams::b1, "predator density-dependent mortality (> 0)");
    model("a2", &ModelParams::a2, "prey growth (>= 0)");
    model("b2", &ModelParams::b2, "prey self-limitation (> 0)");
    model("c1", &ModelParams::c1, "conversion rate (>= 0)");

    k.push_back({"domain.dim", false, "1", "1 (interval) or 2 (rectangle)",
                 [](RunSpec& s, std::string_view v) {
                   s.domain.dim = static_cast<int>(parse_size(v, "domain.dim"));
                 },
                 [](const RunSpec& s) -> std::optional<std::string> { return std::to_string(s.domain.dim); }});
    k.push_back(real_key("domain.length_x", false, "1", "domain length along x",
                         [](RunSpec& s) -> double& { return s.domain.length_x; }));
    k.push_back(real_key("domain.length_y", false, "1", "domain length along y (2D)",
                         [](RunSpec& s) -> double& { return s.domain.length_y; }));
    k.push_back(size_key("domain.cells_x", true, "required", "cells along x (>= 3)",
                         [](RunSpec& s) -> std::size_t& { return s.domain.cells_x; }));
    k.push_back({"domain.cells_y", false, "cells_x", "cells along y (2D, >= 3)",
                 [](RunSpec& s, std::string_view v) { s.domain.cells_y = parse_size(v, "domain.cells_y"); },
                 [](const RunSpec& s) -> std::optional<std::string> {
                   if (!s.domain.cells_y) return std::nullopt;
                   return std::to_string(*s.domain.cells_y);
                 }});

    k.push_back({"init.profile", false, "constant", "constant | cosine-bump | equilibrium | file",
                 [](RunSpec& s, std::string_view v) {
                   if (v == "constant") s.init.profile = InitProfile::constant;
                   else if (v == "cosine-bump") s.init.profile = InitProfile::cosine_bump;
                   else if (v == "equilibrium") s.init.profile = InitProfile::equilibrium;
                   else if (v == "file") s.init.profile = InitProfile::file;
                   else throw ConfigError("init.profile: unknown profile '" + std::string(v) + "'", 0, "init.profile");
                 },
                 [](const RunSpec& s) -> std::optional<std::string> { return std::string(to_string(s.init.profile)); }});
    k.push_back(real_key("init.u0", false, "1", "base predator level (constant, cosine-bump)",
                         [](RunSpec& s) -> double& { return s.init.u0; }));
    k.push_back(real_key("init.v0", false, "1", "base prey level (constant, cosine-bump)",
                         [](RunSpec& s) -> double& { return s.init.v0; }));
    k.push_back(real_key("init.amplitude_u", false, "0", "cosine bump amplitude added to u",
                         [](RunSpec& s) -> double& { return s.init.amplitude_u; }));
    k.push_back(real_key("init.amplitude_v", false, "0", "cosine bump amplitude added to v",
                         [](RunSpec& s) -> double& { return s.init.amplitude_v; }));
    k.push_back({"init.mode", false, "1", "cosine bump wave number (>= 1)",
                 [](RunSpec& s, std::string_view v) { s.init.mode = static_cast<int>(parse_size(v, "init.mode")); },
                 [](const RunSpec& s) -> std::optional<std::string> { return std::to_string(s.init.mode); }});
    k.push_back({"init.file", false, "unset", "CSV with header x[,y],u,v (profile = file)",
                 [](RunSpec& s, std::string_view v) { s.init.file = std::string(v); },
                 [](const RunSpec& s) -> std::optional<std::string> {
                   if (s.init.file.empty()) return std::nullopt;
                   return s.init.file;
                 }});

    k.push_back(real_key("norms.alpha", false, "0.5", "Hölder exponent in (0,1)",
                         [](RunSpec& s) -> double& { return s.norms.alpha; }));
    k.push_back(opt_real_key("norms.u0_c2alpha", "C^{2+alpha} bound for u0 (else grid proxy)",
                             [](RunSpec& s) -> std::optional<double>& { return s.norms.u0_c2alpha; }));
    k.push_back(opt_real_key("norms.v0_c2alpha", "C^{2+alpha} bound for v0 (else grid proxy)",
                             [](RunSpec& s) -> std::optional<double>& { return s.norms.v0_c2alpha; }));
    k.push_back(opt_real_key("norms.schauder_p", "reported placeholder for the Schauder constant P",
                             [](RunSpec& s) -> std::optional<double>& { return s.norms.schauder_p; }));

    k.push_back({"solver.kind", false, "imex", "imex | picard",
                 [](RunSpec& s, std::string_view v) {
                   if (v == "imex") s.solver.kind = SolverChoice::imex;
                   else if (v == "picard") s.solver.kind = SolverChoice::picard;
                   else throw ConfigError("solver.kind: expected imex or picard", 0, "solver.kind");
                 },
                 [](const RunSpec& s) -> std::optional<std::string> { return std::string(to_string(s.solver.kind)); }});
    k.push_back(real_key("solver.dt", true, "required", "time step (> 0)",
                         [](RunSpec& s) -> double& { return s.solver.dt; }));
    k.push_back(real_key("solver.max_time", true, "required", "horizon T (>= 0)",
                         [](RunSpec& s) -> double& { return s.solver.max_time; }));
    k.push_back(real_key("solver.cfl_safety", false, "0.9", "taxis CFL safety factor in (0,1]",
                         [](RunSpec& s) -> double& { return s.solver.cfl_safety; }));
    k.push_back(opt_real_key("solver.blowup_threshold", "sup-norm cap (default 1e6*max(sigma^2,sigma))",
                             [](RunSpec& s) -> std::optional<double>& { return s.solver.blowup_threshold; }));
    k.push_back(real_key("solver.cg_tol", false, "1e-10", "2D implicit diffusion relative residual",
                         [](RunSpec& s) -> double& { return s.solver.cg_tol; }));
    k.push_back(size_key("solver.cg_max_iter", false, "0 (= 10 x cells)", "2D CG iteration cap",
                         [](RunSpec& s) -> std::size_t& { return s.solver.cg_max_iter; }));
    k.push_back(size_key("picard.slab_steps", false, "1", "time steps per fixed-point slab",
                         [](RunSpec& s) -> std::size_t& { return s.solver.slab_steps; }));
    k.push_back(real_key("picard.fp_tol", false, "1e-10", "sup-norm tolerance between Picard iterates (density units)",
                         [](RunSpec& s) -> double& { return s.solver.fp_tol; }));
    k.push_back(size_key("picard.fp_max_iter", false, "50", "Picard iteration cap",
                         [](RunSpec& s) -> std::size_t& { return s.solver.fp_max_iter; }));

    k.push_back(size_key("observe.stride", false, "1", "record every N steps (slabs for picard)",
                         [](RunSpec& s) -> std::size_t& { return s.observe.stride; }));
    k.push_back({"observe.bounds", false, "true", "run the a priori bound monitor",
                 [](RunSpec& s, std::string_view v) { s.observe.bounds = parse_bool(v, "observe.bounds"); },
                 [](const RunSpec& s) -> std::optional<std::string> { return s.observe.bounds ? "true" : "false"; }});
    k.push_back(real_key("observe.slack", false, "0.05", "relative slack on the sigma bounds",
                         [](RunSpec& s) -> double& { return s.observe.slack; }));
    k.push_back(opt_real_key("observe.c2_horizon", "reported horizon for the C2 proxy sum",
                             [](RunSpec& s) -> std::optional<double>& { return s.observe.c2_horizon; }));

    k.push_back({"output.dir", false, "unset (use --out)", "output directory",
                 [](RunSpec& s, std::string_view v) { s.output.dir = std::string(v); },
                 [](const RunSpec& s) -> std::optional<std::string> {
                   if (s.output.dir.empty()) return std::nullopt;
                   return s.output.dir;
                 }});
    k.push_back({"output.snapshot_times", false, "empty", "comma-separated snapshot times in [0, max_time]",
                 [](RunSpec& s, std::string_view v) { s.output.snapshot_times = parse_list(v, "output.snapshot_times"); },
                 [](const RunSpec& s) -> std::optional<std::string> {
                   if (s.output.snapshot_times.empty()) return std::nullopt;
                   return format_list(s.output.snapshot_times);
                 }});
    return k;
  }();
  return table;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what, 0, key);
}

}  // namespace

void validate(const RunSpec& s) {
  try {
    s.model.validate();
  } catch (const ModelError& e) {
    throw ConfigError("model." + std::string(e.what()), 0, "model." + e.field());
  }
  require(s.domain.dim == 1 || s.domain.dim == 2, "domain.dim", "must be 1 or 2");
  require(s.domain.length_x > 0 && std::isfinite(s.domain.length_x), "domain.length_x", "must be positive");
  require(s.domain.length_y > 0 && std::isfinite(s.domain.length_y), "domain.length_y", "must be positive");
  require(s.domain.cells_x >= Grid::kMinCells, "domain.cells_x", "must be >= 3");
  require(!s.domain.cells_y || *s.domain.cells_y >= Grid::kMinCells, "domain.cells_y", "must be >= 3");
  require(s.init.u0 >= 0 && std::isfinite(s.init.u0), "init.u0", "must be finite and >= 0");
  require(s.init.v0 >= 0 && std::isfinite(s.init.v0), "init.v0", "must be finite and >= 0");
  require(std::isfinite(s.init.amplitude_u), "init.amplitude_u", "must be finite");
  require(std::isfinite(s.init.amplitude_v), "init.amplitude_v", "must be finite");
  require(s.init.mode >= 1, "init.mode", "must be >= 1");
  require(s.init.profile != InitProfile::file || !s.init.file.empty(), "init.file", "required for profile = file");
  require(s.norms.alpha > 0 && s.norms.alpha < 1, "norms.alpha", "must lie in (0,1)");
  require(!s.norms.u0_c2alpha || *s.norms.u0_c2alpha >= 0, "norms.u0_c2alpha", "must be >= 0");
  require(!s.norms.v0_c2alpha || *s.norms.v0_c2alpha >= 0, "norms.v0_c2alpha", "must be >= 0");
  require(!s.norms.schauder_p || *s.norms.schauder_p > 0, "norms.schauder_p", "must be > 0");
  require(s.solver.dt > 0 && std::isfinite(s.solver.dt), "solver.dt", "must be positive");
  require(s.solver.max_time >= 0 && std::isfinite(s.solver.max_time), "solver.max_time", "must be >= 0");
  require(s.solver.cfl_safety > 0 && s.solver.cfl_safety <= 1, "solver.cfl_safety", "must lie in (0,1]");
  require(!s.solver.blowup_threshold || *s.solver.blowup_threshold > 0, "solver.blowup_threshold", "must be > 0");
  require(s.solver.cg_tol > 0, "solver.cg_tol", "must be > 0");
  require(s.solver.slab_steps >= 1, "picard.slab_steps", "must be >= 1");
  require(s.solver.fp_tol > 0, "picard.fp_tol", "must be > 0");
  require(s.solver.fp_max_iter >= 1, "picard.fp_max_iter", "must be >= 1");
  require(s.observe.stride >= 1, "observe.stride", "must be >= 1");
  require(s.observe.slack >= 0, "observe.slack", "must be >= 0");
  for (double t : s.output.snapshot_times)
    require(t >= 0 && t <= s.solver.max_time, "output.snapshot_times", "times must lie in [0, max_time]");
}

RunSpec parse_config(std::string_view text) {
  std::map<std::string, const Key*, std::less<>> by_name;
  for (const Key& k : keys()) by_name[k.name] = &k;

  RunSpec spec;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", line_no, key);
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no, key);
    try {
      it->second->set(spec, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what(), line_no, key);
    }
  }

  std::vector<std::string> missing;
  for (const Key& k : keys())
    if (k.required && !seen.count(k.name)) missing.push_back(k.name);
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg, 0, missing.front());
  }
  validate(spec);
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys())
    if (auto v = k.get(spec)) out.emplace_back(k.name, *v);
  return out;
}

std::string serialize_config(const RunSpec& spec) {
  std::string out;
  for (const auto& [k, v] : config_entries(spec)) out += k + " = " + v + "\n";
  return out;
}

std::string config_reference() {
  std::ostringstream os;
  os << "Config keys (key = value, '#' comments):\n";
  for (const Key& k : keys()) {
    os << "  " << k.name;
    for (std::size_t pad = k.name.size(); pad < 24; ++pad) os << ' ';
    os << "[" << k.default_doc << "] " << k.doc << "\n";
  }
  return os.str();
}

Grid make_grid(const DomainSpec& d) {
  if (d.dim == 1) return Grid::line(d.length_x, d.cells_x);
  return Grid::rect(d.length_x, d.length_y, d.cells_x, d.cells_y.value_or(d.cells_x));
}

namespace {

State read_state_csv(const std::string& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError("init.file: cannot read '" + path + "'", 0, "init.file");
  std::string header;
  std::getline(in, header);
  const std::string expected = g.dim() == 1 ? "x,u,v" : "x,y,u,v";
  if (trim(header) != expected)
    throw ConfigError("init.file: expected header '" + expected + "'", 0, "init.file");
  Field u(g), v(g);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (row >= g.size()) throw ConfigError("init.file: more rows than grid cells", 0, "init.file");
    std::vector<double> cols = parse_list(line, "init.file");
    if (cols.size() != static_cast<std::size_t>(g.dim() + 2))
      throw ConfigError("init.file: wrong column count on row " + std::to_string(row + 1), 0, "init.file");
    u[row] = cols[g.dim()];
    v[row] = cols[g.dim() + 1];
    ++row;
  }
  if (row != g.size()) throw ConfigError("init.file: row count does not match grid cells", 0, "init.file");
  return State(std::move(u), std::move(v));
}

}  // namespace

State build_initial_state(const RunSpec& spec) {
  const Grid g = make_grid(spec.domain);
  double base_u = spec.init.u0, base_v = spec.init.v0;
  switch (spec.init.profile) {
    case InitProfile::file: {
      State s = read_state_csv(spec.init.file, g);
      if (min_value(s.u) < 0 || min_value(s.v) < 0)
        throw ConfigError("init.file: initial densities must be non-negative", 0, "init.file");
      return s;
    }
    case InitProfile::equilibrium: {
      const auto eq = coexistence_equilibrium(spec.model);
      if (!eq) throw ConfigError("init.profile: model has no coexistence equilibrium", 0, "init.profile");
      base_u = eq->u;
      base_v = eq->v;
      break;
    }
    case InitProfile::constant:
    case InitProfile::cosine_bump: break;
  }
  const bool bumps = spec.init.profile != InitProfile::constant;
  const double au = bumps ? spec.init.amplitude_u : 0.0;
  const double av = bumps ? spec.init.amplitude_v : 0.0;
  const double kx = spec.init.mode * std::numbers::pi / g.extent(0);
  const double ky = g.dim() == 2 ? spec.init.mode * std::numbers::pi / g.extent(1) : 0.0;
  auto shape = [&](double x, double y) { return std::cos(kx * x) * (g.dim() == 2 ? std::cos(ky * y) : 1.0); };
  State s(sample(g, [&](double x, double y) { return base_u + au * shape(x, y); }),
          sample(g, [&](double x, double y) { return base_v + av * shape(x, y); }));
  if (min_value(s.u) < 0 || min_value(s.v) < 0)
    throw ConfigError("init: initial densities must be non-negative (amplitude exceeds base level)", 0,
                      "init.amplitude_u");
  return s;
}

InitialDataNorms resolve_norms(const RunSpec& spec, const State& initial) {
  InitialDataNorms n;
  n.alpha = spec.norms.alpha;
  n.norm_u0_c2alpha = spec.norms.u0_c2alpha ? *spec.norms.u0_c2alpha : c2alpha_norm_proxy(initial.u, n.alpha);
  n.norm_v0_c2alpha = spec.norms.v0_c2alpha ? *spec.norms.v0_c2alpha : c2alpha_norm_proxy(initial.v, n.alpha);
  return n;
}

PicardControl make_control(const RunSpec& spec, const DerivedConstants& dc) {
  PicardControl ctl;
  ctl.step.dt = spec.solver.dt;
  ctl.step.max_time = spec.solver.max_time;
  ctl.step.cfl_safety = spec.solver.cfl_safety;
  ctl.step.blowup_threshold = spec.solver.blowup_threshold.value_or(default_blowup_threshold(dc));
  ctl.step.diffusion.rel_tol = spec.solver.cg_tol;
  ctl.step.diffusion.max_iter = spec.solver.cg_max_iter;
  ctl.slab_steps = spec.solver.slab_steps;
  ctl.fp_tol = spec.solver.fp_tol;
  ctl.fp_max_iter = spec.solver.fp_max_iter;
  return ctl;
}

}  // namespace pptaxis
