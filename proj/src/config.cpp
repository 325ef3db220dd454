#include "dlrfem/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "dlrfem/errors.hpp"
#include "dlrfem/expression.hpp"

namespace dlrfem {

// ---- enums ---------------------------------------------------------------

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::FullRank: return "full";
    case SolverKind::Dlr2: return "dlr2";
    case SolverKind::DlrLie: return "dlr-lie";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "full") return SolverKind::FullRank;
  if (name == "dlr2") return SolverKind::Dlr2;
  if (name == "dlr-lie") return SolverKind::DlrLie;
  throw ConfigError("unknown solver '" + name + "' (expected full, dlr2 or dlr-lie)");
}

std::string to_string(RankPolicyKind kind) {
  switch (kind) {
    case RankPolicyKind::Fixed: return "fixed";
    case RankPolicyKind::AdaptiveAbsolute: return "absolute";
    case RankPolicyKind::AdaptiveRelative: return "relative";
  }
  return "unknown";
}

RankPolicyKind rank_policy_from_string(const std::string& name) {
  if (name == "fixed") return RankPolicyKind::Fixed;
  if (name == "absolute") return RankPolicyKind::AdaptiveAbsolute;
  if (name == "relative") return RankPolicyKind::AdaptiveRelative;
  throw ConfigError("unknown rank policy '" + name + "' (expected fixed, absolute or relative)");
}

// ---- RunConfig helpers ---------------------------------------------------

bool RunConfig::operator==(const RunConfig& o) const {
  const auto policy_eq = [](const RankPolicy& a, const RankPolicy& b) {
    return a.kind == b.kind && a.r_fixed == b.r_fixed && a.tol == b.tol && a.r_max == b.r_max;
  };
  return variant == o.variant && epsilon == o.epsilon && x0 == o.x0 && x1 == o.x1 && y0 == o.y0 && y1 == o.y1 &&
         initial == o.initial && degree == o.degree && elements_x == o.elements_x && elements_y == o.elements_y &&
         tau == o.tau && final_time == o.final_time && solver == o.solver && policy_eq(rank_policy, o.rank_policy) &&
         kernel == o.kernel && tau_bound == o.tau_bound && seed == o.seed && output_dir == o.output_dir &&
         diagnostics_every == o.diagnostics_every && snapshot_times == o.snapshot_times &&
         symmetry_diagnostic == o.symmetry_diagnostic && write_trace == o.write_trace;
}

std::vector<std::string> initial_condition_names() {
  return {"sin-sin", "kiss-bubble", "modified-energy", "u1", "u2", "u3", "expression"};
}

TensorGrid2D make_grid(const RunConfig& c) {
  return {build_grid(c.degree, c.elements_x, c.x0, c.x1), build_grid(c.degree, c.elements_y, c.y0, c.y1)};
}

ScalarField make_initial_field(const RunConfig& c) {
  const InitialCondition& ic = c.initial;
  constexpr double pi = std::numbers::pi;
  if (ic.kind == "sin-sin") return [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  if (ic.kind == "modified-energy") return [](double x, double y) { return 0.05 * std::sin(x) * std::sin(y); };
  if (ic.kind == "u1") return [](double x, double y) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); };
  if (ic.kind == "u2") return [](double x, double y) { return std::sin(2 * pi * x) * std::sin(4 * pi * y); };
  if (ic.kind == "u3")
    return [](double x, double y) { return std::sin(2 * pi * (x + pi / 8)) * std::sin(4 * pi * (y + pi / 8)); };
  if (ic.kind == "kiss-bubble") {
    if (ic.centers.size() != 4) throw ConfigError("initial.centers needs 4 values (x1, y1, x2, y2)");
    const double R = ic.radius, w = std::sqrt(2.0) * c.epsilon;
    const std::vector<double> ctr = ic.centers;
    return [R, w, ctr](double x, double y) {
      double v = 1.0;
      for (int b = 0; b < 2; ++b) v -= std::tanh((std::hypot(x - ctr[2 * b], y - ctr[2 * b + 1]) - R) / w);
      return v;
    };
  }
  if (ic.kind == "expression") {
    const Expression e = Expression::parse(ic.expression);
    return [e](double x, double y) { return e(x, y); };
  }
  throw ConfigError("unknown initial condition '" + ic.kind + "'");
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.epsilon > 0.0 && std::isfinite(c.epsilon), "problem.epsilon must be positive");
  require(c.x0 < c.x1 && c.y0 < c.y1, "problem.domain must satisfy x0 < x1 and y0 < y1");
  require(c.degree >= 1 && c.degree <= kMaxConfigDegree, "discretization.degree " + std::to_string(c.degree) +
                                                             " unsupported (1.." + std::to_string(kMaxConfigDegree) + ")");
  require(c.elements_x >= 1 && c.elements_y >= 1, "discretization.elements must be >= 1");
  require(c.tau > 0.0 && std::isfinite(c.tau), "time.tau must be positive");
  require(c.final_time >= 0.0 && std::isfinite(c.final_time), "time.final_time must be >= 0");
  require(c.final_time == 0.0 || c.tau <= c.final_time, "time.tau must not exceed time.final_time");
  require(c.diagnostics_every >= 1, "output.diagnostics_every must be >= 1");
  for (double s : c.snapshot_times)
    require(s >= 0.0 && s <= c.final_time, "output.snapshots must lie in [0, final_time]");
  const RankPolicy& p = c.rank_policy;
  if (p.kind == RankPolicyKind::Fixed) require(p.r_fixed >= 1, "solver.rank must be >= 1 for the fixed policy");
  require(p.tol >= 0.0 && std::isfinite(p.tol), "solver.rank_tol must be >= 0");
  require(p.r_max >= 0, "solver.rank_max must be >= 0");
  if (c.tau_bound) require(*c.tau_bound > 0.0, "solver.tau_bound must be positive");
  if (c.initial.kind == "kiss-bubble") {
    require(c.initial.radius > 0.0, "initial.radius must be positive");
    require(c.initial.centers.size() == 4, "initial.centers needs 4 values");
  }
  make_initial_field(c);
}

// ---- text format ---------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected a number, got '" + t + "'");
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError("expected true or false, got '" + t + "'");
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.variant", [](RunConfig& c, const std::string& v) { c.variant = nonlinearity_from_string(v); }},
      {"problem.epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = to_double(v); }},
      {"problem.domain",
       [](RunConfig& c, const std::string& v) {
         const auto d = to_doubles(v);
         if (d.size() != 4) throw ConfigError("domain needs 4 values: x0, x1, y0, y1");
         c.x0 = d[0], c.x1 = d[1], c.y0 = d[2], c.y1 = d[3];
       }},
      {"initial.kind", [](RunConfig& c, const std::string& v) { c.initial.kind = v; }},
      {"initial.expression", [](RunConfig& c, const std::string& v) { c.initial.expression = v; }},
      {"initial.radius", [](RunConfig& c, const std::string& v) { c.initial.radius = to_double(v); }},
      {"initial.centers", [](RunConfig& c, const std::string& v) { c.initial.centers = to_doubles(v); }},
      {"discretization.degree", [](RunConfig& c, const std::string& v) { c.degree = to_int(v); }},
      {"discretization.elements",
       [](RunConfig& c, const std::string& v) {
         const auto items = split_list(v);
         if (items.size() == 1) c.elements_x = c.elements_y = to_int(items[0]);
         else if (items.size() == 2) c.elements_x = to_int(items[0]), c.elements_y = to_int(items[1]);
         else throw ConfigError("elements needs 1 or 2 values");
       }},
      {"discretization.nodes",
       [](RunConfig& c, const std::string& v) {
         // Node counts m, n map to (m - 1) / k elements per axis.
         const auto items = split_list(v);
         if (items.empty() || items.size() > 2) throw ConfigError("nodes needs 1 or 2 values");
         const int m = to_int(items[0]), n = items.size() == 2 ? to_int(items[1]) : m;
         if (c.degree < 1 || (m - 1) % c.degree != 0 || (n - 1) % c.degree != 0 || m < 2 || n < 2)
           throw ConfigError("node counts must be k*M + 1 for the configured degree (set degree first)");
         c.elements_x = (m - 1) / c.degree;
         c.elements_y = (n - 1) / c.degree;
       }},
      {"time.tau", [](RunConfig& c, const std::string& v) { c.tau = to_double(v); }},
      {"time.final_time", [](RunConfig& c, const std::string& v) { c.final_time = to_double(v); }},
      {"solver.kind", [](RunConfig& c, const std::string& v) { c.solver = solver_kind_from_string(v); }},
      {"solver.rank_policy",
       [](RunConfig& c, const std::string& v) { c.rank_policy.kind = rank_policy_from_string(v); }},
      {"solver.rank_tol", [](RunConfig& c, const std::string& v) { c.rank_policy.tol = to_double(v); }},
      {"solver.rank", [](RunConfig& c, const std::string& v) { c.rank_policy.r_fixed = to_int(v); }},
      {"solver.rank_max", [](RunConfig& c, const std::string& v) { c.rank_policy.r_max = to_int(v); }},
      {"solver.kernel", [](RunConfig& c, const std::string& v) { c.kernel = kernel_mode_from_string(v); }},
      {"solver.tau_bound",
       [](RunConfig& c, const std::string& v) {
         if (v == "none") c.tau_bound.reset();
         else c.tau_bound = to_double(v);
       }},
      {"solver.seed",
       [](RunConfig& c, const std::string& v) {
         std::uint64_t seed = 0;
         const std::string t = trim(v);
         const auto res = std::from_chars(t.data(), t.data() + t.size(), seed);
         if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
           throw ConfigError("expected a non-negative integer, got '" + t + "'");
         c.seed = seed;
       }},
      {"output.directory", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.diagnostics_every", [](RunConfig& c, const std::string& v) { c.diagnostics_every = to_int(v); }},
      {"output.snapshots", [](RunConfig& c, const std::string& v) { c.snapshot_times = to_doubles(v); }},
      {"output.symmetry", [](RunConfig& c, const std::string& v) { c.symmetry_diagnostic = to_bool(v); }},
      {"output.trace", [](RunConfig& c, const std::string& v) { c.write_trace = to_bool(v); }},
  };
  return table;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

struct PresetEntry {
  const char* name;
  const char* description;
  RunConfig (*make)();
};

RunConfig kiss_bubble_base() {
  RunConfig c;
  c.epsilon = 0.01;
  c.x0 = c.y0 = -0.5;
  c.x1 = c.y1 = 0.5;
  c.initial.kind = "kiss-bubble";
  c.degree = 1;
  c.elements_x = c.elements_y = 255;  // 256 nodes
  c.tau = 0.5;
  c.final_time = 400.0;
  c.solver = SolverKind::Dlr2;
  c.rank_policy = RankPolicy::relative(0.01);
  c.diagnostics_every = 10;
  c.snapshot_times = {20.0, 120.0, 250.0, 400.0};
  c.symmetry_diagnostic = false;
  return c;
}

RunConfig symmetry_base(const char* kind) {
  RunConfig c;
  c.epsilon = 0.01;
  c.x0 = c.y0 = -0.5;
  c.x1 = c.y1 = 0.5;
  c.initial.kind = kind;
  c.degree = 1;
  c.elements_x = c.elements_y = 128;  // 129 nodes
  c.tau = 0.5;
  c.final_time = 5000.0;
  c.solver = SolverKind::Dlr2;
  c.rank_policy = RankPolicy::relative(0.01);
  c.diagnostics_every = 20;
  c.snapshot_times = {50.0, 150.0, 300.0, 500.0, 5000.0};
  return c;
}

const std::vector<PresetEntry>& preset_table() {
  static const std::vector<PresetEntry> table = {
      {"convergence", "sin(pi x) sin(pi y) on [0,1]^2, eps=0.01, full rank, tau=1e-3, T=0.1",
       [] {
         RunConfig c;
         c.initial.kind = "sin-sin";
         c.elements_x = c.elements_y = 16;
         c.tau = 1e-3;
         c.final_time = 0.1;
         c.solver = SolverKind::FullRank;
         return c;
       }},
      {"modified-energy", "0.05 sin x sin y on [0,2pi]^2, 129 nodes, adaptive dlr2 with eta = 0.01 sigma_1, T=50",
       [] {
         RunConfig c;
         c.x0 = c.y0 = 0.0;
         c.x1 = c.y1 = 2.0 * std::numbers::pi;
         c.initial.kind = "modified-energy";
         c.elements_x = c.elements_y = 128;
         c.tau = 0.1;
         c.final_time = 50.0;
         c.solver = SolverKind::Dlr2;
         c.rank_policy = RankPolicy::relative(0.01);
         c.diagnostics_every = 10;
         c.symmetry_diagnostic = false;
         return c;
       }},
      {"kiss-bubble", "two touching bubbles, classical, 256 nodes, tau=0.5, T=400", kiss_bubble_base},
      {"kiss-bubble-rslm", "two touching bubbles, RSLM, eta = 0.001 sigma_1",
       [] {
         RunConfig c = kiss_bubble_base();
         c.variant = NonlinearityKind::ConservativeRSLM;
         c.rank_policy = RankPolicy::relative(0.001);
         return c;
       }},
      {"kiss-bubble-bblm", "two touching bubbles, BBLM, eta = 0.001 sigma_1, T=120",
       [] {
         RunConfig c = kiss_bubble_base();
         c.variant = NonlinearityKind::ConservativeBBLM;
         c.rank_policy = RankPolicy::relative(0.001);
         c.final_time = 120.0;
         c.snapshot_times = {20.0, 120.0};
         return c;
       }},
      {"symmetry-u1", "sin(2 pi x) sin(2 pi y) on [-0.5,0.5]^2, 129 nodes, tau=0.5",
       [] { return symmetry_base("u1"); }},
      {"symmetry-u2", "sin(2 pi x) sin(4 pi y) on [-0.5,0.5]^2, 129 nodes, tau=0.5",
       [] { return symmetry_base("u2"); }},
      {"symmetry-u3", "shifted u2 (no odd symmetry), 129 nodes, tau=0.5", [] {
         RunConfig c = symmetry_base("u3");
         c.symmetry_diagnostic = false;
         return c;
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : preset_table()) out.emplace_back(p.name);
  return out;
}

RunConfig preset(const std::string& name) {
  for (const auto& p : preset_table())
    if (name == p.name) return p.make();
  throw ConfigError("unknown preset '" + name + "'");
}

std::string preset_description(const std::string& name) {
  for (const auto& p : preset_table())
    if (name == p.name) return p.description;
  throw ConfigError("unknown preset '" + name + "'");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  bool seen_section = false;
  auto fail = [&](const std::string& what) { throw ConfigError(source + ":" + std::to_string(line_no) + ": " + what); };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"problem", "initial", "discretization", "time", "solver", "output"};
      if (!known.count(section)) fail("unknown section '" + section + "'");
      seen_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen_section && key == "preset") {
      try {
        c = preset(value);
      } catch (const ConfigError& e) {
        fail(e.what());
      }
      continue;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) fail("unknown key '" + full + "'");
    try {
      it->second(c, value);
    } catch (const ConfigError& e) {
      fail(full + ": " + e.what());
    }
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[problem]\n"
    << "variant = " << to_string(c.variant) << "\n"
    << "epsilon = " << format_double(c.epsilon) << "\n"
    << "domain = " << join({c.x0, c.x1, c.y0, c.y1}) << "\n\n"
    << "[initial]\n"
    << "kind = " << c.initial.kind << "\n";
  if (!c.initial.expression.empty()) o << "expression = " << c.initial.expression << "\n";
  o << "radius = " << format_double(c.initial.radius) << "\n"
    << "centers = " << join(c.initial.centers) << "\n\n"
    << "[discretization]\n"
    << "degree = " << c.degree << "\n"
    << "elements = " << c.elements_x << ", " << c.elements_y << "\n\n"
    << "[time]\n"
    << "tau = " << format_double(c.tau) << "\n"
    << "final_time = " << format_double(c.final_time) << "\n\n"
    << "[solver]\n"
    << "kind = " << to_string(c.solver) << "\n"
    << "rank_policy = " << to_string(c.rank_policy.kind) << "\n"
    << "rank_tol = " << format_double(c.rank_policy.tol) << "\n"
    << "rank = " << c.rank_policy.r_fixed << "\n"
    << "rank_max = " << c.rank_policy.r_max << "\n"
    << "kernel = " << to_string(c.kernel) << "\n"
    << "tau_bound = " << (c.tau_bound ? format_double(*c.tau_bound) : std::string("none")) << "\n"
    << "seed = " << c.seed << "\n\n"
    << "[output]\n"
    << "directory = " << c.output_dir << "\n"
    << "diagnostics_every = " << c.diagnostics_every << "\n"
    << "snapshots = " << join(c.snapshot_times) << "\n"
    << "symmetry = " << (c.symmetry_diagnostic ? "true" : "false") << "\n"
    << "trace = " << (c.write_trace ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace dlrfem
