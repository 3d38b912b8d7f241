#include "tow/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "tow/errors.hpp"

namespace tow {

namespace {

enum class Type { Real, Int, Bool, Text, List };

struct KeySpec {
  const char* name;
  Type type;
  const char* fallback;
  // Range predicate on numeric values (each entry for lists); text keys
  // carry the allowed words instead.
  std::function<bool(double)> range;
  std::vector<std::string> words;
};

bool any(double) { return true; }
bool positive(double v) { return v > 0.0; }
bool nonnegative(double v) { return v >= 0.0; }
bool at_least(double v, double lo) { return v >= lo; }

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"schema", Type::Int, "1", [](double v) { return v == RunConfig::kSchema; }, {}},
      {"dim", Type::Int, "2", [](double v) { return v == 2 || v == 3; }, {}},
      {"p", Type::Real, "2", [](double v) { return v > 1.0 && v <= KernelParams::kMaxExponent; }, {}},
      {"eps", Type::Real, "0.1", [](double v) { return v > 0.0 && v < 1e3; }, {}},
      {"seed", Type::Int, "1", nonnegative, {}},
      {"threads", Type::Int, "1", [](double v) { return v >= 1 && v <= 256; }, {}},

      {"domain.shape", Type::Text, "ball", nullptr, {"ball", "box", "annulus"}},
      {"domain.center", Type::List, "0,0,0", any, {}},
      {"domain.radius", Type::Real, "1", positive, {}},
      {"domain.inner_radius", Type::Real, "0.5", positive, {}},
      {"domain.box_min", Type::List, "-1,-1,-1", any, {}},
      {"domain.box_max", Type::List, "1,1,1", any, {}},

      {"f.kind", Type::Text, "constant", nullptr, {"constant", "quadratic-compatible", "expression"}},
      {"f.value", Type::Real, "0", any, {}},
      {"f.id", Type::Text, "zero", nullptr,
       {"zero", "one", "x1", "quadratic", "saddle", "sign_x1", "radial_p_harmonic", "cos_x1"}},

      {"g.kind", Type::Text, "constant", nullptr, {"constant", "linear", "quadratic", "expression"}},
      {"g.value", Type::Real, "0", any, {}},
      {"g.a", Type::List, "1,0,0", any, {}},
      {"g.b", Type::Real, "0", any, {}},
      {"g.id", Type::Text, "zero", nullptr,
       {"zero", "one", "x1", "quadratic", "saddle", "sign_x1", "radial_p_harmonic", "cos_x1"}},
      // auto selects (p - N)/(p - 1)
      {"g.exponent", Type::Text, "auto", nullptr, {}},

      {"grid.dx", Type::Real, "0", nonnegative, {}},
      {"grid.moment_correction", Type::Bool, "true", nullptr, {}},

      {"solver.tol", Type::Real, "0", nonnegative, {}},
      {"solver.max_iter", Type::Int, "100000", [](double v) { return v >= 1; }, {}},
      {"solver.scheme", Type::Text, "policy", nullptr, {"policy", "jacobi"}},
      {"solver.init", Type::Text, "subsolution", nullptr, {"subsolution", "g-extension"}},

      {"search.coarse", Type::Int, "0", nonnegative, {}},
      {"search.tol", Type::Real, "1e-08", positive, {}},
      {"search.bank", Type::Int, "0", nonnegative, {}},

      {"quad.axial", Type::Int, "32", [](double v) { return at_least(v, 4) && v <= 512; }, {}},
      {"quad.cross", Type::Int, "32", [](double v) { return at_least(v, 4) && v <= 512; }, {}},

      {"game.start", Type::List, "0,0,0", any, {}},
      {"game.paths", Type::Int, "10000", [](double v) { return v >= 1; }, {}},
      {"game.max_steps", Type::Int, "1000000", [](double v) { return v >= 1; }, {}},
      {"game.player_one", Type::Text, "optimal", nullptr,
       {"optimal", "optimal-recompute", "fixed-direction", "radial", "adversarial-random"}},
      {"game.player_two", Type::Text, "optimal", nullptr,
       {"optimal", "optimal-recompute", "fixed-direction", "radial", "adversarial-random"}},
      {"game.direction_one", Type::List, "1,0,0", any, {}},
      {"game.direction_two", Type::List, "1,0,0", any, {}},
      {"game.radial_sign_one", Type::Real, "1", [](double v) { return v == 1.0 || v == -1.0; }, {}},
      {"game.radial_sign_two", Type::Real, "-1", [](double v) { return v == 1.0 || v == -1.0; }, {}},
      {"game.record_paths", Type::Bool, "false", nullptr, {}},

      {"extremal.lambda", Type::Real, "1", [](double v) { return v >= 1.0; }, {}},
      {"extremal.samples", Type::Int, "4096", [](double v) { return v >= 16; }, {}},
      {"extremal.slack", Type::Real, "1e-6", nonnegative, {}},
      {"extremal.nodes", Type::Int, "100", [](double v) { return v >= 1; }, {}},

      {"holder.radius", Type::Real, "0", nonnegative, {}},
      {"holder.gamma", Type::Real, "0", [](double v) { return v >= 0.0 && v <= 1.0; }, {}},
      {"holder.eps_list", Type::List, "0.2,0.1,0.05", positive, {}},
      {"holder.dx_ratio", Type::Real, "0.25", [](double v) { return v > 0.0 && v <= 0.25; }, {}},

      {"convergence.eps_list", Type::List, "0.2,0.1,0.05", positive, {}},
      {"convergence.dx_ratio", Type::Real, "0.125", [](double v) { return v > 0.0 && v <= 0.25; }, {}},
  };
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : registry())
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

[[noreturn]] void range_error(const std::string& key, const std::string& value) {
  throw Error(ErrorKind::RangeError, key + " = " + value + " is out of range");
}

// Canonical text for a value, or RangeError.
std::string canonical(const KeySpec& spec, const std::string& raw) {
  const std::string key = spec.name;
  switch (spec.type) {
    case Type::Real: {
      double v;
      if (!parse_number(raw, v) || !spec.range(v)) range_error(key, raw);
      return fmt(v);
    }
    case Type::Int: {
      double v;
      if (!parse_number(raw, v) || v != std::floor(v) || std::abs(v) > 9e15 || !spec.range(v)) range_error(key, raw);
      return fmt(v);
    }
    case Type::Bool:
      if (raw == "true" || raw == "1" || raw == "yes") return "true";
      if (raw == "false" || raw == "0" || raw == "no") return "false";
      range_error(key, raw);
    case Type::Text:
      if (key == "g.exponent") {
        if (raw == "auto") return raw;
        double v;
        if (!parse_number(raw, v)) range_error(key, raw);
        return fmt(v);
      }
      for (const auto& w : spec.words)
        if (raw == w) return raw;
      range_error(key, raw);
    case Type::List: {
      std::string out;
      std::stringstream ss(raw);
      std::string item;
      int count = 0;
      while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_number(trim(item), v) || !spec.range(v)) range_error(key, raw);
        out += (count++ ? "," : "") + fmt(v);
      }
      if (count == 0) range_error(key, raw);
      return out;
    }
  }
  range_error(key, raw);
}

Vec linear_a(const RunConfig& c, int dim) { return c.vec("g.a", dim); }

Vec unit_direction(const RunConfig& c, const std::string& key, int dim) {
  const Vec v = c.vec(key, dim);
  if (norm(v, dim) == 0.0) range_error(key, c.text(key));
  return normalized(v, dim);
}

double exponent_of(const RunConfig& c) {
  const std::string& e = c.text("g.exponent");
  return e == "auto" ? std::numeric_limits<double>::quiet_NaN() : std::strtod(e.c_str(), nullptr);
}

}  // namespace

double RunConfig::real(const std::string& key) const {
  return std::strtod(text(key).c_str(), nullptr);
}

long long RunConfig::integer(const std::string& key) const {
  return static_cast<long long>(std::llround(real(key)));
}

bool RunConfig::flag(const std::string& key) const { return text(key) == "true"; }

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "'");
  return it->second;
}

std::vector<double> RunConfig::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

Vec RunConfig::vec(const std::string& key, int dim) const {
  const auto l = list(key);
  Vec v{};
  for (int d = 0; d < dim && d < static_cast<int>(l.size()); ++d) v[d] = l[d];
  return v;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "'");
  values_[key] = canonical(*spec, value);
  explicit_[key] = true;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  for (const auto& k : registry()) cfg.values_[k.name] = canonical(k, k.fallback);
  std::stringstream in(text);
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error(ErrorKind::ParseError, "line " + std::to_string(number) + ": empty key or value");
    if (!find_key(key)) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "' on line " + std::to_string(number));
    if (cfg.is_explicit(key))
      throw Error(ErrorKind::ParseError, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& config) {
  std::string out = "schema = " + config.text("schema") + "\n";
  for (const auto& [k, v] : config.values())
    if (k != "schema") out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.push_back(k.name);
  return out;
}

ScalarFn named_expression(const std::string& id, int dim, double p, const Vec& a, double b, double exponent) {
  if (id == "zero") return [](const Vec&) { return 0.0; };
  if (id == "one") return [](const Vec&) { return 1.0; };
  if (id == "x1") return [](const Vec& x) { return x[0]; };
  if (id == "linear") return [a, b, dim](const Vec& x) { return dot(a, x, dim) + b; };
  if (id == "quadratic") return [dim](const Vec& x) { return dot(x, x, dim); };
  if (id == "saddle") return [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
  if (id == "sign_x1") return [](const Vec& x) { return x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0); };
  if (id == "cos_x1") return [](const Vec& x) { return std::cos(x[0]); };
  if (id == "radial_p_harmonic") {
    if (p == 1.0) throw Error(ErrorKind::InvalidExponent, "p must exceed 1");
    const double k = std::isnan(exponent) ? (p - dim) / (p - 1.0) : exponent;
    return [k, dim](const Vec& x) {
      const double r = norm(x, dim);
      if (r == 0.0) throw Error(ErrorKind::OutOfDomain, "radial_p_harmonic is singular at the origin");
      return std::pow(r, k);
    };
  }
  throw Error(ErrorKind::InvalidArgument, "unknown expression '" + id + "'");
}

DppProblem problem_from_config(const RunConfig& c) {
  const int dim = static_cast<int>(c.integer("dim"));
  const double p = c.real("p"), eps = c.real("eps");
  DppProblem prob;
  prob.params = KernelParams(dim, p, eps);

  DomainSpec& d = prob.domain;
  d.dim = dim;
  d.eps = eps;
  d.shape = shape_from_string(c.text("domain.shape"));
  d.center = c.vec("domain.center", dim);
  d.radius = c.real("domain.radius");
  d.inner_radius = d.shape == Shape::Annulus ? c.real("domain.inner_radius") : 0.0;
  d.box_min = c.vec("domain.box_min", dim);
  d.box_max = c.vec("domain.box_max", dim);

  const std::string fk = c.text("f.kind");
  if (fk == "constant") {
    const double v = c.real("f.value");
    prob.f = [v](const Vec&) { return v; };
    prob.f_label = "constant:" + c.text("f.value");
  } else if (fk == "quadratic-compatible") {
    const double v = -(dim + p - 2.0) / (dim + p);
    prob.f = [v](const Vec&) { return v; };
    prob.f_label = "quadratic-compatible";
  } else {
    prob.f = named_expression(c.text("f.id"), dim, p);
    prob.f_label = "expression:" + c.text("f.id");
  }

  const std::string gk = c.text("g.kind");
  if (gk == "constant") {
    const double v = c.real("g.value");
    prob.g = [v](const Vec&) { return v; };
    prob.g_label = "constant:" + c.text("g.value");
  } else if (gk == "linear") {
    prob.g = named_expression("linear", dim, p, linear_a(c, dim), c.real("g.b"));
    prob.g_label = "linear:" + c.text("g.a") + ";" + c.text("g.b");
  } else if (gk == "quadratic") {
    prob.g = named_expression("quadratic", dim, p);
    prob.g_label = "quadratic";
  } else {
    prob.g = named_expression(c.text("g.id"), dim, p, {}, 0.0, exponent_of(c));
    prob.g_label = "expression:" + c.text("g.id");
    if (c.text("g.id") == "radial_p_harmonic") prob.g_label += ";" + c.text("g.exponent");
  }

  prob.dx = c.real("grid.dx");
  prob.moment_correction = c.flag("grid.moment_correction");
  prob.tol = c.real("solver.tol");
  prob.max_iter = c.integer("solver.max_iter");
  prob.scheme = scheme_from_string(c.text("solver.scheme"));
  prob.init = init_from_string(c.text("solver.init"));
  prob.search.coarse = static_cast<int>(c.integer("search.coarse"));
  prob.search.tol = c.real("search.tol");
  prob.bank = static_cast<int>(c.integer("search.bank"));
  prob.quad_axial = static_cast<int>(c.integer("quad.axial"));
  prob.quad_cross = static_cast<int>(c.integer("quad.cross"));
  prob.threads = static_cast<int>(c.integer("threads"));
  d.validate();
  prob.validate();
  return prob;
}

GameConfig game_from_config(const RunConfig& c) {
  GameConfig g;
  g.problem = problem_from_config(c);
  const int dim = g.problem.params.dim();
  g.start = c.vec("game.start", dim);
  g.paths = c.integer("game.paths");
  g.max_steps = c.integer("game.max_steps");
  g.seed = static_cast<std::uint64_t>(c.integer("seed"));
  g.threads = static_cast<int>(c.integer("threads"));
  g.record_paths = c.flag("game.record_paths");
  g.player_one.kind = strategy_from_string(c.text("game.player_one"));
  g.player_two.kind = strategy_from_string(c.text("game.player_two"));
  g.player_one.direction = unit_direction(c, "game.direction_one", dim);
  g.player_two.direction = unit_direction(c, "game.direction_two", dim);
  g.player_one.sign = c.real("game.radial_sign_one");
  g.player_two.sign = c.real("game.radial_sign_two");
  return g;
}

ExtremalParams extremal_from_config(const RunConfig& c) {
  const int dim = static_cast<int>(c.integer("dim"));
  ExtremalParams e = ExtremalParams::for_kernel(KernelParams(dim, c.real("p"), c.real("eps")));
  e.lambda = c.real("extremal.lambda");
  e.samples = static_cast<int>(c.integer("extremal.samples"));
  e.quad = static_cast<int>(c.integer("quad.axial"));
  e.validate();
  return e;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConverged:
    case ErrorKind::SamplerStall:
    case ErrorKind::NonFinite: return 3;
    case ErrorKind::IoError: return 4;
    default: return 2;
  }
}

}  // namespace tow
