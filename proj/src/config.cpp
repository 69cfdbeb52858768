#include "kflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kflow/class_calculus.hpp"
#include "kflow/expression.hpp"

namespace kflow::config {

namespace {

std::string format_message(const std::string& field, int line, const std::string& what) {
  std::string s = "config error";
  if (line > 0) s += " at line " + std::to_string(line);
  if (!field.empty()) s += " in '" + field + "'";
  return s + ": " + what;
}

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, line_of(node), "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(node), "cannot read value '" + node.Scalar() + "'");
  }
}

double finite_number(const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(node, field);
  if (!std::isfinite(v)) throw ConfigError(field, line_of(node), "value must be finite");
  return v;
}

void reject_unknown(const YAML::Node& map, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(where.empty() ? key : where + "." + key, line_of(kv.first),
                        "unknown key");
  }
}

YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& where,
                    int parent_line) {
  const YAML::Node node = map[key];
  if (!node) throw ConfigError(where.empty() ? key : where + "." + key, parent_line, "missing");
  return node;
}

Matrix read_matrix(const YAML::Node& node, int n, const std::string& field) {
  if (!node.IsSequence() || static_cast<int>(node.size()) != n)
    throw ConfigError(field, line_of(node), "expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const YAML::Node row = node[r];
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.IsSequence() || static_cast<int>(row.size()) != n)
      throw ConfigError(rf, line_of(row), "expected " + std::to_string(n) + " [re, im] pairs");
    for (int c = 0; c < n; ++c) {
      const YAML::Node pair = row[c];
      const std::string pf = rf + "[" + std::to_string(c) + "]";
      if (!pair.IsSequence() || pair.size() != 2)
        throw ConfigError(pf, line_of(pair), "expected [re, im]");
      m(r, c) = {finite_number(pair[0], pf), finite_number(pair[1], pf)};
    }
  }
  try {
    (void)CohomologyClass(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, line_of(node), e.what());
  }
  return m;
}

std::string canonical_expression(const YAML::Node& node, int n, const std::string& field) {
  const auto text = scalar<std::string>(node, field);
  try {
    return Expression::parse(text, n).to_string();
  } catch (const ExpressionError& e) {
    throw ConfigError(field, line_of(node), e.what());
  }
}

std::string resolve(const ScenarioConfig& c, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative()) p = std::filesystem::path(c.base_dir) / p;
  return p.string();
}

ScalarField load_rho_file(const ScenarioConfig& c, const PeriodicGrid& grid) {
  const std::string path = resolve(c, c.rho_file);
  std::ifstream in(path);
  if (!in) throw ConfigError("rho.file", 0, "cannot open " + path);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ConfigError("rho.file", 0, "bad number '" + tok + "' in " + path);
    values.push_back(v);
  }
  if (values.size() != grid.size())
    throw ConfigError("rho.file", 0,
                      path + " holds " + std::to_string(values.size()) + " values, grid has " +
                          std::to_string(grid.size()));
  return ScalarField(grid, std::move(values));
}

void emit_matrix(std::ostream& os, const Matrix& m) {
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ", ";
    os << '[';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ", ";
      os << '[' << shortest(m(r, c).real()) << ", " << shortest(m(r, c).imag()) << ']';
    }
    os << ']';
  }
  os << ']';
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

}  // namespace

ConfigError::ConfigError(std::string field, int line, const std::string& what)
    : std::runtime_error(format_message(field, line, what)), field_(std::move(field)), line_(line) {}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && n == o.n && active_axes == o.active_axes &&
         resolution == o.resolution && l == o.l && omega0 == o.omega0 &&
         rho_expression == o.rho_expression && rho_file == o.rho_file &&
         normalize == o.normalize && gauge == o.gauge && k == o.k && t_max == o.t_max &&
         sample_dt == o.sample_dt && backend == o.backend && integrator == o.integrator &&
         checks == o.checks;
}

ScenarioConfig parse(std::string_view text, std::string base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", 1, "top level must be a mapping");
  reject_unknown(root, "",
                 {"name", "n", "grid", "L", "omega0", "rho", "gauge", "k", "t_max", "sample_dt",
                  "backend", "integrator", "checks"});

  ScenarioConfig c;
  c.base_dir = std::move(base_dir);
  const int top = line_of(root);

  c.name = scalar<std::string>(required(root, "name", "", top), "name");
  if (c.name.empty()) throw ConfigError("name", line_of(root["name"]), "must not be empty");

  const YAML::Node n_node = required(root, "n", "", top);
  c.n = scalar<int>(n_node, "n");
  if (c.n < 1) throw ConfigError("n", line_of(n_node), "must be >= 1");

  const YAML::Node grid = required(root, "grid", "", top);
  if (!grid.IsMap()) throw ConfigError("grid", line_of(grid), "expected a mapping");
  reject_unknown(grid, "grid", {"active_axes", "resolution"});
  const YAML::Node axes = required(grid, "active_axes", "grid", line_of(grid));
  if (!axes.IsSequence()) throw ConfigError("grid.active_axes", line_of(axes), "expected a list");
  for (const auto& a : axes) {
    const auto name = scalar<std::string>(a, "grid.active_axes");
    try {
      (void)PeriodicGrid::parse_axis(name, c.n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grid.active_axes", line_of(a), e.what());
    }
    c.active_axes.push_back(name);
  }
  const YAML::Node res = required(grid, "resolution", "grid", line_of(grid));
  c.resolution = scalar<int>(res, "grid.resolution");

  c.l = read_matrix(required(root, "L", "", top), c.n, "L");
  c.omega0 = read_matrix(required(root, "omega0", "", top), c.n, "omega0");

  const YAML::Node rho = required(root, "rho", "", top);
  if (rho.IsScalar()) {
    c.rho_expression = canonical_expression(rho, c.n, "rho");
  } else if (rho.IsMap()) {
    reject_unknown(rho, "rho", {"expression", "file", "normalize"});
    if (rho["expression"] && rho["file"])
      throw ConfigError("rho", line_of(rho), "give either expression or file, not both");
    if (rho["expression"])
      c.rho_expression = canonical_expression(rho["expression"], c.n, "rho.expression");
    else if (rho["file"])
      c.rho_file = scalar<std::string>(rho["file"], "rho.file");
    else
      throw ConfigError("rho", line_of(rho), "needs expression or file");
    if (rho["normalize"]) c.normalize = scalar<bool>(rho["normalize"], "rho.normalize");
  } else {
    throw ConfigError("rho", line_of(rho), "expected an expression or a mapping");
  }

  if (const YAML::Node g = root["gauge"]) {
    try {
      c.gauge = flow::parse_gauge(scalar<std::string>(g, "gauge"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("gauge", line_of(g), e.what());
    }
  }
  if (const YAML::Node k = root["k"]) c.k = scalar<int>(k, "k");
  const YAML::Node t_max = required(root, "t_max", "", top);
  c.t_max = finite_number(t_max, "t_max");
  if (const YAML::Node s = root["sample_dt"]) c.sample_dt = finite_number(s, "sample_dt");
  if (const YAML::Node b = root["backend"]) {
    try {
      c.backend = parse_backend(scalar<std::string>(b, "backend"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("backend", line_of(b), e.what());
    }
  }
  if (const YAML::Node in = root["integrator"]) {
    if (!in.IsMap()) throw ConfigError("integrator", line_of(in), "expected a mapping");
    reject_unknown(in, "integrator", {"rtol", "atol", "dt_init", "dt_min", "pos_floor"});
    auto read = [&](const char* key, double& dst) {
      if (const YAML::Node v = in[key]) dst = finite_number(v, std::string("integrator.") + key);
    };
    read("rtol", c.integrator.rtol);
    read("atol", c.integrator.atol);
    read("dt_init", c.integrator.dt_init);
    read("dt_min", c.integrator.dt_min);
    read("pos_floor", c.integrator.pos_floor);
  }
  if (const YAML::Node checks = root["checks"]) {
    if (!checks.IsSequence()) throw ConfigError("checks", line_of(checks), "expected a list");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const YAML::Node e = checks[i];
      const std::string where = "checks[" + std::to_string(i) + "]";
      CheckEntry entry;
      if (e.IsScalar()) {
        entry.name = scalar<std::string>(e, where);
      } else if (e.IsMap()) {
        reject_unknown(e, where, {"name", "epsilon", "phi"});
        entry.name = scalar<std::string>(required(e, "name", where, line_of(e)), where + ".name");
        if (e["epsilon"]) {
          entry.epsilon = finite_number(e["epsilon"], where + ".epsilon");
          if (!(entry.epsilon > 0.0))
            throw ConfigError(where + ".epsilon", line_of(e["epsilon"]), "must be positive");
        }
        if (e["phi"]) entry.phi = canonical_expression(e["phi"], c.n, where + ".phi");
      } else {
        throw ConfigError(where, line_of(e), "expected a check name or mapping");
      }
      const auto& names = verify::check_names();
      if (std::find(names.begin(), names.end(), entry.name) == names.end())
        throw ConfigError(where + ".name", line_of(e), "unknown check '" + entry.name + "'");
      if (!seen.insert(entry.name).second)
        throw ConfigError(where + ".name", line_of(e), "check '" + entry.name + "' listed twice");
      c.checks.push_back(std::move(entry));
    }
  }

  // Semantic validation through the Scenario the config describes.
  try {
    flow::Scenario s = to_scenario(c);
    for (std::size_t i = 0; i < c.checks.size(); ++i) {
      const auto& entry = c.checks[i];
      const ScalarField phi = phi_field(entry, s.grid);
      if (entry.phi == "0") continue;
      try {
        verify::require_psh(s, phi, s.backend);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("checks[" + std::to_string(i) + "].phi", line_of(root["checks"][i]),
                          e.what());
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    if (what.find("t_max") != std::string::npos)
      throw ConfigError("t_max", line_of(t_max), what);
    if (what.find("rho") != std::string::npos) throw ConfigError("rho", line_of(rho), what);
    if (what.find("resolution") != std::string::npos || what.find("axis") != std::string::npos ||
        what.find("axes") != std::string::npos)
      throw ConfigError("grid", line_of(grid), what);
    throw ConfigError("", top, what);
  }
  return c;
}

ScenarioConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse(ss.str(), dir.empty() ? "." : dir);
}

std::string print(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "name: " << quoted(c.name) << '\n';
  os << "n: " << c.n << '\n';
  os << "grid:\n  active_axes: [";
  for (std::size_t i = 0; i < c.active_axes.size(); ++i) os << (i ? ", " : "") << c.active_axes[i];
  os << "]\n  resolution: " << c.resolution << '\n';
  os << "L: ";
  emit_matrix(os, c.l);
  os << "\nomega0: ";
  emit_matrix(os, c.omega0);
  os << "\nrho:\n";
  if (!c.rho_file.empty())
    os << "  file: " << quoted(c.rho_file) << '\n';
  else
    os << "  expression: " << quoted(c.rho_expression) << '\n';
  os << "  normalize: " << (c.normalize ? "true" : "false") << '\n';
  os << "gauge: " << flow::to_string(c.gauge) << '\n';
  if (c.k) os << "k: " << *c.k << '\n';
  os << "t_max: " << shortest(c.t_max) << '\n';
  os << "sample_dt: " << shortest(c.sample_dt) << '\n';
  os << "backend: " << to_string(c.backend) << '\n';
  os << "integrator:\n";
  os << "  rtol: " << shortest(c.integrator.rtol) << '\n';
  os << "  atol: " << shortest(c.integrator.atol) << '\n';
  os << "  dt_init: " << shortest(c.integrator.dt_init) << '\n';
  os << "  dt_min: " << shortest(c.integrator.dt_min) << '\n';
  os << "  pos_floor: " << shortest(c.integrator.pos_floor) << '\n';
  if (!c.checks.empty()) {
    os << "checks:\n";
    for (const auto& e : c.checks)
      os << "  - {name: " << e.name << ", epsilon: " << shortest(e.epsilon)
         << ", phi: " << quoted(e.phi) << "}\n";
  }
  return os.str();
}

std::uint64_t hash(const ScenarioConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : print(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const ScenarioConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash(c)));
  return buf;
}

flow::Scenario to_scenario(const ScenarioConfig& c) {
  flow::Scenario s;
  s.name = c.name;
  std::vector<Axis> axes;
  for (const auto& a : c.active_axes) axes.push_back(PeriodicGrid::parse_axis(a, c.n));
  s.grid = PeriodicGrid(c.n, axes, c.resolution);
  s.l = CohomologyClass(c.l);
  s.omega0 = CohomologyClass(c.omega0);
  if (!c.rho_file.empty()) {
    s.rho = load_rho_file(c, s.grid);
  } else {
    try {
      s.rho = Expression::parse(c.rho_expression, c.n).sample(s.grid);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("rho", 0, e.what());
    }
  }
  if (!s.rho.all_finite() || s.rho.min() <= 0.0)
    throw ConfigError("rho", 0, "rho must be positive and finite on the grid");
  if (c.normalize) s.rho *= 1.0 / s.rho.mean();
  s.gauge = c.gauge;
  s.k_override = c.k;
  s.t_max = c.t_max;
  s.sample_dt = c.sample_dt;
  s.integrator = c.integrator;
  s.backend = c.backend;
  s.validate();
  return s;
}

ScalarField phi_field(const CheckEntry& entry, const PeriodicGrid& grid) {
  try {
    return Expression::parse(entry.phi, grid.n()).sample(grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("checks." + entry.name + ".phi", 0, e.what());
  }
}

std::vector<CheckEntry> effective_checks(const ScenarioConfig& c) {
  if (!c.checks.empty()) return c.checks;
  std::vector<CheckEntry> all;
  for (const auto& name : verify::check_names()) all.push_back({name, 0.1, "0"});
  return all;
}

}  // namespace kflow::config
