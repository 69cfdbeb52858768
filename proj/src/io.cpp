#include "kflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kflow::io {

namespace {

using nlohmann::ordered_json;

std::string fixed(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double parse_number(const std::string& cell, std::size_t line) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0')
    throw std::invalid_argument("csv: bad number '" + cell + "' on line " + std::to_string(line));
  return v;
}

std::vector<double> field_values(const ordered_json& j, std::size_t expected, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != expected)
    throw std::invalid_argument(std::string("trajectory: ") + what + " has wrong length");
  return v;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",         "max_u",          "min_u",   "mean_u",     "max_udot",
      "min_udot",  "uddot_plus_udot_max",       "class_volume", "volume_integral",
      "jensen_lhs", "osc_u",         "min_eig_metric", "ric_min", "ric_max",
      "thm13_min"};
  return cols;
}

std::string diagnostics_csv(const verify::Analysis& analysis) {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : analysis.rows) {
    const double vals[] = {r.t,        r.max_u,           r.min_u,          r.mean_u,
                           r.max_udot, r.min_udot,        r.max_uddot_plus_udot,
                           r.class_volume, r.volume_integral, r.jensen_lhs,  r.osc_u,
                           r.min_eig_metric, r.ric_min,   r.ric_max,        r.lower_bound_min};
    for (std::size_t i = 0; i < std::size(vals); ++i) os << (i ? "," : "") << fixed(vals[i]);
    os << '\n';
  }
  return os.str();
}

bool CsvTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("csv: missing column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size())
      throw std::invalid_argument("csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(t.columns.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw std::invalid_argument("csv: empty input");
  return t;
}

ordered_json report_json(const verify::CheckReport& report) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json fitted = ordered_json::object();
    for (const auto& [k, v] : c.fitted_constants) fitted[k] = number(v);
    ordered_json evidence = ordered_json::array();
    for (const auto& [t, m] : c.evidence) evidence.push_back({number(t), number(m)});
    checks.push_back({{"name", c.name},
                      {"anchor", c.anchor},
                      {"fitted_constants", fitted},
                      {"burn_in", {c.burn_in.first, c.burn_in.second}},
                      {"verdict", verify::to_string(c.verdict)},
                      {"worst_margin", number(c.worst_margin)},
                      {"asserting", c.asserting},
                      {"note", c.note},
                      {"evidence", evidence}});
  }
  return {{"scenario", report.scenario}, {"all_pass", report.all_pass()}, {"checks", checks}};
}

ordered_json trajectory_json(const flow::Trajectory& trajectory,
                             const config::ScenarioConfig& config) {
  ordered_json samples = ordered_json::array();
  for (const auto& s : trajectory.samples) {
    const auto u = s.u.values();
    const auto ud = s.u_dot.values();
    samples.push_back({{"t", s.t},
                       {"u", std::vector<double>(u.begin(), u.end())},
                       {"u_dot", std::vector<double>(ud.begin(), ud.end())}});
  }
  return {{"config", config::print(config)},
          {"termination", flow::to_string(trajectory.termination)},
          {"detail", trajectory.detail},
          {"accepted_steps", trajectory.accepted_steps},
          {"rejected_steps", trajectory.rejected_steps},
          {"samples", samples}};
}

flow::Trajectory trajectory_from_json(const ordered_json& j, config::ScenarioConfig& config_out,
                                      const std::string& base_dir) {
  try {
    config_out = config::parse(j.at("config").get<std::string>(), base_dir);
    flow::Trajectory tr;
    tr.scenario = config::to_scenario(config_out);
    const auto term = j.at("termination").get<std::string>();
    if (term == "completed")
      tr.termination = flow::Termination::completed;
    else if (term == "positivity_breakdown")
      tr.termination = flow::Termination::positivity_breakdown;
    else if (term == "step_underflow")
      tr.termination = flow::Termination::step_underflow;
    else
      throw std::invalid_argument("trajectory: unknown termination '" + term + "'");
    tr.detail = j.value("detail", "");
    tr.accepted_steps = j.value("accepted_steps", std::size_t{0});
    tr.rejected_steps = j.value("rejected_steps", std::size_t{0});
    const auto& grid = tr.scenario.grid;
    for (const auto& s : j.at("samples")) {
      flow::FlowState st;
      st.t = s.at("t").get<double>();
      st.u = ScalarField(grid, field_values(s.at("u"), grid.size(), "u"));
      st.u_dot = ScalarField(grid, field_values(s.at("u_dot"), grid.size(), "u_dot"));
      tr.samples.push_back(std::move(st));
    }
    if (tr.samples.empty()) throw std::invalid_argument("trajectory: no samples");
    return tr;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trajectory: ") + e.what());
  }
}

ordered_json manifest_json(const flow::Trajectory& trajectory,
                           const config::ScenarioConfig& config, double wall_seconds) {
  return {{"scenario", config.name},
          {"config_hash", config::hash_hex(config)},
          {"backend", to_string(trajectory.scenario.backend)},
          {"termination", flow::to_string(trajectory.termination)},
          {"detail", trajectory.detail},
          {"final_time", trajectory.final_time()},
          {"samples", trajectory.samples.size()},
          {"accepted_steps", trajectory.accepted_steps},
          {"rejected_steps", trajectory.rejected_steps},
          {"wall_time_s", wall_seconds}};
}

verify::CheckReport run_checks(const flow::Trajectory& trajectory,
                               const std::vector<config::CheckEntry>& checks) {
  std::map<std::string, verify::Analysis> by_phi;
  std::vector<verify::CheckResult> results;
  for (const auto& entry : checks) {
    auto it = by_phi.find(entry.phi);
    if (it == by_phi.end())
      it = by_phi
               .emplace(entry.phi,
                        verify::analyze(trajectory,
                                        config::phi_field(entry, trajectory.scenario.grid)))
               .first;
    results.push_back(verify::run_check(it->second, {entry.name, entry.epsilon}));
  }
  return verify::report(trajectory.scenario.name, std::move(results));
}

verify::Analysis csv_analysis(const flow::Trajectory& trajectory,
                              const std::vector<config::CheckEntry>& checks) {
  for (const auto& entry : checks)
    if (entry.name == "lower_bound")
      return verify::analyze(trajectory, config::phi_field(entry, trajectory.scenario.grid));
  return verify::analyze(trajectory);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string output_dir(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("KFLOW_OUT_DIR");
    dir = (env && *env) ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace kflow::io
