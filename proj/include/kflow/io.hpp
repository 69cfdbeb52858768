// Artifacts: diagnostics CSV, check report JSON, stored trajectories and the
// run manifest. All writers are deterministic for identical input.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kflow/config.hpp"
#include "kflow/flow.hpp"
#include "kflow/verify.hpp"

namespace kflow::io {

/// CSV columns, in order.
const std::vector<std::string>& csv_columns();

std::string diagnostics_csv(const verify::Analysis& analysis);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws std::invalid_argument when the column is absent.
  std::vector<double> column(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// Throws std::invalid_argument on malformed input.
CsvTable parse_csv(std::string_view text);

nlohmann::ordered_json report_json(const verify::CheckReport& report);

nlohmann::ordered_json trajectory_json(const flow::Trajectory& trajectory,
                                       const config::ScenarioConfig& config);
/// Rebuilds the trajectory (scenario from the embedded config) and returns
/// the config alongside.
flow::Trajectory trajectory_from_json(const nlohmann::ordered_json& j,
                                      config::ScenarioConfig& config_out,
                                      const std::string& base_dir = ".");

nlohmann::ordered_json manifest_json(const flow::Trajectory& trajectory,
                                     const config::ScenarioConfig& config, double wall_seconds);

/// Runs the configured checks, analysing once per distinct phi.
verify::CheckReport run_checks(const flow::Trajectory& trajectory,
                               const std::vector<config::CheckEntry>& checks);
/// Analysis used for the CSV: phi from the configured lower_bound check, else 0.
verify::Analysis csv_analysis(const flow::Trajectory& trajectory,
                              const std::vector<config::CheckEntry>& checks);
verify::Analysis csv_analysis(const flow::Trajectory&& trajectory,
                              const std::vector<config::CheckEntry>& checks) = delete;

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Output directory: `flag` if non-empty, else $KFLOW_OUT_DIR, else ".".
/// The directory is created if missing.
std::string output_dir(const std::string& flag);

}  // namespace kflow::io
