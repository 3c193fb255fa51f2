#pragma once

// Command-line front end: list, verify, trajectory, specfun, report-merge and reference.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepint/phasecore.hpp"

namespace sepint::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFail = 1,
  kUnknownEntry = 2,
  kSchemaViolation = 3,
  kSingularity = 4,
};

enum class Mode { automatic, classical, quantum, both };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct RunConfig {
  std::vector<std::string> entries;
  std::map<std::string, double> params;
  Mode mode = Mode::automatic;
  std::uint64_t seed = 0;

  // [grid]
  std::optional<Interval> grid_x, grid_y;
  int nx = 21, ny = 21;
  double margin = 1e-3;
  int pb_samples = 100;

  // [trajectory]
  std::optional<PhaseState> state;
  double t_end = 100.0;
  double tol = 1e-12;
  std::string integrator = "rkf78";
  double dt = 1e-3;
  bool seed_scan = false;

  // [output]
  std::string report_path;
  std::string csv_path;
  std::string summary_path;
};

/// Reads a TOML config with sections [entry], [grid], [trajectory], [output]. Throws SchemaError.
RunConfig load_config(const std::string& path);

/// Parses a real, accepting a rational a/b. Throws SchemaError.
double parse_number(const std::string& text);
/// Comma-separated reals.
std::vector<double> parse_list(const std::string& text);

/// Serializes with every floating-point number printed to 17 significant digits and
/// non-finite numbers as null.
std::string dump17(const nlohmann::json& j, int indent = 2);

struct VerifyOutcome {
  std::vector<nlohmann::json> reports;
  int code = kOk;
};

/// Verification report(s) for one entry; one per mode (two for Mode::both).
VerifyOutcome verify_entry(const std::string& id, const RunConfig& config);

/// True when `id` passes `list --filter`: exact id, exact Table 1 label, or a prefix ending in '*'.
bool filter_matches(const std::string& filter, const std::string& id, const std::string& label);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sepint::cli
