// Batch front-end: run configurations, trajectory/report emission, and the
// per-system property verifier. The CLI in tools/ is a thin wrapper.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voronec/sim.hpp"

namespace voronec::cli {

/// Exit codes of the batch front-end.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_singularity = 3,
  exit_invariant_violation = 4,
};

struct RunConfig {
  std::string system;
  std::map<std::string, double> params;
  std::optional<std::vector<double>> q0;
  std::optional<std::vector<double>> v0;
  double t0 = 0.0;
  double t_end = 10.0;
  double tol = 1e-10;
  sim::DynamicsPath path = sim::DynamicsPath::lagrangian;
  std::string out_dir = ".";
  int verbosity = 1;
};

/// Parses the key = value configuration text (one pair per line, '#'
/// comments, dotted keys for parameters). Throws ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Builds, validates, simulates and writes trajectory.csv and report.txt
/// under the configured output directory. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& log);

/// Runs the property suite for one catalog system (classification, SPD,
/// path and oracle agreement, balance residuals, reaction audit); prints
/// one pass/fail line per property. Returns an ExitCode.
int verify_system(const std::string& id, int state_count, std::ostream& log);

}  // namespace voronec::cli
