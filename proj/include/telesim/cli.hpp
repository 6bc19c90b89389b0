#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "telesim/experiments.hpp"

namespace telesim::cli {

// A configuration problem the user can fix: unknown key, bad range, missing
// value. Mapped to exit code 2; runtime failures map to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string experiment;  // teleport|fig3|dip|rho|swap|rotation-scan
  EngineKind engine = EngineKind::StandardQM;
  std::uint64_t seed = 0;
  bool seed_explicit = false;
  std::uint64_t n = 100000;
  int workers = 1;
  experiments::PhysicsConfig physics;
  // experiment-specific
  double coder_angle = 90.0;
  double mirror_delay = 0.0;
  std::vector<double> delays_scan;   // dip
  std::vector<double> angles;        // rotation-scan
  double theta0 = 0.0;
  double theta3 = 0.0;
  std::complex<double> alpha{0.6, 0.0};
  std::complex<double> beta{0.8, 0.0};
  std::string out_path;  // empty = stdout
};

// Parse argv (subcommand + flags) plus an optional key=value config file;
// flags override file values, file values override defaults. Throws
// ConfigError on anything malformed.
RunConfig parse_config(int argc, const char* const* argv);

// Execute the configured experiment and render the CSV report.
std::string run(const RunConfig& config);

// Full command-line entry: parse, run, write to stdout or --out. Returns
// the process exit code (0 ok, 2 config error, 3 runtime error).
int main_entry(int argc, const char* const* argv);

}  // namespace telesim::cli
