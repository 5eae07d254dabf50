#pragma once

// Batch front end: scenario configuration and the simulate, bounds, order,
// timescales and fit commands. The command-line tool is a thin wrapper
// around run_command().

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "mmlin/fit.hpp"
#include "mmlin/integrate.hpp"
#include "mmlin/timescale.hpp"

namespace mmlin::app {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitNumericalFailure = 3,
  kExitNotConverged = 4,
};

/// Header of the trajectory table written by `simulate`.
inline constexpr const char* kSimulateHeader =
    "t,t_over_T,s_num,c_num,s_star,c_star,s_low,c_low,s_up,c_up";

struct ScenarioConfig {
  // Defaults: all rate constants and e0 equal to 1.
  double k1 = 1.0;
  double k_minus1 = 1.0;
  double k2 = 1.0;
  double e0 = 1.0;
  double s0 = 0.1;
  double c0 = 0.0;
  IntegratorConfig integrator;

  // simulate / bounds
  std::size_t n_grid = 512;
  std::string observations_path;  // simulate: also write synthetic observations
  std::size_t n_obs = 50;
  double obs_noise = 0.0;  // relative to s0

  // order
  std::optional<double> s0_max;  // default K/4
  std::size_t n_points = 6;

  // timescales
  SeparationThresholds thresholds;

  // fit
  std::string data_path;
  std::optional<Rates> guess;  // default: the configured rate constants
  std::size_t trials = 0;      // Monte-Carlo trials on synthetic data
  double noise = 0.01;         // relative to s0

  std::uint64_t seed = 0;
  std::string out_dir;  // empty: write to the output stream

  /// Throws InvalidInput when the parameters are not a valid RateParams.
  RateParams params() const;
};

/// Parses a configuration document (schema_version 1) on top of `base`.
/// Unknown keys are rejected with InvalidInput.
ScenarioConfig parse_config(const nlohmann::json& doc, ScenarioConfig base = {});
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});

/// Runs `command` and returns its exit code. Results go to `out` (or to a
/// file under config.out_dir), diagnostics to `err`.
int run_command(const std::string& command, const ScenarioConfig& config, std::ostream& out,
                std::ostream& err);

/// Report builders, exposed for tests and bindings.
void write_simulate_csv(std::ostream& out, const ScenarioConfig& config);
nlohmann::ordered_json bounds_report(const ScenarioConfig& config);
nlohmann::ordered_json order_report(const ScenarioConfig& config);
nlohmann::ordered_json timescales_report(const ScenarioConfig& config);
/// Sets `converged` to the fit outcome.
nlohmann::ordered_json fit_report(const ScenarioConfig& config, bool& converged);

}  // namespace mmlin::app
