#pragma once

#include <string>
#include <vector>

#include "facetflow/app/config.hpp"
#include "facetflow/app/csv.hpp"
#include "facetflow/diagnostics.hpp"
#include "facetflow/rho_direct.hpp"
#include "facetflow/stepper.hpp"

namespace facetflow::app {

struct RunOutputs {
  Trajectory trajectory;
  DiagnosticsReport report;
  std::vector<std::string> test_function_names;
  std::vector<WeakMode> weak_modes;
  std::vector<WeakResidual> weak;
};

/// Builds the data, runs the Rothe march and evaluates the diagnostics.
RunOutputs execute_run(const RunConfig& cfg);

/// Writes manifest.json, diagnostics.csv, weak_residual.csv and
/// snapshots/step_<k>.fctf (every snapshot_stride steps and the last step)
/// under cfg.output_dir. Returns 0.
int cmd_run(const RunConfig& cfg);

/// Cross-validation rows at the time levels of the height run.
std::vector<rho::CrossValidationRow> execute_compare(const RunConfig& u_cfg, const RunConfig& rho_cfg);

/// Writes compare.csv under u_cfg.output_dir. Returns 1 if the identity
/// error exceeds its bound at any time, else 0.
int cmd_compare(const RunConfig& u_cfg, const RunConfig& rho_cfg);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> execute_verify(const RunConfig& cfg);

/// Writes verify.csv and verify.json. Returns 1 if any check fails.
int cmd_verify(const RunConfig& cfg);

/// Refinement table ordered by axis value; runs are spread over `workers`
/// threads and the result does not depend on the worker count.
///   rothe:        value, j, cells, tau, max_residual, min_rho,
///                 successive_diff (to the next value), ratio (blank when
///                 the difference is zero)
///   elliptic_mms: value, cells, error, ratio
CsvTable execute_sweep(const RunConfig& cfg, std::size_t workers);

/// Writes sweep.csv under cfg.output_dir. Returns 0.
int cmd_sweep(const RunConfig& cfg, std::size_t workers);

}  // namespace facetflow::app
