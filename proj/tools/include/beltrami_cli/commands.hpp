#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/conditions.hpp"
#include "beltrami/verify.hpp"
#include "beltrami_cli/json_io.hpp"
#include "beltrami_cli/run_config.hpp"

namespace beltrami::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitBound = 2, kExitFlagged = 3 };

struct KtSample {
  std::string variant;
  double r = 0.0;
  double w_abs = 0.0;
  double phi = 0.0;  // arg z
  double kt = 0.0;
  double r_plus_w = 0.0;
};

struct ExampleSolve {
  int grid_n = 0;
  int final_rung = 0;
  bool ladder_converged = false;
  double residual_l2_rel = 0.0;
  double jacobian_positive_fraction = 0.0;
  InjectivityReport injectivity;
};

struct ExampleReport {
  double disk_integral = 0.0;           // int over the unit disk of 1/r
  double disk_integral_rel_error = 0.0; // against 2 pi
  DivergenceReport q_divergence;        // Q = 1/r at 0, delta = 0.5
  DivergenceReport q1_divergence;       // Q1 = 1 at 0
  PsiReport psi;                        // default psi with q1 = 1/r
  std::vector<KtSample> kt_samples;
  /// Largest |K^T - (r + |w|)| per variant over the samples.
  double phase1_max_deviation = 0.0;
  double phase2_max_deviation = 0.0;
  /// Samples with r + |w| > 1, where K^T exceeds 1.
  std::size_t kt_above_one = 0;
  std::optional<ExampleSolve> solve;
};

/// Worked example end to end. grid_n = 0 skips the solve stage.
ExampleReport run_example(int grid_n);

json example_json(const ExampleReport& report);

int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_example(const RunConfig& cfg, std::ostream& out);
int cmd_catalog(const RunConfig& cfg, std::ostream& out);

/// Dispatches and maps library errors onto exit codes: ConfigError, parse and
/// spec errors and NotContractive give 1; BoundViolation 2; iteration
/// failures 3.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point used by main().
int main_entry(int argc, const char* const* argv);

}  // namespace beltrami::cli
