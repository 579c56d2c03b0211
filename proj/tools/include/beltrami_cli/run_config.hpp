#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/conditions.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/linear_solver.hpp"

namespace beltrami::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Command { kAnalyze, kSolve, kVerify, kExample, kCatalog };

struct RunConfig {
  Command command = Command::kCatalog;
  std::string spec;                      // catalog reference or spec file path
  std::string mode = "auto";             // auto | linear | quasilinear
  SolverConfig solver;
  bool grid_given = false;
  std::string truncation = "k";          // k | q
  std::string truncation_q;

  std::string q;
  std::string q1;
  std::string psi;                       // expression in t; empty selects 1/(t q1)
  std::vector<cplx> probes{cplx{}};
  AuditOptions audit;

  std::filesystem::path archive;
  std::optional<double> p;
  std::string inverse_q;
  std::vector<cplx> inverse_probes;
  int image_n = 128;
  std::optional<double> q_l1;
  double margin = 0.5;
  std::optional<double> r0;
  std::uint64_t seed = 20240229;
  double verify_residual_tol = 1e-2;

  std::filesystem::path out = "beltrami-out";
  bool write_json = true;
  bool write_csv = false;
  bool heatmaps = false;
};

/// Every recognised key with its flag; config files use the same keys, with
/// the part before the first '.' as the [section].
struct OptionKey {
  const char* key;
  const char* flag;
  const char* help;
};
const std::vector<OptionKey>& option_keys();

const char* command_name(Command c);

/// Builds a RunConfig from key/value entries (file values already overridden
/// by flags). Throws ConfigError on unknown keys or malformed values.
RunConfig run_config_from_entries(Command command, const std::map<std::string, std::string>& entries);

/// Parses argv (command, --config, flags). Throws ConfigError; returns
/// nullopt after printing help.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv);

std::vector<cplx> parse_complex_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace beltrami::cli
