#include "beltrami_cli/run_config.hpp"

#include <charconv>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "beltrami/expression.hpp"
#include "beltrami/keyvalue.hpp"

namespace beltrami::cli {

const std::vector<OptionKey>& option_keys() {
  static const std::vector<OptionKey> keys{
      {"spec", "--spec", "catalog name[:params] or spec file"},
      {"mode", "--mode", "solve mode: auto, linear or quasilinear"},
      {"solver.grid", "--grid", "samples per axis (power of two)"},
      {"solver.box", "--box", "box half-side L"},
      {"solver.ladder", "--ladder", "truncation rungs, e.g. 2,4,8"},
      {"solver.inner_tol", "--inner-tol", "linear fixed-point tolerance"},
      {"solver.residual_tol", "--residual-tol", "linear residual tolerance"},
      {"solver.outer_tol", "--outer-tol", "outer Picard tolerance"},
      {"solver.ladder_tol", "--ladder-tol", "ladder Cauchy tolerance"},
      {"solver.max_inner", "--max-inner", "linear iteration cap"},
      {"solver.max_outer", "--max-outer", "outer iteration cap"},
      {"solver.damping", "--damping", "initial outer damping"},
      {"solver.margins", "--margins", "compact margins, decreasing"},
      {"solver.subsamples", "--subsamples", "coefficient samples per cell axis"},
      {"solver.truncation", "--truncation", "rung truncation: k or q"},
      {"solver.truncation_q", "--truncation-q", "majorant Q for q truncation"},
      {"audit.Q", "--Q", "majorant Q(z) of K"},
      {"audit.Q1", "--Q1", "tangential majorant Q1_z0(z); defaults to Q"},
      {"audit.psi", "--psi", "psi(t) for the admissibility test"},
      {"audit.probes", "--probes", "probe centres z0, comma separated"},
      {"audit.delta", "--delta", "outer radius of the divergence integral"},
      {"audit.z_grid", "--z-grid", "z samples per axis in the bound audit"},
      {"audit.w_radii", "--w-radii", "|w| samples in the bound audit"},
      {"audit.w_phases", "--w-phases", "arg w samples in the bound audit"},
      {"audit.theta_count", "--theta-count", "theta samples in the bound audit"},
      {"audit.tolerance", "--bound-tol", "slack allowed in bound checks"},
      {"verify.archive", "--archive", "solution archive directory"},
      {"verify.p", "--p", "order p of the inverse dilatation audit"},
      {"verify.Q", "--inverse-Q", "majorant Q(w) for the inverse audit"},
      {"verify.probes", "--inverse-probes", "image-side probe centres w0"},
      {"verify.image_n", "--image-n", "image grid samples per axis"},
      {"verify.q_l1", "--q-l1", "||Q||_1 for the continuity fit"},
      {"verify.margin", "--margin", "compact margin for the continuity fit"},
      {"verify.r0", "--r0", "r0 of the continuity bound (default margin)"},
      {"verify.seed", "--seed", "seed for pair sampling"},
      {"verify.residual_tol", "--verify-residual-tol", "residual above which verify flags"},
      {"output.out", "--out", "output directory"},
      {"output.format", "--format", "json, csv or both"},
      {"output.heatmaps", "--heatmaps", "write PPM heatmaps (true/false)"},
  };
  return keys;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kAnalyze: return "analyze";
    case Command::kSolve: return "solve";
    case Command::kVerify: return "verify";
    case Command::kExample: return "example";
    case Command::kCatalog: return "catalog";
  }
  return "?";
}

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T number(const std::string& key, const std::string& text) {
  T v{};
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  return v;
}

bool boolean(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("bad value for " + key + ": '" + text + "'");
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(number<double>("list", s));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text)) out.push_back(number<int>("list", s));
  return out;
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  for (const auto& s : split(text)) {
    try {
      out.push_back(Expression::parse(s, {}).evaluate({}));
    } catch (const Error& e) {
      throw ConfigError("bad complex value '" + s + "': " + e.what());
    }
  }
  return out;
}

RunConfig run_config_from_entries(Command command, const std::map<std::string, std::string>& entries) {
  RunConfig c;
  c.command = command;
  for (const auto& [key, value] : entries) {
    bool known = false;
    for (const auto& k : option_keys()) known = known || key == k.key;
    if (!known) throw ConfigError("unknown key '" + key + "'");
  }
  auto get = [&](const char* key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto real_at = [&](const char* key, double& into) {
    if (auto v = get(key)) into = number<double>(key, *v);
  };
  auto int_at = [&](const char* key, int& into) {
    if (auto v = get(key)) into = number<int>(key, *v);
  };

  if (auto v = get("spec")) c.spec = trim(*v);
  if (auto v = get("mode")) c.mode = trim(*v);
  if (c.mode != "auto" && c.mode != "linear" && c.mode != "quasilinear")
    throw ConfigError("mode must be auto, linear or quasilinear");

  SolverConfig& s = c.solver;
  if (auto v = get("solver.grid")) {
    s.grid_n = number<int>("solver.grid", *v);
    c.grid_given = true;
  }
  real_at("solver.box", s.box_half_side);
  if (auto v = get("solver.ladder")) s.ladder = parse_int_list(*v);
  real_at("solver.inner_tol", s.inner_tol);
  real_at("solver.residual_tol", s.residual_tol);
  real_at("solver.outer_tol", s.outer_tol);
  real_at("solver.ladder_tol", s.ladder_tol);
  int_at("solver.max_inner", s.max_inner);
  int_at("solver.max_outer", s.max_outer);
  real_at("solver.damping", s.outer_damping);
  if (auto v = get("solver.margins")) s.compact_margins = parse_real_list(*v);
  int_at("solver.subsamples", s.coefficient_subsamples);
  if (auto v = get("solver.truncation")) c.truncation = trim(*v);
  if (c.truncation != "k" && c.truncation != "q") throw ConfigError("truncation must be k or q");
  if (auto v = get("solver.truncation_q")) c.truncation_q = trim(*v);
  if (c.truncation == "q" && c.truncation_q.empty()) throw ConfigError("q truncation needs --truncation-q");
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  if (auto v = get("audit.Q")) c.q = trim(*v);
  if (auto v = get("audit.Q1")) c.q1 = trim(*v);
  if (auto v = get("audit.psi")) c.psi = trim(*v);
  if (auto v = get("audit.probes")) c.probes = parse_complex_list(*v);
  real_at("audit.delta", c.audit.delta);
  int_at("audit.z_grid", c.audit.z_grid);
  if (auto v = get("audit.w_radii")) c.audit.w_radii = parse_real_list(*v);
  int_at("audit.w_phases", c.audit.w_phases);
  int_at("audit.theta_count", c.audit.theta_count);
  real_at("audit.tolerance", c.audit.tolerance);
  if (c.probes.empty()) throw ConfigError("at least one probe is required");
  if (!(c.audit.delta > 0.0)) throw ConfigError("delta must be positive");
  if (c.audit.z_grid < 2 || c.audit.w_phases < 1 || c.audit.theta_count < 1 || c.audit.w_radii.empty())
    throw ConfigError("audit sampling sizes must be positive");

  if (auto v = get("verify.archive")) c.archive = trim(*v);
  if (auto v = get("verify.p")) c.p = number<double>("verify.p", *v);
  if (c.p && !(*c.p > 1.0 && *c.p <= 2.0)) throw ConfigError("p must lie in (1, 2]");
  if (auto v = get("verify.Q")) c.inverse_q = trim(*v);
  if (auto v = get("verify.probes")) c.inverse_probes = parse_complex_list(*v);
  int_at("verify.image_n", c.image_n);
  if (auto v = get("verify.q_l1")) c.q_l1 = number<double>("verify.q_l1", *v);
  if (c.q_l1 && !(*c.q_l1 > 0.0)) throw ConfigError("q_l1 must be positive");
  real_at("verify.margin", c.margin);
  if (auto v = get("verify.r0")) c.r0 = number<double>("verify.r0", *v);
  if (auto v = get("verify.seed")) c.seed = number<std::uint64_t>("verify.seed", *v);
  real_at("verify.residual_tol", c.verify_residual_tol);

  if (auto v = get("output.out")) c.out = trim(*v);
  if (auto v = get("output.format")) {
    const std::string f = trim(*v);
    if (f == "json") {
      c.write_json = true, c.write_csv = false;
    } else if (f == "csv") {
      c.write_json = false, c.write_csv = true;
    } else if (f == "both") {
      c.write_json = c.write_csv = true;
    } else {
      throw ConfigError("format must be json, csv or both");
    }
  }
  if (auto v = get("output.heatmaps")) c.heatmaps = boolean("output.heatmaps", *v);

  switch (command) {
    case Command::kAnalyze:
      if (c.spec.empty()) throw ConfigError("analyze needs --spec");
      if (c.q.empty()) throw ConfigError("analyze needs --Q");
      if (c.q1.empty()) c.q1 = c.q;
      break;
    case Command::kSolve:
      if (c.spec.empty()) throw ConfigError("solve needs --spec");
      break;
    case Command::kVerify:
      if (c.archive.empty()) throw ConfigError("verify needs --archive");
      if (!c.inverse_probes.empty() && c.inverse_q.empty())
        throw ConfigError("inverse probes need --inverse-Q");
      break;
    case Command::kExample:
    case Command::kCatalog:
      break;
  }
  return c;
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Beltrami equation laboratory", "beltrami-lab"};
  std::string command;
  std::string config_path;
  app.add_option("command", command, "analyze | solve | verify | example | catalog")
      ->required()
      ->check(CLI::IsMember({"analyze", "solve", "verify", "example", "catalog"}));
  app.add_option("--config", config_path, "key = value config file; flags override it");
  std::map<std::string, std::string> flag_values;
  for (const auto& k : option_keys()) app.add_option(k.flag, flag_values[k.key], k.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  std::map<std::string, std::string> entries;
  if (!config_path.empty()) {
    try {
      entries = KeyValueFile::load(config_path).entries();
    } catch (const Error& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
  }
  for (const auto& k : option_keys())
    if (app.count(k.flag) > 0) entries[k.key] = flag_values[k.key];

  Command c = Command::kCatalog;
  for (Command candidate : {Command::kAnalyze, Command::kSolve, Command::kVerify, Command::kExample, Command::kCatalog})
    if (command == command_name(candidate)) c = candidate;
  return run_config_from_entries(c, entries);
}

}  // namespace beltrami::cli
