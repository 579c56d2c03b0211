#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beltrami_cli/archive.hpp"
#include "beltrami_cli/commands.hpp"
#include "beltrami_cli/run_config.hpp"

using namespace beltrami;
using namespace beltrami::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("beltrami-cli-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "beltrami-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

json load(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  return json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("list parsing") {
  const auto zs = parse_complex_list("0, 0.25+0.5*i, -1");
  REQUIRE(zs.size() == 3);
  CHECK(zs[1] == cplx{0.25, 0.5});
  CHECK(parse_real_list("1e-2, 0.5") == std::vector<double>{1e-2, 0.5});
  CHECK(parse_int_list("2,4,8") == std::vector<int>{2, 4, 8});
  CHECK_THROWS_AS(parse_int_list("2,x"), ConfigError);
}

TEST_CASE("config entries") {
  const auto cfg = run_config_from_entries(Command::kSolve, {{"spec", "constant-disk:0.5"},
                                                              {"solver.grid", "64"},
                                                              {"solver.ladder", "2,4"},
                                                              {"output.format", "both"}});
  CHECK(cfg.spec == "constant-disk:0.5");
  CHECK(cfg.solver.grid_n == 64);
  CHECK(cfg.grid_given);
  CHECK(cfg.solver.ladder == std::vector<int>{2, 4});
  CHECK(cfg.write_json);
  CHECK(cfg.write_csv);

  CHECK_THROWS_AS(run_config_from_entries(Command::kSolve, {{"solver.gird", "64"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_entries(Command::kSolve, {{"solver.grid", "sixty"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_entries(Command::kSolve, {{"output.format", "xml"}}), ConfigError);

  for (const auto& k : option_keys()) {
    CHECK(std::string(k.flag).rfind("--", 0) == 0);
    CHECK(std::string(k.help).size() > 0);
  }
}

TEST_CASE("command line and config file") {
  TempDir tmp;
  const auto file = tmp.path / "run.conf";
  {
    std::ofstream os(file);
    os << "spec = constant-disk:0.25\n[solver]\ngrid = 64\nladder = 2,4\n[output]\nformat = csv\n";
  }
  const std::string f = file.string();
  const char* argv1[] = {"beltrami-lab", "solve", "--config", f.c_str()};
  auto cfg = parse_command_line(4, argv1);
  REQUIRE(cfg.has_value());
  CHECK(cfg->command == Command::kSolve);
  CHECK(cfg->spec == "constant-disk:0.25");
  CHECK(cfg->solver.grid_n == 64);
  CHECK_FALSE(cfg->write_json);
  CHECK(cfg->write_csv);

  const char* argv2[] = {"beltrami-lab", "solve", "--config", f.c_str(), "--grid", "32", "--spec", "constant-disk:0.5"};
  cfg = parse_command_line(8, argv2);
  REQUIRE(cfg.has_value());
  CHECK(cfg->solver.grid_n == 32);
  CHECK(cfg->spec == "constant-disk:0.5");
  CHECK(cfg->solver.ladder == std::vector<int>{2, 4});

  {
    std::ofstream os(file, std::ios::app);
    os << "[solver]\nbogus = 1\n";
  }
  CHECK_THROWS_AS(parse_command_line(4, argv1), ConfigError);
  const char* argv3[] = {"beltrami-lab", "frobnicate"};
  CHECK_THROWS(parse_command_line(2, argv3));
}

TEST_CASE("exit codes") {
  TempDir tmp;
  const std::string out = (tmp.path / "o").string();
  CHECK(invoke({"catalog"}) == kExitOk);
  CHECK(invoke({"catalog", "--spec", "paper-example-sec4"}) == kExitOk);
  CHECK(invoke({"catalog", "--spec", "no-such-entry"}) == kExitConfig);
  CHECK(invoke({"solve", "--out", out}) == kExitConfig);
  CHECK(invoke({"solve", "--spec", "constant-disk:1.2", "--grid", "32", "--out", out}) == kExitConfig);
  CHECK(invoke({"solve", "--spec", "constant-disk:0.5", "--grid", "32", "--max-inner", "2", "--out", out}) ==
        kExitFlagged);
  CHECK(invoke({"analyze", "--spec", "constant-disk:0.5", "--Q", "3", "--z-grid", "9", "--out", out}) == kExitOk);
  CHECK(invoke({"analyze", "--spec", "constant-disk:0.5", "--Q", "0.5", "--z-grid", "9", "--out", out}) ==
        kExitBound);
  const auto doc = load(tmp.path / "o" / "condition_report.json");
  CHECK(doc["bound_violation"] == true);
  CHECK(invoke({"verify", "--archive", (tmp.path / "missing").string(), "--out", out}) == kExitConfig);
  CHECK(invoke({"solve", "--spec", "constant-disk:0.5", "--grid", "32", "--bogus", "1"}) == kExitConfig);
}

TEST_CASE("solve then verify") {
  TempDir tmp;
  const std::string out = (tmp.path / "run").string();
  REQUIRE(invoke({"solve", "--spec", "constant-disk:0.5", "--grid", "128", "--out", out, "--format", "both"}) ==
          kExitOk);
  const fs::path archive = tmp.path / "run" / "solution";
  for (const char* name : {"f.blgf", "fz.blgf", "fzbar.blgf", "omega.blgf", "spec.txt", "metadata.json"})
    CHECK(fs::exists(archive / name));
  const auto ladder = load(tmp.path / "run" / "ladder_report.json");
  CHECK(ladder["mode"] == "linear");
  CHECK(ladder["trace"]["converged"] == true);

  const auto a = read_archive(archive);
  CHECK(a.mode == "linear");
  CHECK(a.spec_reference == "constant-disk:0.5");
  CHECK(a.solution.f.n() == 128);
  CHECK(a.solution.support_radius == 1.0);
  CHECK(std::abs(a.solution.f.interpolate(0.0)) <= 1e-12);
  CHECK(std::abs(a.solution.f.interpolate(1.0)) == doctest::Approx(1.0).epsilon(1e-9));

  const std::string vout = (tmp.path / "ver").string();
  CHECK(invoke({"verify", "--archive", archive.string(), "--out", vout, "--p", "2", "--inverse-Q", "3",
                "--q-l1", "6.283185307179586", "--format", "both", "--heatmaps", "true"}) == kExitOk);
  const auto v = load(tmp.path / "ver" / "verification_report.json");
  CHECK(v["residual_l2_rel"].get<double>() <= 1e-2);
  CHECK(v["flagged"] == false);
  CHECK(v["inverse"].is_object());
  CHECK(v["continuity"].is_object());
  CHECK(fs::exists(tmp.path / "ver" / "residual.csv"));
  CHECK(fs::exists(tmp.path / "ver" / "residual_abs.ppm"));
  CHECK(fs::exists(tmp.path / "ver" / "jacobian.ppm"));
}

TEST_CASE("archive round trip and corruption") {
  TempDir tmp;
  const auto spec = builtin_catalog("constant-disk", {0.5});
  SolverConfig cfg;
  cfg.grid_n = 32;
  const Solution s = solve_linear(LinearProblem::from_fields(GridField::sample(32, 4.0, [](cplx z) {
                                                               return std::abs(z) <= 1.0 ? cplx{0.5, 0.0} : cplx{};
                                                             }),
                                                             GridField(32, 4.0)),
                                  cfg);
  write_archive(tmp.path / "a", s, spec, "constant-disk:0.5", "linear", cfg, std::nullopt);
  const auto back = read_archive(tmp.path / "a");
  for (std::size_t i = 0; i < s.f.size(); ++i) {
    CHECK(back.solution.f[i] == s.f[i]);
    CHECK(back.solution.fzbar[i] == s.fzbar[i]);
  }
  CHECK(back.solution.normalization.scale == s.normalization.scale);
  CHECK(back.spec.evaluate(0.1, 0.0).mu == spec.evaluate(0.1, 0.0).mu);

  fs::resize_file(tmp.path / "a" / "fz.blgf", 20);
  CHECK_THROWS_AS(read_archive(tmp.path / "a"), FormatError);
  CHECK_THROWS_AS(read_archive(tmp.path / "nothing"), FormatError);
}

TEST_CASE("reports are deterministic") {
  TempDir tmp;
  const std::string a = (tmp.path / "a").string(), b = (tmp.path / "b").string();
  for (const auto& o : {a, b})
    REQUIRE(invoke({"analyze", "--spec", "paper-example-sec4-phase2", "--Q", "1/r", "--Q1", "1", "--w-radii", "0",
                    "--probes", "0", "--z-grid", "9", "--out", o}) == kExitOk);
  CHECK(slurp(tmp.path / "a" / "condition_report.json") == slurp(tmp.path / "b" / "condition_report.json"));
}

TEST_CASE("example report") {
  const ExampleReport rep = run_example(0);
  CHECK(rep.disk_integral == doctest::Approx(2.0 * M_PI).epsilon(1e-2));
  REQUIRE(rep.q_divergence.limit.has_value());
  CHECK(std::abs(*rep.q_divergence.limit - 0.5) <= 1e-4);
  CHECK(rep.q_divergence.verdict == DivergenceVerdict::kConvergent);
  CHECK(rep.q1_divergence.verdict == DivergenceVerdict::kDivergent);
  CHECK(rep.phase2_max_deviation <= 1e-9);
  bool found = false;
  for (const auto& k : rep.kt_samples)
    if (k.variant == "phase2" && std::abs(k.r - 0.3) < 1e-12 && std::abs(k.w_abs - 0.2) < 1e-12) {
      CHECK(k.kt == doctest::Approx(0.5).epsilon(1e-9));
      found = true;
    }
  CHECK(found);
  CHECK_FALSE(rep.solve.has_value());

  const json doc = example_json(rep);
  CHECK(doc["solve"].is_null());
  CHECK(doc["q_divergence"]["verdict"] == "CONVERGENT");
  CHECK(doc["q1_divergence"]["verdict"] == "DIVERGENT");
  CHECK(doc.dump() == example_json(run_example(0)).dump());
}
