#include "beltrami_cli/archive.hpp"

#include <fstream>
#include <sstream>

#include "beltrami/errors.hpp"
#include "beltrami_cli/json_io.hpp"

namespace beltrami::cli {

namespace {

constexpr const char* kFormat = "beltrami-solution";
constexpr int kVersion = 1;

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw FormatError(std::string("metadata lacks number '") + key + "'");
  return j[key].get<double>();
}

std::vector<double> number_list(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(x.is_number() ? x.get<double>() : std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace

void write_archive(const std::filesystem::path& dir, const Solution& s, const CoefficientSpec& spec,
                   const std::string& spec_reference, const std::string& mode,
                   const SolverConfig& config, const std::optional<LadderReport>& ladder) {
  std::filesystem::create_directories(dir);
  s.f.save_binary(dir / "f.blgf");
  s.fz.save_binary(dir / "fz.blgf");
  s.fzbar.save_binary(dir / "fzbar.blgf");
  s.omega.save_binary(dir / "omega.blgf");
  {
    std::ofstream os(dir / "spec.txt", std::ios::binary);
    os << spec.to_file_text();
  }
  json meta{{"format", kFormat},
            {"version", kVersion},
            {"mode", mode},
            {"spec_reference", spec_reference},
            {"spec_label", spec.label()},
            {"grid_n", s.f.n()},
            {"box_half_side", real(s.f.half_side())},
            {"rung", s.rung},
            {"support_radius", real(s.support_radius)},
            {"residual_rel_l2", real(s.residual_rel_l2)},
            {"normalization", to_json(s.normalization)},
            {"trace", to_json(s.trace)},
            {"config",
             {{"inner_tol", real(config.inner_tol)},
              {"residual_tol", real(config.residual_tol)},
              {"outer_tol", real(config.outer_tol)},
              {"ladder_tol", real(config.ladder_tol)},
              {"max_inner", config.max_inner},
              {"max_outer", config.max_outer},
              {"outer_damping", real(config.outer_damping)},
              {"ladder", config.ladder},
              {"compact_margins", reals(config.compact_margins)},
              {"coefficient_subsamples", config.coefficient_subsamples}}}};
  if (ladder) meta["ladder"] = to_json(*ladder);
  write_json(dir / "metadata.json", meta);
}

ArchivedSolution read_archive(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("archive directory not found: " + dir.string());
  std::ifstream is(dir / "metadata.json");
  if (!is) throw FormatError("archive lacks metadata.json");
  json meta;
  try {
    meta = json::parse(is);
  } catch (const json::exception& e) {
    throw FormatError(std::string("metadata.json: ") + e.what());
  }
  if (meta.value("format", "") != kFormat) throw FormatError("not a solution archive: " + dir.string());
  if (meta.value("version", 0) != kVersion) throw FormatError("unsupported archive version");

  std::ifstream spec_in(dir / "spec.txt");
  if (!spec_in) throw FormatError("archive lacks spec.txt");
  std::stringstream spec_text;
  spec_text << spec_in.rdbuf();

  Solution s{GridField::load_binary(dir / "f.blgf"), GridField::load_binary(dir / "fz.blgf"),
             GridField::load_binary(dir / "fzbar.blgf"), GridField::load_binary(dir / "omega.blgf"),
             0, {}, {}, 0.0, 0.0};
  if (!s.f.same_geometry(s.fz) || !s.f.same_geometry(s.fzbar) || !s.f.same_geometry(s.omega))
    throw FormatError("archive grids disagree in geometry");
  s.rung = meta.value("rung", 0);
  s.support_radius = number(meta, "support_radius");
  s.residual_rel_l2 = number(meta, "residual_rel_l2");
  const auto& norm = meta.at("normalization");
  s.normalization.translation = {norm.at("translation")[0].get<double>(), norm.at("translation")[1].get<double>()};
  s.normalization.scale = number(norm, "scale");
  s.normalization.arg_f1 = number(norm, "arg_f1");
  const auto& trace = meta.at("trace");
  s.trace.steps = trace.value("steps", 0);
  s.trace.converged = trace.value("converged", false);
  s.trace.update_norms = number_list(trace.at("update_norms"));
  s.trace.ratios = number_list(trace.at("ratios"));

  return {std::move(s), parse_spec_text(spec_text.str()), meta.value("spec_reference", ""),
          meta.value("mode", "")};
}

}  // namespace beltrami::cli
