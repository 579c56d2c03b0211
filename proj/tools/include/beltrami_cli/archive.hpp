#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "beltrami/coefficients.hpp"
#include "beltrami/linear_solver.hpp"
#include "beltrami/quasilinear_solver.hpp"

namespace beltrami::cli {

/// On-disk solution: f.blgf, fz.blgf, fzbar.blgf, omega.blgf, spec.txt and
/// metadata.json inside one directory.
struct ArchivedSolution {
  Solution solution;
  CoefficientSpec spec;
  std::string spec_reference;
  std::string mode;  // "linear" or "quasilinear"
};

void write_archive(const std::filesystem::path& dir, const Solution& solution, const CoefficientSpec& spec,
                   const std::string& spec_reference, const std::string& mode,
                   const SolverConfig& config, const std::optional<LadderReport>& ladder);

/// Reads an archive written by write_archive; coefficients are re-read from spec.txt.
ArchivedSolution read_archive(const std::filesystem::path& dir);

}  // namespace beltrami::cli
