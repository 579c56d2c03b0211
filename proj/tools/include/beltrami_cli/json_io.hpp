#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "beltrami/conditions.hpp"
#include "beltrami/quasilinear_solver.hpp"
#include "beltrami/verify.hpp"

namespace beltrami::cli {

using json = nlohmann::ordered_json;

/// Finite reals as numbers; +inf, -inf and nan as the strings "inf", "-inf", "nan".
json real(double x);
json complex(cplx z);
json reals(const std::vector<double>& xs);

json to_json(const IterationTrace& trace);
json to_json(const Normalization& n);
json to_json(const RungSummary& rung);
json to_json(const LadderReport& report);
json to_json(const DivergenceReport& d);
json to_json(const FmoReport& f);
json to_json(const PsiReport& p);
json to_json(const BoundCheck& b);
json to_json(const ProbeAudit& p);
json to_json(const ConditionReport& report);
json to_json(const JacobianStats& j);
json to_json(const InjectivityReport& i);
json to_json(const InverseReport& r);
json to_json(const ContinuityFit& c);
json to_json(const VerificationReport& v);

/// Pretty-printed with a trailing newline; identical inputs give identical bytes.
void write_json(const std::filesystem::path& path, const json& doc);

/// eps,integral,slope rows for each divergence ladder and eps,mean,oscillation
/// rows for each FMO ladder, tagged by probe index and majorant.
void write_condition_csv(std::ostream& os, const ConditionReport& report);
void write_ladder_csv(std::ostream& os, const LadderReport& report);

}  // namespace beltrami::cli
