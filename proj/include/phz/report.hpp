#pragma once

// Text and JSON renderings of verdicts and traces; traces read back from JSON.

#include "phz/checker.hpp"
#include "phz/paramview.hpp"

#include <json.hpp>

#include <string>

namespace phz {

using Json = nlohmann::json;

/// {"vars", "edges": [[a, b, w]]}, or {"unsat": true}.
Json to_json(const GapGraph& g);
GapGraph graph_from_json(const Json& j);
/// {"tasks", "phasers", "bools", "pcs", "pvs", "graphs": [{"phaser", "vars", "edges"}]}
/// plus readable "at" locations and "text".
Json to_json(const ControlSet& cs, const Constraint& phi);
Constraint constraint_from_json(const Json& j);

/// {"verdict", "property", "steps": [{"task", "stmt", "constraintId", ...}], "path", "constraints"}
Json trace_to_json(const ControlSet& cs, const Trace& tr, Property kind, std::string_view verdict);
Trace trace_from_json(const Json& j);

/// Verdict name of a check result: unreachable, reached, potential or bound-exceeded.
std::string check_verdict(const CheckResult& r, const ReplayResult* replay);

Json check_to_json(const ControlSet& cs, Property kind, const CheckOptions& opts, const CheckResult& r,
                   const ReplayResult* replay);
std::string check_to_text(const ControlSet& cs, Property kind, const CheckResult& r, const ReplayResult* replay);

Json param_to_json(const ControlSet& cs, Property kind, const ParamResult& r);
std::string param_to_text(const ControlSet& cs, Property kind, const ParamResult& r);

/// One line naming the offending tasks of a bad configuration.
std::string describe_violation(const ControlSet& cs, const Configuration& c, Property kind);

/// "step k: task t fires <stmt>" lines.
std::string trace_to_text(const Trace& tr);

} // namespace phz
