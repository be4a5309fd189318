#pragma once

// File formats written by the CLI. Column layouts are part of the public
// interface and documented in README.md.

#include <ostream>
#include <string>

#include <json.hpp>

#include "maxsurv/engine.hpp"
#include "maxsurv/oracle.hpp"

namespace maxsurv {

/// time,kind,payload  (payload: "devices=1;2", "request=3", "request=3;available=2")
void write_events_csv(std::ostream& out, const SimulationTrace& trace);

/// time,at_event,x_1..x_n,u_1..u_n
void write_states_csv(std::ostream& out, const SimulationTrace& trace);

/// time,available_kw
void write_available_csv(std::ostream& out, std::span<const PowerStep> steps);

nlohmann::json summary_json(const SimulationTrace& trace, std::span<const Device> fleet,
                            PolicyKind policy);

/// Flat key,value rendering of a summary object.
void write_summary_csv(std::ostream& out, const nlohmann::json& summary);

nlohmann::json feasibility_json(const FeasibilityReport& report, Hours time_to_failure,
                                Hours tolerance);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

}  // namespace maxsurv
