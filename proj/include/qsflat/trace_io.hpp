#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qsflat/simulate.hpp"

namespace qsflat {

/// CSV export with the fixed header
/// t,q1..qn,v1..vn,u1..um,y1..ym,w1..wm and full double precision.
void write_trace_csv(const std::string& path, const Trace& trace);

/// Solver diagnostics summary for the JSON sidecar.
nlohmann::json diagnostics_json(const Trace& trace);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace qsflat
