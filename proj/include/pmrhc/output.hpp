#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "pmrhc/simulator.hpp"

namespace pmrhc {

// CSV with header time,kind,agent,target,R; one row per logged event, times printed round-trip exact.
void write_trace(std::ostream& os, const SimulationResult& r);
std::string trace_csv(const SimulationResult& r);

// Breakpoint lists as CSV: target,t0,R0,rate.
void write_trajectories(std::ostream& os, const SimulationResult& r);

// J_T, event counts by kind, per-agent visit sequences. Wall time is omitted so the record is reproducible.
nlohmann::json result_summary(const SimulationResult& r, int agents);

}  // namespace pmrhc
