#pragma once

#include "evmag/trace.hpp"

#include <string>
#include <vector>

namespace evmag {

/// Outcome counters recomputable from a trace alone (run and report share
/// this path, so they agree by construction).
struct RunSummary {
    int sessions = 0;
    double energy_wh = 0.0;
    int damage_events = 0;
    int alarms = 0;
    std::string final_phase = "Idle";
    SimTime duration_ms = 0;

    std::string to_string() const;
};

RunSummary summarize_trace(const std::vector<TraceRecord>& records);

} // namespace evmag
