#include "evmag/summary.hpp"

#include <cstdlib>

namespace evmag {

std::string RunSummary::to_string() const {
    return "sessions=" + std::to_string(sessions) + " energy_wh=" + format_fixed(energy_wh) +
           " damage_events=" + std::to_string(damage_events) +
           " alarms=" + std::to_string(alarms) + " final_phase=" + final_phase +
           " duration_ms=" + std::to_string(duration_ms);
}

RunSummary summarize_trace(const std::vector<TraceRecord>& records) {
    RunSummary summary;
    for (const TraceRecord& rec : records) {
        summary.duration_ms = rec.t;
        if (rec.kind == "BEGIN_SESSION") {
            ++summary.sessions;
        } else if (rec.kind == "DAMAGE") {
            ++summary.damage_events;
        } else if (rec.kind == "RAISE_ALARM") {
            ++summary.alarms;
        } else if (rec.kind == "END_SESSION") {
            for (const auto& [key, value] : rec.attrs) {
                if (key == "energy_wh") {
                    summary.energy_wh += std::strtod(value.c_str(), nullptr);
                }
            }
        } else if (rec.kind == "PHASE") {
            for (const auto& [key, value] : rec.attrs) {
                if (key == "to") {
                    summary.final_phase = value;
                }
            }
        }
    }
    return summary;
}

} // namespace evmag
