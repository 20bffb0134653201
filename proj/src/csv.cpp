#include "evmag/csv.hpp"

#include "evmag/trace.hpp"

#include <fstream>

namespace evmag {

std::string battery_csv(const std::vector<ChargeStepRecord>& records, int cell_count) {
    std::string out = "t_ms,current_a";
    for (int i = 1; i <= cell_count; ++i) {
        out += ",v_cell_" + std::to_string(i);
    }
    for (int i = 1; i <= cell_count; ++i) {
        out += ",soc_cell_" + std::to_string(i);
    }
    out += ",phase\n";

    std::int64_t prev_t = 0;
    bool have_prev = false;
    for (const ChargeStepRecord& rec : records) {
        if (have_prev && rec.t_ms < prev_t) {
            throw UnorderedTraceError("charge records out of time order at t=" +
                                      std::to_string(rec.t_ms));
        }
        prev_t = rec.t_ms;
        have_prev = true;
        if (static_cast<int>(rec.per_cell_voltage.size()) != cell_count ||
            static_cast<int>(rec.per_cell_soc.size()) != cell_count) {
            throw DomainError("charge record arity does not match cell count");
        }
        out += std::to_string(rec.t_ms) + "," + format_fixed(rec.current_a);
        for (double v : rec.per_cell_voltage) {
            out += "," + format_fixed(v);
        }
        for (double soc : rec.per_cell_soc) {
            out += "," + format_fixed(soc);
        }
        out += "," + std::to_string(rec.phase) + "\n";
    }
    return out;
}

void write_battery_csv(const std::vector<ChargeStepRecord>& records, int cell_count,
                       const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open for writing: " + path);
    }
    file << battery_csv(records, cell_count);
    if (!file) {
        throw IoError("write failed: " + path);
    }
}

} // namespace evmag
