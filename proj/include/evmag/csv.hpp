#pragma once

#include "evmag/battery.hpp"

#include <string>
#include <vector>

namespace evmag {

/// Battery curve as text: header `t_ms,current_a,v_cell_1..N,soc_cell_1..N,phase`
/// then one row per record, floats with 6 fractional digits.
std::string battery_csv(const std::vector<ChargeStepRecord>& records, int cell_count);

/// Writes battery_csv to a file. Throws IoError with the path on failure.
void write_battery_csv(const std::vector<ChargeStepRecord>& records, int cell_count,
                       const std::string& path);

} // namespace evmag
