#pragma once

// =============================================================================
// Battery model: a series pack of identical cells under constant-current
// charge. Linear OCV(SOC) plus ohmic internal resistance; a cell that reaches
// its cut-off voltage at rest is bypassed out of the series path and the
// remaining cells keep charging, which is what makes the multi-cell procedure
// naturally recursive over the shrinking active set.
// =============================================================================

#include "evmag/errors.hpp"

#include <cstdint>
#include <vector>

namespace evmag {

struct CellParams {
    double capacity_ah = 50.0;
    double v_min = 3.0;
    double v_max = 4.2;
    double r_int_ohm = 0.05;

    /// Throws DomainError unless capacity > 0, r_int >= 0 and v_max > v_min.
    void validate() const;

    friend bool operator==(const CellParams&, const CellParams&) = default;
};

struct CellState {
    double soc = 0.0; // in [0, 1]
    bool bypassed = false;

    friend bool operator==(const CellState&, const CellState&) = default;
};

/// Series pack: one shared parameter set, per-cell state, and the series
/// current flowing through every non-bypassed cell.
struct PackState {
    CellParams params;
    std::vector<CellState> cells;
    double current_a = 0.0;

    static PackState make(const CellParams& params, const std::vector<double>& initial_soc,
                          double current_a);

    void validate() const;

    friend bool operator==(const PackState&, const PackState&) = default;
};

/// One recorded integration step. `phase` is the recursion level (= number of
/// bypassed cells when the step began); `pack_voltage` sums the terminal
/// voltages of the cells that were actually in the charging path.
struct ChargeStepRecord {
    std::int64_t t_ms = 0; // end-of-step time
    double dt_ms = 0.0;
    double current_a = 0.0;
    std::vector<double> per_cell_voltage;
    std::vector<double> per_cell_soc;
    int phase = 0;
    double pack_voltage = 0.0;
};

/// Snapshot of the pack after a step: per-cell voltages at the pack current
/// (bypassed cells read their OCV), SOCs, and the active-cell voltage sum.
ChargeStepRecord make_charge_record(const PackState& pack, std::int64_t t_ms, double dt_ms,
                                    int phase);

/// Open-circuit voltage, linear in SOC: v_min + (v_max - v_min) * soc.
/// Throws DomainError for soc outside [0, 1].
double ocv(double soc, const CellParams& params);

/// ocv(soc) plus the ohmic rise current*r_int; a bypassed cell carries no
/// current and reads its OCV.
double terminal_voltage(const CellState& cell, const CellParams& params, double current_a);

/// Advances every non-bypassed cell by current*dt of charge (SOC clamped to 1)
/// and bypasses each cell whose rested voltage has reached v_max.
/// Throws DomainError for dt <= 0.
PackState step_charge(const PackState& pack, double dt_ms);

bool all_bypassed(const PackState& pack);

struct ChargeRun {
    PackState pack;
    std::vector<ChargeStepRecord> records;
    int depth = 0; // recursion levels actually entered
};

/// Charges the pack level by level: step until at least one more cell
/// bypasses, then recurse on the reduced active set until every cell is
/// bypassed. Depth is bounded by the cell count for any positive current.
/// Throws DepthExceededError past max_depth (e.g. zero current with unfilled
/// cells) and DomainError for dt <= 0 or max_depth < cell count.
ChargeRun charge_series_recursive(const PackState& pack, double dt_ms, int max_depth);

/// Energy in watt-hours delivered over the recorded steps.
/// Throws UnorderedTraceError if record timestamps decrease.
double energy_delivered_wh(const std::vector<ChargeStepRecord>& records);

/// Milliseconds per hour; capacity_ah * kMsPerHour is the cell capacity in A*ms.
inline constexpr double kMsPerHour = 3.6e6;

} // namespace evmag
