#include "evmag/battery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evmag {

void CellParams::validate() const {
    if (!(capacity_ah > 0.0)) {
        throw DomainError("cell capacity must be positive");
    }
    if (r_int_ohm < 0.0) {
        throw DomainError("internal resistance must be >= 0");
    }
    if (!(v_max > v_min)) {
        throw DomainError("v_max must exceed v_min");
    }
}

PackState PackState::make(const CellParams& params, const std::vector<double>& initial_soc,
                          double current_a) {
    PackState pack;
    pack.params = params;
    pack.current_a = current_a;
    pack.cells.reserve(initial_soc.size());
    for (double soc : initial_soc) {
        pack.cells.push_back(CellState{soc, false});
    }
    pack.validate();
    return pack;
}

void PackState::validate() const {
    params.validate();
    if (cells.empty()) {
        throw DomainError("pack needs at least one cell");
    }
    if (current_a < 0.0) {
        throw DomainError("charging current must be >= 0");
    }
    for (const CellState& cell : cells) {
        if (cell.soc < 0.0 || cell.soc > 1.0) {
            throw DomainError("cell SOC must be in [0, 1]");
        }
    }
}

double ocv(double soc, const CellParams& params) {
    if (soc < 0.0 || soc > 1.0) {
        throw DomainError("SOC out of [0, 1]: " + std::to_string(soc));
    }
    return params.v_min + (params.v_max - params.v_min) * soc;
}

double terminal_voltage(const CellState& cell, const CellParams& params, double current_a) {
    if (current_a < 0.0) {
        throw DomainError("charging current must be >= 0");
    }
    if (cell.bypassed) {
        return ocv(cell.soc, params);
    }
    return ocv(cell.soc, params) + current_a * params.r_int_ohm;
}

PackState step_charge(const PackState& pack, double dt_ms) {
    if (!(dt_ms > 0.0)) {
        throw DomainError("charge step must be positive");
    }
    PackState next = pack;
    const double capacity_ams = pack.params.capacity_ah * kMsPerHour;
    for (CellState& cell : next.cells) {
        if (cell.bypassed) {
            continue;
        }
        cell.soc = std::min(1.0, cell.soc + pack.current_a * dt_ms / capacity_ams);
        // Cut-off reads the rested cell: no ohmic term in the comparison.
        if (terminal_voltage(cell, pack.params, 0.0) >= pack.params.v_max) {
            cell.bypassed = true;
        }
    }
    return next;
}

bool all_bypassed(const PackState& pack) {
    return std::all_of(pack.cells.begin(), pack.cells.end(),
                       [](const CellState& c) { return c.bypassed; });
}

ChargeStepRecord make_charge_record(const PackState& pack, std::int64_t t_ms, double dt_ms,
                                    int phase) {
    ChargeStepRecord rec;
    rec.t_ms = t_ms;
    rec.dt_ms = dt_ms;
    rec.current_a = pack.current_a;
    rec.phase = phase;
    rec.per_cell_voltage.reserve(pack.cells.size());
    rec.per_cell_soc.reserve(pack.cells.size());
    for (const CellState& cell : pack.cells) {
        const double v = terminal_voltage(cell, pack.params, cell.bypassed ? 0.0 : pack.current_a);
        rec.per_cell_voltage.push_back(v);
        rec.per_cell_soc.push_back(cell.soc);
        if (!cell.bypassed) {
            rec.pack_voltage += v;
        }
    }
    return rec;
}

namespace {

int bypassed_count(const PackState& pack) {
    return static_cast<int>(std::count_if(pack.cells.begin(), pack.cells.end(),
                                          [](const CellState& c) { return c.bypassed; }));
}

// One recursion level: step until the active set shrinks, then recurse.
void charge_level(PackState& pack, double dt_ms, int max_depth, int depth, std::int64_t& t_ms,
                  std::vector<ChargeStepRecord>& records, int& deepest) {
    if (all_bypassed(pack)) {
        return;
    }
    if (depth >= max_depth) {
        throw DepthExceededError("charge recursion exceeded depth " + std::to_string(max_depth));
    }
    deepest = std::max(deepest, depth + 1);
    const int level_bypassed = bypassed_count(pack);
    if (!(pack.current_a > 0.0)) {
        // No charge can ever complete a cell; fail via the depth bound rather than spin.
        throw DepthExceededError("zero current with unfilled cells cannot terminate");
    }
    while (bypassed_count(pack) == level_bypassed) {
        PackState stepped = step_charge(pack, dt_ms);
        if (stepped.cells == pack.cells) {
            throw DepthExceededError("charge step makes no progress; configuration cannot terminate");
        }
        pack = std::move(stepped);
        t_ms += static_cast<std::int64_t>(dt_ms);
        records.push_back(make_charge_record(pack, t_ms, dt_ms, level_bypassed));
    }
    charge_level(pack, dt_ms, max_depth, depth + 1, t_ms, records, deepest);
}

} // namespace

ChargeRun charge_series_recursive(const PackState& pack, double dt_ms, int max_depth) {
    if (!(dt_ms > 0.0)) {
        throw DomainError("charge step must be positive");
    }
    if (max_depth < static_cast<int>(pack.cells.size())) {
        throw DomainError("max_depth must be at least the cell count");
    }
    pack.validate();
    ChargeRun run;
    run.pack = pack;
    std::int64_t t_ms = 0;
    charge_level(run.pack, dt_ms, max_depth, 0, t_ms, run.records, run.depth);
    return run;
}

double energy_delivered_wh(const std::vector<ChargeStepRecord>& records) {
    double wh = 0.0;
    std::int64_t prev_t = 0;
    bool have_prev = false;
    for (const ChargeStepRecord& rec : records) {
        if (have_prev && rec.t_ms < prev_t) {
            throw UnorderedTraceError("charge records out of time order at t=" +
                                      std::to_string(rec.t_ms));
        }
        prev_t = rec.t_ms;
        have_prev = true;
        wh += rec.pack_voltage * rec.current_a * rec.dt_ms / kMsPerHour;
    }
    return wh;
}

} // namespace evmag
