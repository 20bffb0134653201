// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exit code is the number of failures.

#include "evmag/cli.hpp"
#include "evmag/csv.hpp"
#include "evmag/scenario.hpp"
#include "evmag/summary.hpp"

#include "../support/battery_oracle.hpp"
#include "../support/scenario_gen.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace evmag;

namespace {

int g_checks_failed = 0;
std::string g_detail;

void expect(bool condition, const std::string& what) {
    if (!condition) {
        ++g_checks_failed;
        if (g_detail.size() < 400) {
            g_detail += (g_detail.empty() ? "" : "; ") + what;
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

Scenario load_fixture(const std::string& name) {
    const ParseResult parsed =
        parse_scenario(read_file(std::string(EVMAG_SOURCE_DIR) + "/scenarios/" + name));
    if (!parsed.ok()) {
        throw DomainError("fixture does not parse: " + name);
    }
    return *parsed.scenario;
}

std::vector<const TraceRecord*> of_kind(const World& world, const std::string& kind) {
    std::vector<const TraceRecord*> found;
    for (const TraceRecord& rec : world.trace()) {
        if (rec.kind == kind) {
            found.push_back(&rec);
        }
    }
    return found;
}

std::string attr_of(const TraceRecord& rec, const std::string& key) {
    for (const auto& [k, v] : rec.attrs) {
        if (k == key) {
            return v;
        }
    }
    return {};
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// --- criterion 1 ---------------------------------------------------------

void criterion_case_a() {
    const auto started = std::chrono::steady_clock::now();
    World world = make_world(load_fixture("paper_case_a.scn"));
    world.run_until(kDefaultRunHorizonMs);

    expect(of_kind(world, "DAMAGE").empty(), "case A produced damage");
    expect(of_kind(world, "END_SESSION").size() == 1, "case A session did not end");
    const bool safe_release = !of_kind(world, "SAFE_RELEASE").empty();
    bool clean_detach = false;
    for (const TraceRecord* rec : of_kind(world, "COUPLER")) {
        if (attr_of(*rec, "phase") == "disengaged" &&
            attr_of(*rec, "reason") == "detach_complete") {
            clean_detach = true;
        }
    }
    expect(safe_release || clean_detach, "case A neither slipped free nor detached cleanly");
    expect(world.coupler().phase() == CouplerPhase::Disengaged, "case A coupler still attached");
    expect(elapsed_s(started) < 1.0, "case A exceeded 1 s");
}

// --- criterion 2 ---------------------------------------------------------

void criterion_case_b() {
    const auto started = std::chrono::steady_clock::now();
    World world = make_world(load_fixture("paper_case_b.scn"));
    world.run_until(kDefaultRunHorizonMs);

    const auto damage = of_kind(world, "DAMAGE");
    expect(damage.size() == 1, "case B expected exactly 1 damage event, saw " +
                                   std::to_string(damage.size()));
    if (damage.size() == 1) {
        int rises_before = 0;
        for (const TraceRecord& rec : world.trace()) {
            if (rec.kind == "TENSION_RISE" && rec.seq < damage[0]->seq) {
                ++rises_before;
            }
        }
        expect(rises_before >= 1, "case B damage was not preceded by a tension rise");
    }
    expect(elapsed_s(started) < 1.0, "case B exceeded 1 s");
}

// --- criterion 3 ---------------------------------------------------------

void criterion_safety_sweep() {
    const auto started = std::chrono::steady_clock::now();
    std::mt19937 rng(0xE1E0);
    std::uniform_int_distribution<int> location_dist(0, 2);
    std::uniform_real_distribution<double> soc_dist(0.0, 0.9);
    std::uniform_int_distribution<SimTime> plug_dist(100, 2000);
    std::uniform_int_distribution<SimTime> hold_dist(200, 8000);
    std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * 3.14159265358979);
    std::uniform_real_distribution<double> speed_dist(0.5, 3.0);

    for (int run = 0; run < 1000; ++run) {
        WorldConfig config;
        const auto location = static_cast<SocketLocation>(location_dist(rng));
        config.sockets = {SocketSpec::with_defaults(130, location)};
        config.pack = PackState::make(CellParams{},
                                      {soc_dist(rng), soc_dist(rng), soc_dist(rng), soc_dist(rng)},
                                      0.0);
        const double heading = angle_dist(rng);
        config.params.drive_direction = Vec2{std::cos(heading), std::sin(heading)};
        config.params.drive_speed_mps = speed_dist(rng);
        // Electromagnet policy and interlock on are the defaults under test.

        World world(config);
        const SimTime plug_at = plug_dist(rng);
        const SimTime driveoff_at = plug_at + hold_dist(rng);
        world.schedule(Event::plug_inserted(130), plug_at);
        world.inject_fault(FaultKind::DriveOffWhileCharging, driveoff_at);
        world.run_until(driveoff_at + 5000);

        if (!of_kind(world, "DAMAGE").empty()) {
            expect(false, "sweep run " + std::to_string(run) + " produced damage");
            return;
        }
        const auto detected = of_kind(world, "VEHICLE_BECAME_START");
        if (detected.empty()) {
            expect(false, "sweep run " + std::to_string(run) + " never detected the start");
            return;
        }
        const TraceRecord* release = nullptr;
        for (const TraceRecord& rec : world.trace()) {
            if (rec.kind == "SET_POLARITY" && attr_of(rec, "mode") == "release" &&
                rec.seq >= detected[0]->seq) {
                release = &rec;
                break;
            }
        }
        if (release == nullptr || release->t - detected[0]->t > 10) {
            expect(false, "sweep run " + std::to_string(run) + " released late or never");
            return;
        }
    }
    const double wall = elapsed_s(started);
    expect(wall < 30.0, "sweep exceeded 30 s (" + std::to_string(wall) + ")");
}

// --- criterion 4 ---------------------------------------------------------

void criterion_hall_crossing() {
    std::mt19937 rng(0x4A11);
    std::uniform_real_distribution<double> r0_dist(0.005, 0.05);
    std::uniform_real_distribution<double> k_dist(20.0, 80.0);
    std::uniform_real_distribution<double> speed_dist(0.05, 0.5);
    std::uniform_real_distribution<double> tension_star_dist(5.0, 60.0);

    for (int draw = 0; draw < 20; ++draw) {
        const double r0 = r0_dist(rng);
        const double k = k_dist(rng);
        const double speed = speed_dist(rng);
        const double t_star = tension_star_dist(rng);
        const double delta_v = 5.0;
        const double threshold_a = delta_v / (r0 * (1.0 + k * t_star));

        WorldConfig config;
        config.sockets = {SocketSpec::with_defaults(134, SocketLocation::RearSide)};
        config.policy = SafetyPolicy::hall_resistance(threshold_a);
        config.interlock_enabled = false;
        config.params.drive_direction = Vec2{-1.0, 0.0};
        config.params.drive_speed_mps = speed;
        config.params.hall_r0_ohm = r0;
        config.params.hall_k_per_newton = k;

        World world(config);
        world.schedule(Event::plug_inserted(134), 100);
        world.schedule(Event::vehicle_command(VehicleState::Start), 1000);

        // Tension ramps at 0.5 N/mm * speed mm/ms from the 1000 ms tick on;
        // the continuous-ramp crossing time is t* = 1000 + T*/(0.5 * speed).
        // Stop a few ticks past it so the still-attached cable cannot ramp all
        // the way to the damage threshold afterwards.
        const double ramp_n_per_ms = 0.5 * speed;
        const double expected_ms = 1000.0 + t_star / ramp_n_per_ms;
        world.run_until(static_cast<SimTime>(expected_ms) + 30);

        const auto end = of_kind(world, "END_SESSION");
        if (end.size() != 1) {
            expect(false, "hall draw " + std::to_string(draw) + " did not end exactly once");
            return;
        }
        const double error_ms = std::abs(static_cast<double>(end[0]->t) - expected_ms);
        if (error_ms > 10.0) {
            expect(false, "hall draw " + std::to_string(draw) + " missed the closed form by " +
                              std::to_string(error_ms) + " ms");
            return;
        }
    }
}

// --- criterion 5 ---------------------------------------------------------

void criterion_battery_oracle() {
    const std::vector<double> socs{0.1, 0.4, 0.7, 0.9};
    CellParams params; // 50 Ah, 3.0..4.2 V, 0.05 ohm defaults
    const PackState pack = PackState::make(params, socs, 10.0);
    const ChargeRun run = charge_series_recursive(pack, 100.0, 4);

    expect(run.depth <= 4, "recursion depth " + std::to_string(run.depth) + " > 4");
    expect(all_bypassed(run.pack), "cells left unfilled");

    oracle::CellModel model;
    model.capacity_ah = params.capacity_ah;
    model.v_min = params.v_min;
    model.v_max = params.v_max;
    model.r_int_ohm = params.r_int_ohm;
    const oracle::Trajectory fine = oracle::integrate(model, socs, 10.0, 100.0,
                                                      static_cast<int>(run.records.size()), 100);

    expect(fine.bypass_order == std::vector<std::size_t>{3, 2, 1, 0},
           "oracle bypass order is not descending SOC");
    double worst = 0.0;
    for (std::size_t step = 0; step < run.records.size(); ++step) {
        for (std::size_t c = 0; c < socs.size(); ++c) {
            worst = std::max(worst, std::abs(run.records[step].per_cell_soc[c] -
                                             fine.soc_at_step[step][c]));
        }
    }
    expect(worst <= 1e-3, "SOC deviates from the oracle by " + std::to_string(worst));

    // Bypass order out of the implementation's own records.
    std::vector<std::size_t> order;
    std::vector<bool> seen(socs.size(), false);
    for (const ChargeStepRecord& rec : run.records) {
        for (std::size_t c = 0; c < socs.size(); ++c) {
            if (!seen[c] && rec.per_cell_soc[c] >= 1.0) {
                seen[c] = true;
                order.push_back(c);
            }
        }
    }
    expect(order == std::vector<std::size_t>({3, 2, 1, 0}), "bypass order is not descending SOC");

    for (const CellState& cell : run.pack.cells) {
        const double rested = terminal_voltage(cell, params, 0.0);
        expect(std::abs(rested - params.v_max) <= 1e-3,
               "final rested voltage " + std::to_string(rested) + " not within 1 mV of v_max");
    }
}

// --- criterion 6 ---------------------------------------------------------

void criterion_determinism() {
    const auto trace_of = [](const Scenario& scenario) {
        World world = make_world(scenario);
        world.run_until(120'000);
        return format_trace(world.trace());
    };
    for (const char* fixture : {"paper_case_a.scn", "paper_case_b.scn", "default.scn"}) {
        const Scenario scenario = load_fixture(fixture);
        expect(trace_of(scenario) == trace_of(scenario),
               std::string("fixture trace not reproducible: ") + fixture);
    }
    std::mt19937 rng(0xD27E);
    for (int i = 0; i < 50; ++i) {
        const std::string text = testgen::random_scenario_text(rng);
        const ParseResult parsed = parse_scenario(text);
        if (!parsed.ok()) {
            expect(false, "generated scenario failed to parse");
            return;
        }
        if (trace_of(*parsed.scenario) != trace_of(*parsed.scenario)) {
            expect(false, "random scenario " + std::to_string(i) + " not byte-identical");
            return;
        }
    }
}

// --- criterion 7 ---------------------------------------------------------

void criterion_parser_contract() {
    std::mt19937 rng(0x9A25E);
    for (int i = 0; i < 200; ++i) {
        const std::string text = testgen::random_scenario_text(rng);
        const ParseResult first = parse_scenario(text);
        if (!first.ok()) {
            expect(false, "round-trip input " + std::to_string(i) + " failed to parse");
            return;
        }
        const std::string canonical = serialize_scenario(*first.scenario);
        const ParseResult second = parse_scenario(canonical);
        if (!second.ok() || !(*second.scenario == *first.scenario) ||
            serialize_scenario(*second.scenario) != canonical) {
            expect(false, "round-trip identity failed on input " + std::to_string(i));
            return;
        }
    }

    const struct {
        const char* text;
        int line;
    } malformed[] = {
        {"socket id=130 location=front\nfleep\n", 2},
        {"pack cells=4 capacity_ah=50 vmin=3 vmax=4.2 rint=0.05 soc=0.2,0.2\n", 1},
        {"pack cells=4 capacity_ah=50 vmin=4.2 vmax=3 rint=0.05\n", 1},
        {"socket id=130 location=front\nsocket id=130 location=rear\n", 2},
        {"socket id=130 location=front aperture=120\n", 1},
        {"socket id=130 location=front\nat 100ms plug socket=999\n", 2},
        {"policy hall\n", 1},
        {"socket id=130 location=front\nat 100 plug socket=130\n", 2},
        {"at 10ms fault dropout\n", 1},
        {"socket id=130 location=front\nat 10ms move dir=1,0\n", 2},
    };
    for (const auto& c : malformed) {
        const ParseResult result = parse_scenario(c.text);
        bool at_line = false;
        for (const ParseError& e : result.errors) {
            if (e.line == c.line) {
                at_line = true;
            }
        }
        expect(!result.ok() && at_line,
               std::string("malformed input not rejected at the right line: ") + c.text);
    }

    // Exit-code partition: 0 clean, 1 runtime trouble, 2 parse errors.
    std::ostringstream sink;
    const std::string fixtures = std::string(EVMAG_SOURCE_DIR) + "/scenarios";
    const std::string tmp = std::string(EVMAG_BINARY_DIR) + "/acceptance_malformed.scn";
    {
        std::ofstream bad(tmp, std::ios::binary);
        bad << "socket id=130 location=front\nat 100ms plug socket=999\n";
    }
    std::ostringstream err;
    expect(run_command({"check", fixtures + "/paper_case_a.scn"}, sink, err) == 0,
           "check on a valid fixture should exit 0");
    expect(run_command({"run", fixtures + "/paper_case_b.scn"}, sink, err) == 0,
           "run reporting damage should still exit 0");
    expect(run_command({"check", tmp}, sink, err) == 2, "parse errors should exit 2");
    expect(run_command({"run", tmp}, sink, err) == 2, "run on a bad scenario should exit 2");
    expect(run_command({"run", fixtures + "/no_such_file.scn"}, sink, err) == 1,
           "missing file should exit 1");
    expect(run_command({"report", fixtures + "/no_such_file.trace"}, sink, err) == 1,
           "missing trace should exit 1");
}

// --- criterion 8 ---------------------------------------------------------

void criterion_voltage_curve_shape() {
    WorldConfig config;
    config.sockets = {SocketSpec::with_defaults(130, SocketLocation::Front)};
    CellParams params;
    params.capacity_ah = 0.05; // fills in ~16 s of simulated time
    config.pack = PackState::make(params, {0.1, 0.4, 0.7, 0.9}, 0.0);
    World world(config);
    world.schedule(Event::plug_inserted(130), 100);
    world.run_until(60'000);
    expect(all_bypassed(world.pack()), "constant-current run did not fill the pack");

    const std::string csv = battery_csv(world.charge_records(), 4);
    std::istringstream stream(csv);
    std::string line;
    std::getline(stream, line); // header
    std::vector<std::vector<double>> voltage_columns(4);
    while (std::getline(stream, line)) {
        std::vector<std::string> cells;
        std::stringstream row(line);
        for (std::string field; std::getline(row, field, ',');) {
            cells.push_back(field);
        }
        for (int c = 0; c < 4; ++c) {
            voltage_columns[c].push_back(std::stod(cells[2 + c]));
        }
    }
    for (int c = 0; c < 4; ++c) {
        const std::vector<double>& column = voltage_columns[c];
        // The bypass row is the first drop (loaded voltage falls back to OCV).
        std::size_t bypass_row = column.size();
        for (std::size_t r = 1; r < column.size(); ++r) {
            if (column[r] < column[r - 1]) {
                bypass_row = r;
                break;
            }
        }
        expect(bypass_row < column.size(), "cell " + std::to_string(c + 1) + " never bypassed");
        for (std::size_t r = 1; r < bypass_row; ++r) {
            if (column[r] < column[r - 1]) {
                expect(false, "voltage column " + std::to_string(c + 1) +
                                  " decreases before bypass at row " + std::to_string(r));
                return;
            }
        }
    }
}

// --- criterion 9 ---------------------------------------------------------

void criterion_controller_totality() {
    const std::vector<ControllerPhase> phases = {
        ControllerPhase::idle(),     ControllerPhase::attaching(), ControllerPhase::charging(),
        ControllerPhase::detaching(), ControllerPhase::complete(), ControllerPhase::fault("damage")};
    const std::vector<SafetyPolicy> policies = {SafetyPolicy::electromagnet(),
                                                SafetyPolicy::hall_resistance(5.0),
                                                SafetyPolicy::alarm_only(50.0)};
    const std::vector<ControllerEvent> events = {
        ControllerEvent::PlugInserted,        ControllerEvent::EngagedConfirmed,
        ControllerEvent::VehicleBecameStart,  ControllerEvent::AllCellsBypassed,
        ControllerEvent::CurrentBelowThreshold, ControllerEvent::TensionAboveThreshold,
        ControllerEvent::DisengagedConfirmed, ControllerEvent::DamageReported};

    int combos = 0;
    for (const ControllerPhase& phase : phases) {
        for (VehicleState vehicle : {VehicleState::Static, VehicleState::Start}) {
            for (const SafetyPolicy& policy : policies) {
                for (ControllerEvent event : events) {
                    ++combos;
                    const TransitionResult a = on_event(phase, vehicle, policy, event);
                    const TransitionResult b = on_event(phase, vehicle, policy, event);
                    if (!(a.phase == b.phase) || !(a.commands == b.commands)) {
                        expect(false, "on_event is not deterministic");
                        return;
                    }
                    for (const Command& cmd : a.commands) {
                        if (cmd.kind == Command::Kind::SetPolarity &&
                            cmd.mode == PolarityMode::Attract &&
                            vehicle != VehicleState::Static) {
                            expect(false, "attract issued while the vehicle was not static");
                            return;
                        }
                    }
                }
            }
        }
    }
    expect(combos == 6 * 2 * 3 * 8, "enumeration did not cover the full domain");
}

struct Criterion {
    const char* name;
    std::function<void()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 case A: forward drive-off ends clean, zero damage", criterion_case_a},
        {"2 case B: reverse drive-off damages after tension rise", criterion_case_b},
        {"3 safety sweep: 1000 random runs, no damage, release within a tick",
         criterion_safety_sweep},
        {"4 hall policy: session end matches closed-form crossing within 1 tick",
         criterion_hall_crossing},
        {"5 battery: recursion matches the fine-step oracle", criterion_battery_oracle},
        {"6 determinism: byte-identical traces on repeat runs", criterion_determinism},
        {"7 parser: round-trip identity, diagnostics, exit codes", criterion_parser_contract},
        {"8 voltage curves are monotone until each cell's bypass", criterion_voltage_curve_shape},
        {"9 controller totality and attract-only-at-static", criterion_controller_totality},
    };

    int failed = 0;
    for (const Criterion& criterion : criteria) {
        g_checks_failed = 0;
        g_detail.clear();
        try {
            criterion.run();
        } catch (const std::exception& e) {
            ++g_checks_failed;
            g_detail = std::string("exception: ") + e.what();
        }
        if (g_checks_failed == 0) {
            std::printf("[PASS] criterion %s\n", criterion.name);
        } else {
            ++failed;
            std::printf("[FAIL] criterion %s: %s\n", criterion.name, g_detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failed == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d criteria FAILED\n", failed);
    }
    return failed;
}
