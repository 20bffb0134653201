#pragma once

// =============================================================================
// Scenario language. Line-oriented, `#` comments, whitespace-separated
// key=value fields:
//
//   pack cells=<int> capacity_ah=<float> vmin=<float> vmax=<float> rint=<float> [soc=<float>(,<float>)*]
//   socket id=<int> location=(front|driver|rear) [escape=<float>,<float>] [aperture=<float>] [rmax=<float>]
//   policy (electromagnet|hall threshold_a=<float>|alarm threshold_n=<float>)
//   interlock (on|off)
//   set <param>=<value>
//   at <int>ms plug socket=<int> [angle=<float>]
//   at <int>ms vehicle (static|start)
//   at <int>ms move dir=<float>,<float> dist=<float>
//   at <int>ms fault (driveoff|stuckmagnet|dropout ms=<int>)
//
// Parsing collects every error instead of stopping at the first; unknown
// directives and keys are errors. Serialization is canonical: defaults are
// resolved and echoed, keys are emitted in a fixed order, and
// parse(serialize(s)) is structurally identical to s.
// =============================================================================

#include "evmag/engine.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evmag {

struct ParseError {
    int line = 0;   // 1-based
    int column = 0; // 1-based
    std::string message;

    std::string to_string() const;

    friend bool operator==(const ParseError&, const ParseError&) = default;
};

struct PackConfig {
    int cells = 4;
    CellParams params;
    std::vector<double> initial_soc = {0.2, 0.2, 0.2, 0.2};

    friend bool operator==(const PackConfig&, const PackConfig&) = default;
};

struct ScenarioEvent {
    enum class Kind { Plug, Vehicle, Move, Fault };

    SimTime t = 0;
    Kind kind = Kind::Plug;
    int socket_id = 0;       // Plug
    double angle_deg = 0.0;  // Plug
    VehicleState vehicle = VehicleState::Static;
    Vec2 dir{1.0, 0.0};      // Move (unit)
    double dist_mm = 0.0;    // Move
    FaultKind fault = FaultKind::DriveOffWhileCharging;
    SimTime dropout_ms = 0;

    friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct Scenario {
    PackConfig pack;
    std::vector<SocketSpec> sockets;
    SafetyPolicy policy = SafetyPolicy::electromagnet();
    bool interlock = true;
    EngineParams params;
    std::vector<ScenarioEvent> events; // sorted by (t, declaration order)

    WorldConfig to_world_config() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty(); }
};

ParseResult parse_scenario(std::string_view text);

std::string serialize_scenario(const Scenario& scenario);

/// Builds the world and schedules every scenario event.
World make_world(const Scenario& scenario);

} // namespace evmag
