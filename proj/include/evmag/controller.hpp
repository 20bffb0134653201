#pragma once

// =============================================================================
// Charging management system: vehicle-state detection with debounce, the
// session state machine and its command outputs, the drive interlock, and the
// three safety policies (the electromagnet protocol plus the two prior-art
// mechanisms it is compared against: current-threshold cut-off behind a
// pressure-sensitive contact resistance, and a tension alarm chip).
// =============================================================================

#include "evmag/battery.hpp"
#include "evmag/coupler.hpp"
#include "evmag/errors.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evmag {

// ---------------------------------------------------------------------------
// Vehicle state detection
// ---------------------------------------------------------------------------

enum class VehicleState { Static, Start };

const char* to_string(VehicleState v);

struct DetectionSample {
    std::int64_t t_ms = 0;
    bool ignition_on = false;
    double wheel_speed_mps = 0.0; // >= 0
};

inline constexpr int kDefaultDebounceSamples = 3;
inline constexpr double kDefaultSpeedEpsilonMps = 0.05;

/// Debounced classification: Start when the last n_debounce samples all show
/// activity (ignition or wheel speed above epsilon), Static when they all show
/// none, otherwise the previous report stands.
/// Throws InsufficientSamplesError with fewer than n_debounce samples.
VehicleState detect_vehicle_state(std::span<const DetectionSample> samples, int n_debounce,
                                  double speed_epsilon_mps, VehicleState previous);

/// Rolling-window wrapper around detect_vehicle_state; reports Static until
/// the window first fills.
class VehicleStateDetector {
public:
    VehicleStateDetector(int n_debounce = kDefaultDebounceSamples,
                         double speed_epsilon_mps = kDefaultSpeedEpsilonMps);

    VehicleState update(const DetectionSample& sample);
    VehicleState state() const { return state_; }

private:
    int n_debounce_;
    double speed_epsilon_;
    VehicleState state_ = VehicleState::Static;
    std::deque<DetectionSample> window_;
};

// ---------------------------------------------------------------------------
// Controller phase and commands
// ---------------------------------------------------------------------------

enum class ControllerPhaseKind { Idle, Attaching, Charging, Detaching, Complete, Fault };

const char* to_string(ControllerPhaseKind k);

class ControllerPhase {
public:
    ControllerPhase() = default;

    static ControllerPhase idle() { return ControllerPhase{ControllerPhaseKind::Idle}; }
    static ControllerPhase attaching() { return ControllerPhase{ControllerPhaseKind::Attaching}; }
    static ControllerPhase charging() { return ControllerPhase{ControllerPhaseKind::Charging}; }
    static ControllerPhase detaching() { return ControllerPhase{ControllerPhaseKind::Detaching}; }
    static ControllerPhase complete() { return ControllerPhase{ControllerPhaseKind::Complete}; }
    static ControllerPhase fault(const std::string& reason);

    ControllerPhaseKind kind() const { return kind_; }
    const std::string& fault_reason() const { return fault_reason_; }
    bool terminal() const {
        return kind_ == ControllerPhaseKind::Complete || kind_ == ControllerPhaseKind::Fault;
    }

    std::string name() const; // "Fault(reason)" or the bare kind name

    friend bool operator==(const ControllerPhase&, const ControllerPhase&) = default;

private:
    explicit ControllerPhase(ControllerPhaseKind kind) : kind_(kind) {}

    ControllerPhaseKind kind_ = ControllerPhaseKind::Idle;
    std::string fault_reason_;
};

enum class PolarityMode { Attract, Release };

const char* to_string(PolarityMode m);

struct Command {
    enum class Kind {
        SetPolarity,
        BeginSession,
        EndSession,
        TriggerCutoff,
        RaiseAlarm,
        EmitUi,
        DenyDrive,
        AllowDrive,
    };

    Kind kind = Kind::BeginSession;
    PolarityMode mode = PolarityMode::Attract; // SetPolarity only
    std::string text;                          // EmitUi only, nonempty

    static Command set_polarity(PolarityMode m) { return {Kind::SetPolarity, m, {}}; }
    static Command begin_session() { return {Kind::BeginSession, {}, {}}; }
    static Command end_session() { return {Kind::EndSession, {}, {}}; }
    static Command trigger_cutoff() { return {Kind::TriggerCutoff, {}, {}}; }
    static Command raise_alarm() { return {Kind::RaiseAlarm, {}, {}}; }
    static Command emit_ui(const std::string& text);
    static Command deny_drive() { return {Kind::DenyDrive, {}, {}}; }
    static Command allow_drive() { return {Kind::AllowDrive, {}, {}}; }

    friend bool operator==(const Command&, const Command&) = default;
};

const char* to_string(Command::Kind k);

/// UI sentence shown when the running vehicle forces a disconnect.
const std::string& disconnect_ui_message();

/// UI sentence shown when a plug is refused because the vehicle is running.
const std::string& plug_refused_ui_message();

// ---------------------------------------------------------------------------
// Safety policies
// ---------------------------------------------------------------------------

class SafetyPolicy {
public:
    enum class Kind { Electromagnet, HallResistance, AlarmOnly };

    static SafetyPolicy electromagnet() { return SafetyPolicy{Kind::Electromagnet, 0.0}; }
    static SafetyPolicy hall_resistance(double threshold_current_a);
    static SafetyPolicy alarm_only(double threshold_tension_n);

    Kind kind() const { return kind_; }
    double threshold_current_a() const;  // HallResistance only
    double threshold_tension_n() const;  // AlarmOnly only

    friend bool operator==(const SafetyPolicy&, const SafetyPolicy&) = default;

private:
    SafetyPolicy(Kind kind, double threshold) : kind_(kind), threshold_(threshold) {}

    Kind kind_ = Kind::Electromagnet;
    double threshold_ = 0.0;
};

const char* to_string(SafetyPolicy::Kind k);

// ---------------------------------------------------------------------------
// Session state machine
// ---------------------------------------------------------------------------

enum class ControllerEvent {
    PlugInserted,
    EngagedConfirmed,
    VehicleBecameStart,
    AllCellsBypassed,
    CurrentBelowThreshold,
    TensionAboveThreshold,
    DisengagedConfirmed,
    DamageReported,
};

const char* to_string(ControllerEvent e);

struct TransitionResult {
    ControllerPhase phase;
    std::vector<Command> commands;
};

/// The charging session transition table. Total and deterministic: every
/// (phase, vehicle, policy, event) combination yields exactly one result, and
/// unlisted combinations leave the phase unchanged with no commands. Complete
/// and Fault absorb everything.
TransitionResult on_event(const ControllerPhase& phase, VehicleState vehicle,
                          const SafetyPolicy& policy, ControllerEvent event);

// ---------------------------------------------------------------------------
// Interlock
// ---------------------------------------------------------------------------

struct InterlockState {
    bool locked = false;
};

enum class DriveDecision { Allow, Deny };

/// Denies exactly the drive requests made while the coupler is engaged.
DriveDecision interlock_check(const InterlockState& interlock, CouplerPhase coupler_phase,
                              bool drive_request);

// ---------------------------------------------------------------------------
// Policy evaluators
// ---------------------------------------------------------------------------

struct HallReading {
    double current_a = 0.0;
    bool below_threshold = false;
};

/// Charging current through the tension-dependent contact resistance, and
/// whether it fell below the hall policy's cut-off threshold.
/// Throws PolicyMismatchError unless the policy is HallResistance and
/// DomainError unless supply voltage exceeds pack voltage.
HallReading hall_evaluate(double supply_voltage_v, double pack_voltage_v, double base_resistance_ohm,
                          double k_per_newton, double tension_n, const SafetyPolicy& policy);

/// AllCellsBypassed once the whole pack is full, otherwise nothing.
std::optional<ControllerEvent> cutoff_on_full(const PackState& pack);

/// TensionAboveThreshold for tension strictly above the alarm threshold.
/// Throws PolicyMismatchError unless the policy is AlarmOnly.
std::optional<ControllerEvent> alarm_evaluate(double tension_n, const SafetyPolicy& policy);

} // namespace evmag
