#include "evmag/controller.hpp"

#include <algorithm>

namespace evmag {

const char* to_string(VehicleState v) {
    return v == VehicleState::Static ? "static" : "start";
}

const char* to_string(ControllerPhaseKind k) {
    switch (k) {
    case ControllerPhaseKind::Idle: return "Idle";
    case ControllerPhaseKind::Attaching: return "Attaching";
    case ControllerPhaseKind::Charging: return "Charging";
    case ControllerPhaseKind::Detaching: return "Detaching";
    case ControllerPhaseKind::Complete: return "Complete";
    case ControllerPhaseKind::Fault: return "Fault";
    }
    return "?";
}

const char* to_string(PolarityMode m) {
    return m == PolarityMode::Attract ? "attract" : "release";
}

const char* to_string(Command::Kind k) {
    switch (k) {
    case Command::Kind::SetPolarity: return "SET_POLARITY";
    case Command::Kind::BeginSession: return "BEGIN_SESSION";
    case Command::Kind::EndSession: return "END_SESSION";
    case Command::Kind::TriggerCutoff: return "TRIGGER_CUTOFF";
    case Command::Kind::RaiseAlarm: return "RAISE_ALARM";
    case Command::Kind::EmitUi: return "EMIT_UI";
    case Command::Kind::DenyDrive: return "DENY_DRIVE";
    case Command::Kind::AllowDrive: return "ALLOW_DRIVE";
    }
    return "?";
}

const char* to_string(SafetyPolicy::Kind k) {
    switch (k) {
    case SafetyPolicy::Kind::Electromagnet: return "electromagnet";
    case SafetyPolicy::Kind::HallResistance: return "hall";
    case SafetyPolicy::Kind::AlarmOnly: return "alarm";
    }
    return "?";
}

const char* to_string(ControllerEvent e) {
    switch (e) {
    case ControllerEvent::PlugInserted: return "PLUG_INSERTED";
    case ControllerEvent::EngagedConfirmed: return "ENGAGED_CONFIRMED";
    case ControllerEvent::VehicleBecameStart: return "VEHICLE_BECAME_START";
    case ControllerEvent::AllCellsBypassed: return "ALL_CELLS_BYPASSED";
    case ControllerEvent::CurrentBelowThreshold: return "CURRENT_BELOW_THRESHOLD";
    case ControllerEvent::TensionAboveThreshold: return "TENSION_ABOVE_THRESHOLD";
    case ControllerEvent::DisengagedConfirmed: return "DISENGAGED_CONFIRMED";
    case ControllerEvent::DamageReported: return "DAMAGE_REPORTED";
    }
    return "?";
}

VehicleState detect_vehicle_state(std::span<const DetectionSample> samples, int n_debounce,
                                  double speed_epsilon_mps, VehicleState previous) {
    if (n_debounce <= 0) {
        throw DomainError("debounce window must be positive");
    }
    if (std::ssize(samples) < n_debounce) {
        throw InsufficientSamplesError("need " + std::to_string(n_debounce) + " samples, have " +
                                       std::to_string(samples.size()));
    }
    const auto last = samples.subspan(samples.size() - static_cast<std::size_t>(n_debounce));
    const auto active = [speed_epsilon_mps](const DetectionSample& s) {
        return s.ignition_on || s.wheel_speed_mps > speed_epsilon_mps;
    };
    if (std::all_of(last.begin(), last.end(), active)) {
        return VehicleState::Start;
    }
    if (std::none_of(last.begin(), last.end(), active)) {
        return VehicleState::Static;
    }
    return previous;
}

VehicleStateDetector::VehicleStateDetector(int n_debounce, double speed_epsilon_mps)
    : n_debounce_(n_debounce), speed_epsilon_(speed_epsilon_mps) {
    if (n_debounce_ <= 0) {
        throw DomainError("debounce window must be positive");
    }
}

VehicleState VehicleStateDetector::update(const DetectionSample& sample) {
    window_.push_back(sample);
    while (std::ssize(window_) > n_debounce_) {
        window_.pop_front();
    }
    if (std::ssize(window_) == n_debounce_) {
        std::vector<DetectionSample> copy(window_.begin(), window_.end());
        state_ = detect_vehicle_state(copy, n_debounce_, speed_epsilon_, state_);
    }
    return state_;
}

ControllerPhase ControllerPhase::fault(const std::string& reason) {
    if (reason.empty()) {
        throw DomainError("fault reason must be nonempty");
    }
    ControllerPhase p{ControllerPhaseKind::Fault};
    p.fault_reason_ = reason;
    return p;
}

std::string ControllerPhase::name() const {
    if (kind_ == ControllerPhaseKind::Fault) {
        return "Fault(" + fault_reason_ + ")";
    }
    return to_string(kind_);
}

Command Command::emit_ui(const std::string& text) {
    if (text.empty()) {
        throw DomainError("UI text must be nonempty");
    }
    return {Kind::EmitUi, {}, text};
}

const std::string& disconnect_ui_message() {
    static const std::string msg =
        "The car enters into the non-starting state, and charging cable is disconnected";
    return msg;
}

const std::string& plug_refused_ui_message() {
    static const std::string msg =
        "Vehicle is in the start state; plug refused until it is static";
    return msg;
}

SafetyPolicy SafetyPolicy::hall_resistance(double threshold_current_a) {
    if (!(threshold_current_a > 0.0)) {
        throw DomainError("hall current threshold must be positive");
    }
    return SafetyPolicy{Kind::HallResistance, threshold_current_a};
}

SafetyPolicy SafetyPolicy::alarm_only(double threshold_tension_n) {
    if (!(threshold_tension_n > 0.0)) {
        throw DomainError("alarm tension threshold must be positive");
    }
    return SafetyPolicy{Kind::AlarmOnly, threshold_tension_n};
}

double SafetyPolicy::threshold_current_a() const {
    if (kind_ != Kind::HallResistance) {
        throw PolicyMismatchError("current threshold queried on non-hall policy");
    }
    return threshold_;
}

double SafetyPolicy::threshold_tension_n() const {
    if (kind_ != Kind::AlarmOnly) {
        throw PolicyMismatchError("tension threshold queried on non-alarm policy");
    }
    return threshold_;
}

TransitionResult on_event(const ControllerPhase& phase, VehicleState vehicle,
                          const SafetyPolicy& policy, ControllerEvent event) {
    // Terminal phases absorb every event.
    if (phase.terminal()) {
        return {phase, {}};
    }
    if (event == ControllerEvent::DamageReported) {
        return {ControllerPhase::fault("damage"), {Command::end_session()}};
    }
    switch (phase.kind()) {
    case ControllerPhaseKind::Idle:
        if (event == ControllerEvent::PlugInserted) {
            if (vehicle == VehicleState::Static) {
                return {ControllerPhase::attaching(),
                        {Command::set_polarity(PolarityMode::Attract)}};
            }
            return {ControllerPhase::idle(), {Command::emit_ui(plug_refused_ui_message())}};
        }
        break;
    case ControllerPhaseKind::Attaching:
        if (event == ControllerEvent::EngagedConfirmed) {
            return {ControllerPhase::charging(),
                    {Command::begin_session(), Command::deny_drive()}};
        }
        break;
    case ControllerPhaseKind::Charging:
        if (event == ControllerEvent::VehicleBecameStart) {
            return {ControllerPhase::detaching(),
                    {Command::set_polarity(PolarityMode::Release), Command::end_session(),
                     Command::emit_ui(disconnect_ui_message())}};
        }
        if (event == ControllerEvent::AllCellsBypassed) {
            return {ControllerPhase::detaching(),
                    {Command::trigger_cutoff(), Command::set_polarity(PolarityMode::Release),
                     Command::end_session()}};
        }
        if (event == ControllerEvent::CurrentBelowThreshold &&
            policy.kind() == SafetyPolicy::Kind::HallResistance) {
            return {ControllerPhase::detaching(),
                    {Command::end_session(), Command::set_polarity(PolarityMode::Release)}};
        }
        if (event == ControllerEvent::TensionAboveThreshold &&
            policy.kind() == SafetyPolicy::Kind::AlarmOnly) {
            return {ControllerPhase::charging(), {Command::raise_alarm()}};
        }
        break;
    case ControllerPhaseKind::Detaching:
        if (event == ControllerEvent::DisengagedConfirmed) {
            return {ControllerPhase::complete(), {Command::allow_drive()}};
        }
        break;
    case ControllerPhaseKind::Complete:
    case ControllerPhaseKind::Fault:
        break;
    }
    return {phase, {}};
}

DriveDecision interlock_check(const InterlockState&, CouplerPhase coupler_phase,
                              bool drive_request) {
    if (drive_request && coupler_phase == CouplerPhase::Engaged) {
        return DriveDecision::Deny;
    }
    return DriveDecision::Allow;
}

HallReading hall_evaluate(double supply_voltage_v, double pack_voltage_v, double base_resistance_ohm,
                          double k_per_newton, double tension_n, const SafetyPolicy& policy) {
    if (policy.kind() != SafetyPolicy::Kind::HallResistance) {
        throw PolicyMismatchError("hall_evaluate needs the hall policy");
    }
    if (!(supply_voltage_v > pack_voltage_v)) {
        throw DomainError("supply voltage must exceed pack voltage");
    }
    const double r = contact_resistance(tension_n, base_resistance_ohm, k_per_newton);
    HallReading reading;
    reading.current_a = (supply_voltage_v - pack_voltage_v) / r;
    reading.below_threshold = reading.current_a < policy.threshold_current_a();
    return reading;
}

std::optional<ControllerEvent> cutoff_on_full(const PackState& pack) {
    if (all_bypassed(pack)) {
        return ControllerEvent::AllCellsBypassed;
    }
    return std::nullopt;
}

std::optional<ControllerEvent> alarm_evaluate(double tension_n, const SafetyPolicy& policy) {
    if (policy.kind() != SafetyPolicy::Kind::AlarmOnly) {
        throw PolicyMismatchError("alarm_evaluate needs the alarm policy");
    }
    if (tension_n > policy.threshold_tension_n()) {
        return ControllerEvent::TensionAboveThreshold;
    }
    return std::nullopt;
}

} // namespace evmag
