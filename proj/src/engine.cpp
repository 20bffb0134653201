#include "evmag/engine.hpp"

#include <algorithm>
#include <cmath>

namespace evmag {

const char* to_string(FaultKind k) {
    switch (k) {
    case FaultKind::DriveOffWhileCharging: return "driveoff";
    case FaultKind::StuckElectromagnet: return "stuckmagnet";
    case FaultKind::SensorDropout: return "dropout";
    }
    return "?";
}

const char* to_string(Event::Kind k) {
    switch (k) {
    case Event::Kind::PlugInserted: return "PLUG_INSERTED";
    case Event::Kind::VehicleCommand: return "VEHICLE_COMMAND";
    case Event::Kind::MotionStep: return "MOTION_STEP";
    case Event::Kind::Tick: return "TICK";
    case Event::Kind::Fault: return "FAULT";
    case Event::Kind::EngagedConfirmed: return "ENGAGED_CONFIRMED";
    case Event::Kind::DisengagedConfirmed: return "DISENGAGED_CONFIRMED";
    case Event::Kind::VehicleBecameStart: return "VEHICLE_BECAME_START";
    case Event::Kind::DamageReported: return "DAMAGE_REPORTED";
    case Event::Kind::AllCellsBypassed: return "ALL_CELLS_BYPASSED";
    case Event::Kind::CurrentBelowThreshold: return "CURRENT_BELOW_THRESHOLD";
    case Event::Kind::TensionAboveThreshold: return "TENSION_ABOVE_THRESHOLD";
    }
    return "?";
}

Event Event::plug_inserted(int socket_id, double angle_deg) {
    Event e;
    e.kind = Kind::PlugInserted;
    e.socket_id = socket_id;
    e.insertion_angle_deg = angle_deg;
    return e;
}

Event Event::vehicle_command(VehicleState v) {
    Event e;
    e.kind = Kind::VehicleCommand;
    e.vehicle = v;
    return e;
}

Event Event::motion_step(const Vec2& direction, double displacement_mm, bool drive) {
    Event e;
    e.kind = Kind::MotionStep;
    e.direction = direction;
    e.displacement_mm = displacement_mm;
    e.drive_motion = drive;
    return e;
}

Event Event::tick() {
    return Event{};
}

Event Event::fault_event(FaultKind kind, SimTime dropout_ms) {
    Event e;
    e.kind = Kind::Fault;
    e.fault = kind;
    e.dropout_ms = dropout_ms;
    return e;
}

Event Event::internal(Kind kind) {
    Event e;
    e.kind = kind;
    return e;
}

std::optional<ControllerEvent> to_controller_event(Event::Kind k) {
    switch (k) {
    case Event::Kind::PlugInserted: return ControllerEvent::PlugInserted;
    case Event::Kind::EngagedConfirmed: return ControllerEvent::EngagedConfirmed;
    case Event::Kind::DisengagedConfirmed: return ControllerEvent::DisengagedConfirmed;
    case Event::Kind::VehicleBecameStart: return ControllerEvent::VehicleBecameStart;
    case Event::Kind::DamageReported: return ControllerEvent::DamageReported;
    case Event::Kind::AllCellsBypassed: return ControllerEvent::AllCellsBypassed;
    case Event::Kind::CurrentBelowThreshold: return ControllerEvent::CurrentBelowThreshold;
    case Event::Kind::TensionAboveThreshold: return ControllerEvent::TensionAboveThreshold;
    default: return std::nullopt;
    }
}

World::World(WorldConfig config)
    : config_(std::move(config)),
      pack_(config_.pack),
      detector_(config_.params.n_debounce, config_.params.speed_epsilon_mps) {
    if (config_.params.tick_interval_ms <= 0) {
        throw DomainError("tick interval must be positive");
    }
    if (config_.params.charge_current_a < 0.0) {
        throw DomainError("charge current must be >= 0");
    }
    if (norm(config_.params.drive_direction) == 0.0) {
        throw DomainError("drive direction must be nonzero");
    }
    if (!is_unit(config_.params.drive_direction)) {
        config_.params.drive_direction = normalized(config_.params.drive_direction);
    }
    for (const SocketSpec& s : config_.sockets) {
        s.validate();
    }
    pack_.validate();
    pack_.current_a = 0.0; // current flows only inside a session
    schedule(Event::tick(), config_.params.tick_interval_ms);
}

void World::schedule(const Event& event, SimTime at) {
    if (at < now_) {
        throw PastTimeError("schedule at t=" + std::to_string(at) + " before now=" +
                            std::to_string(now_));
    }
    if (event.kind == Event::Kind::MotionStep && !is_unit(event.direction)) {
        throw DomainError("motion direction must be unit length");
    }
    if (event.kind == Event::Kind::PlugInserted && socket_by_id(event.socket_id) == nullptr) {
        throw DomainError("plug references undeclared socket " + std::to_string(event.socket_id));
    }
    if (event.kind == Event::Kind::Fault && event.fault == FaultKind::SensorDropout &&
        event.dropout_ms <= 0) {
        throw DomainError("sensor dropout duration must be positive");
    }
    queue_.push(Scheduled{at, schedule_order_++, event});
    ++events_scheduled_;
}

void World::inject_fault(FaultKind kind, SimTime at, SimTime dropout_ms) {
    schedule(Event::fault_event(kind, dropout_ms), at);
}

std::size_t World::step() {
    if (queue_.empty()) {
        throw InvalidPhaseError("step on an empty event queue");
    }
    const std::size_t before = trace_.size();
    Scheduled next = queue_.top();
    queue_.pop();
    now_ = next.t;
    ++events_processed_;
    dispatch(next.event);
    return trace_.size() - before;
}

void World::run_until(SimTime t_end) {
    if (t_end < now_) {
        throw PastTimeError("run_until into the past");
    }
    while (!queue_.empty() && queue_.top().t <= t_end) {
        step();
    }
}

bool World::detection_wired() const {
    return config_.policy.kind() == SafetyPolicy::Kind::Electromagnet;
}

bool World::release_actuated() const {
    return config_.policy.kind() == SafetyPolicy::Kind::Electromagnet;
}

VehicleState World::believed_vehicle() const {
    return detection_wired() ? belief_ : VehicleState::Static;
}

bool World::live() const {
    return !phase_.terminal();
}

void World::set_coupler(const CouplerState& state) {
    coupler_ = state;
    coupler_changed_t_ = now_;
}

const SocketSpec* World::socket_by_id(int id) const {
    for (const SocketSpec& s : config_.sockets) {
        if (s.id == id) {
            return &s;
        }
    }
    return nullptr;
}

TraceRecord& World::append(const std::string& kind) {
    TraceRecord rec;
    rec.t = now_;
    rec.seq = record_seq_++;
    rec.kind = kind;
    trace_.push_back(std::move(rec));
    return trace_.back();
}

void World::attr(TraceRecord& rec, const std::string& key, const std::string& value) {
    rec.attrs.emplace_back(key, value);
}

void World::dispatch(const Event& event) {
    switch (event.kind) {
    case Event::Kind::Tick:
        handle_tick();
        return;
    case Event::Kind::PlugInserted:
        handle_plug(event);
        return;
    case Event::Kind::VehicleCommand: {
        TraceRecord& rec = append("VEHICLE_COMMAND");
        attr(rec, "state", to_string(event.vehicle));
        true_vehicle_ = event.vehicle;
        return;
    }
    case Event::Kind::MotionStep:
        handle_motion(event);
        return;
    case Event::Kind::Fault:
        handle_fault(event);
        return;
    default:
        break;
    }
    // Internal sensor/monitor events route straight to the controller.
    TraceRecord& rec = append(to_string(event.kind));
    if (event.kind == Event::Kind::CurrentBelowThreshold && session_active_) {
        const double pack_v = active_pack_voltage(pack_.current_a);
        const HallReading reading =
            hall_evaluate(pack_v + config_.params.hall_supply_offset_v, pack_v,
                          config_.params.hall_r0_ohm, config_.params.hall_k_per_newton,
                          tension_n_, config_.policy);
        attr(rec, "current_a", format_fixed(reading.current_a));
    }
    if (event.kind == Event::Kind::TensionAboveThreshold) {
        attr(rec, "tension_n", format_fixed(tension_n_));
    }
    if (const auto controller_event = to_controller_event(event.kind)) {
        route_to_controller(*controller_event);
    }
}

void World::handle_tick() {
    append("TICK");

    // Coupler edge sensing: a phase change is confirmed on the tick following
    // it, never on a tick sharing its timestamp.
    if (coupler_.phase() != last_sensed_ && coupler_changed_t_ < now_) {
        if (coupler_.phase() == CouplerPhase::Engaged) {
            schedule(Event::internal(Event::Kind::EngagedConfirmed), now_);
        } else if (coupler_.phase() == CouplerPhase::Disengaged) {
            schedule(Event::internal(Event::Kind::DisengagedConfirmed), now_);
        }
        last_sensed_ = coupler_.phase();
    }

    // Vehicle-state detection (only the electromagnet system has a detecting part).
    if (detection_wired()) {
        if (now_ < dropout_until_) {
            append("SAMPLE_SUPPRESSED");
        } else {
            DetectionSample sample;
            sample.t_ms = now_;
            sample.ignition_on = true_vehicle_ == VehicleState::Start;
            sample.wheel_speed_mps =
                true_vehicle_ == VehicleState::Start ? config_.params.drive_speed_mps : 0.0;
            const VehicleState previous = belief_;
            belief_ = detector_.update(sample);
            if (belief_ != previous) {
                TraceRecord& rec = append("VEHICLE_DETECTED");
                attr(rec, "state", to_string(belief_));
                if (belief_ == VehicleState::Start) {
                    schedule(Event::internal(Event::Kind::VehicleBecameStart), now_);
                }
            }
        }
    }

    // Release rotation.
    if (coupler_.phase() == CouplerPhase::Detaching) {
        set_coupler(step_detach(coupler_, config_.params.omega_deg_per_ms,
                                static_cast<double>(config_.params.tick_interval_ms)));
        if (coupler_.phase() == CouplerPhase::Disengaged) {
            TraceRecord& rec = append("COUPLER");
            attr(rec, "phase", "disengaged");
            attr(rec, "reason", "detach_complete");
        }
    }

    battery_tick();

    // Drive motion: a started vehicle drags the cable once per tick while it
    // is still attached.
    if (true_vehicle_ == VehicleState::Start &&
        (coupler_.phase() == CouplerPhase::Engaged ||
         coupler_.phase() == CouplerPhase::Detaching)) {
        const double displacement_mm =
            config_.params.drive_speed_mps * static_cast<double>(config_.params.tick_interval_ms);
        schedule(Event::motion_step(config_.params.drive_direction, displacement_mm, true), now_);
    }

    if (live()) {
        schedule(Event::tick(), now_ + config_.params.tick_interval_ms);
    }
}

void World::handle_plug(const Event& event) {
    const SocketSpec* socket = socket_by_id(event.socket_id);
    TraceRecord& rec = append("PLUG_INSERTED");
    attr(rec, "socket", std::to_string(event.socket_id));
    attr(rec, "angle", format_fixed(event.insertion_angle_deg));
    if (coupler_.phase() != CouplerPhase::Disengaged) {
        // One cable; it stays where it is until released.
        attr(rec, "result", "cable_busy");
        return;
    }
    plug_socket_ = *socket;
    plug_ = PlugGeometry{config_.params.plug_polarity, config_.params.plug_gap_mm,
                         event.insertion_angle_deg};
    plug_present_ = true;
    route_to_controller(ControllerEvent::PlugInserted);
}

void World::handle_motion(const Event& event) {
    TraceRecord& rec = append("MOTION_STEP");
    attr(rec, "dir", format_fixed(event.direction.x) + "," + format_fixed(event.direction.y));
    attr(rec, "dist_mm", format_fixed(event.displacement_mm));
    attr(rec, "drive", event.drive_motion ? "1" : "0");

    if (event.drive_motion && config_.interlock_enabled &&
        interlock_check(interlock_, coupler_.phase(), true) == DriveDecision::Deny) {
        attr(rec, "outcome", "denied");
        return;
    }
    if (!plug_socket_) {
        attr(rec, "outcome", "no_effect");
        return;
    }
    const MotionOutcome outcome = motion_outcome(*plug_socket_, event.direction,
                                                 event.displacement_mm, coupler_, tension_n_,
                                                 config_.params.motion);
    attr(rec, "outcome", to_string(outcome.kind));
    if (outcome.kind == MotionOutcomeKind::SafeRelease ||
        outcome.kind == MotionOutcomeKind::Damage) {
        set_coupler(apply_motion_outcome(coupler_, outcome));
    }
    switch (outcome.kind) {
    case MotionOutcomeKind::TensionRise: {
        tension_n_ += outcome.tension_delta_n;
        TraceRecord& rise = append("TENSION_RISE");
        attr(rise, "delta_n", format_fixed(outcome.tension_delta_n));
        attr(rise, "tension_n", format_fixed(tension_n_));
        check_tension_monitors();
        break;
    }
    case MotionOutcomeKind::SafeRelease: {
        TraceRecord& rel = append("SAFE_RELEASE");
        attr(rel, "socket", std::to_string(plug_socket_->id));
        break;
    }
    case MotionOutcomeKind::Damage: {
        TraceRecord& dmg = append("DAMAGE");
        attr(dmg, "socket", std::to_string(plug_socket_->id));
        attr(dmg, "tension_n", format_fixed(tension_n_));
        schedule(Event::internal(Event::Kind::DamageReported), now_);
        break;
    }
    case MotionOutcomeKind::NoEffect:
        break;
    }
}

void World::handle_fault(const Event& event) {
    TraceRecord& rec = append("FAULT");
    attr(rec, "kind", to_string(event.fault));
    switch (event.fault) {
    case FaultKind::DriveOffWhileCharging:
        schedule(Event::vehicle_command(VehicleState::Start), now_);
        break;
    case FaultKind::StuckElectromagnet:
        release_stuck_ = true;
        break;
    case FaultKind::SensorDropout:
        attr(rec, "ms", std::to_string(event.dropout_ms));
        dropout_until_ = std::max(dropout_until_, now_ + event.dropout_ms);
        break;
    }
}

void World::route_to_controller(ControllerEvent event) {
    const TransitionResult result = on_event(phase_, believed_vehicle(), config_.policy, event);
    const bool changed = !(result.phase == phase_);
    if (changed) {
        TraceRecord& rec = append("PHASE");
        attr(rec, "from", phase_.name());
        attr(rec, "to", result.phase.name());
        phase_ = result.phase;
    }
    for (const Command& command : result.commands) {
        execute(command);
    }
    if (changed) {
        on_phase_entered();
    }
}

void World::execute(const Command& command) {
    TraceRecord& rec = append(to_string(command.kind));
    switch (command.kind) {
    case Command::Kind::SetPolarity:
        attr(rec, "mode", to_string(command.mode));
        apply_set_polarity(command.mode, rec);
        break;
    case Command::Kind::BeginSession:
        session_active_ = true;
        session_energy_wh_ = 0.0;
        cutoff_fired_ = false;
        alarm_fired_ = false;
        hall_fired_ = false;
        pack_.current_a = config_.params.charge_current_a;
        attr(rec, "current_a", format_fixed(pack_.current_a));
        break;
    case Command::Kind::EndSession:
        attr(rec, "energy_wh", format_fixed(session_active_ ? session_energy_wh_ : 0.0));
        session_active_ = false;
        pack_.current_a = 0.0;
        break;
    case Command::Kind::TriggerCutoff:
        for (CellState& cell : pack_.cells) {
            cell.bypassed = true;
        }
        break;
    case Command::Kind::RaiseAlarm:
        attr(rec, "tension_n", format_fixed(tension_n_));
        break;
    case Command::Kind::EmitUi:
        attr(rec, "text", command.text);
        break;
    case Command::Kind::DenyDrive:
        interlock_.locked = true;
        break;
    case Command::Kind::AllowDrive:
        interlock_.locked = false;
        break;
    }
}

void World::apply_set_polarity(PolarityMode mode, TraceRecord& rec) {
    if (mode == PolarityMode::Attract) {
        if (!plug_present_) {
            attr(rec, "result", "no_plug");
            return;
        }
        if (coupler_.phase() != CouplerPhase::Disengaged) {
            attr(rec, "result", "not_disengaged");
            return;
        }
        const Polarity socket_pole =
            config_.params.socket_pole_override.value_or(complement(plug_.polarity));
        const EngageResult engage = try_engage(coupler_, *plug_socket_, plug_, socket_pole);
        if (engage.engaged()) {
            set_coupler(engage.state);
            attr(rec, "result", "engaged");
            TraceRecord& cpl = append("COUPLER");
            attr(cpl, "phase", "engaged");
            attr(cpl, "socket", std::to_string(plug_socket_->id));
        } else {
            attr(rec, "result", "rejected");
            attr(rec, "reason", to_string(*engage.rejection));
        }
        return;
    }
    // Release path: only the electromagnet system can eject the cable.
    if (!release_actuated()) {
        attr(rec, "result", "not_actuated");
        return;
    }
    if (release_stuck_) {
        attr(rec, "result", "stuck");
        return;
    }
    if (coupler_.phase() == CouplerPhase::Engaged) {
        set_coupler(CouplerState::detaching(0.0));
        attr(rec, "result", "detaching");
        TraceRecord& cpl = append("COUPLER");
        attr(cpl, "phase", "detaching");
    } else {
        attr(rec, "result", "no_op");
    }
}

void World::on_phase_entered() {
    // The detecting part stores the vehicle state; deliver it when a phase
    // that reacts to it is entered, so edges seen in other phases are not lost.
    if (phase_.kind() == ControllerPhaseKind::Charging && detection_wired() &&
        belief_ == VehicleState::Start) {
        schedule(Event::internal(Event::Kind::VehicleBecameStart), now_);
    }
    if (phase_.kind() == ControllerPhaseKind::Detaching &&
        coupler_.phase() == CouplerPhase::Disengaged) {
        schedule(Event::internal(Event::Kind::DisengagedConfirmed), now_);
    }
}

void World::check_tension_monitors() {
    if (!session_active_) {
        return;
    }
    if (config_.policy.kind() == SafetyPolicy::Kind::HallResistance && !hall_fired_) {
        const double pack_v = active_pack_voltage(pack_.current_a);
        const HallReading reading =
            hall_evaluate(pack_v + config_.params.hall_supply_offset_v, pack_v,
                          config_.params.hall_r0_ohm, config_.params.hall_k_per_newton,
                          tension_n_, config_.policy);
        if (reading.below_threshold) {
            hall_fired_ = true;
            schedule(Event::internal(Event::Kind::CurrentBelowThreshold), now_);
        }
    }
    if (config_.policy.kind() == SafetyPolicy::Kind::AlarmOnly && !alarm_fired_) {
        if (alarm_evaluate(tension_n_, config_.policy).has_value()) {
            alarm_fired_ = true;
            schedule(Event::internal(Event::Kind::TensionAboveThreshold), now_);
        }
    }
}

double World::active_pack_voltage(double current_a) const {
    double v = 0.0;
    for (const CellState& cell : pack_.cells) {
        if (!cell.bypassed) {
            v += terminal_voltage(cell, pack_.params, current_a);
        }
    }
    return v;
}

void World::battery_tick() {
    if (!session_active_) {
        return;
    }
    const int phase_index = static_cast<int>(
        std::count_if(pack_.cells.begin(), pack_.cells.end(),
                      [](const CellState& c) { return c.bypassed; }));
    pack_ = step_charge(pack_, static_cast<double>(config_.params.tick_interval_ms));
    const ChargeStepRecord record = make_charge_record(
        pack_, now_, static_cast<double>(config_.params.tick_interval_ms), phase_index);
    session_energy_wh_ += record.pack_voltage * record.current_a * record.dt_ms / kMsPerHour;
    charge_records_.push_back(record);
    if (!cutoff_fired_ && all_bypassed(pack_)) {
        cutoff_fired_ = true;
        schedule(Event::internal(Event::Kind::AllCellsBypassed), now_);
    }
}

} // namespace evmag
