#pragma once

// =============================================================================
// Discrete-event engine. Wires coupler, battery and controller together under
// one event queue ordered by (time, insertion sequence). Ticks poll the
// sensors (coupler edges, vehicle detection, pack cut-off), advance the
// physics (detach rotation, battery charge, drive motion) and reschedule
// themselves while the controller has not reached a terminal phase. The
// engine is RNG-free: identical inputs give byte-identical traces.
// =============================================================================

#include "evmag/battery.hpp"
#include "evmag/controller.hpp"
#include "evmag/coupler.hpp"
#include "evmag/errors.hpp"
#include "evmag/trace.hpp"
#include "evmag/vec2.hpp"

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace evmag {

// ---------------------------------------------------------------------------
// Faults and events
// ---------------------------------------------------------------------------

enum class FaultKind { DriveOffWhileCharging, StuckElectromagnet, SensorDropout };

const char* to_string(FaultKind k);

/// Everything the queue can carry: scenario-driven events, the self-scheduling
/// Tick, fault injections, and the internal sensor/monitor events routed to
/// the controller.
struct Event {
    enum class Kind {
        PlugInserted,
        VehicleCommand,
        MotionStep,
        Tick,
        Fault,
        EngagedConfirmed,
        DisengagedConfirmed,
        VehicleBecameStart,
        DamageReported,
        AllCellsBypassed,
        CurrentBelowThreshold,
        TensionAboveThreshold,
    };

    Kind kind = Kind::Tick;
    int socket_id = 0;                            // PlugInserted
    double insertion_angle_deg = 0.0;             // PlugInserted
    VehicleState vehicle = VehicleState::Static;  // VehicleCommand
    Vec2 direction{1.0, 0.0};                     // MotionStep, unit length
    double displacement_mm = 0.0;                 // MotionStep
    bool drive_motion = false;                    // MotionStep generated by the drive model
    FaultKind fault = FaultKind::DriveOffWhileCharging;
    SimTime dropout_ms = 0;                       // SensorDropout duration

    static Event plug_inserted(int socket_id, double angle_deg = 0.0);
    static Event vehicle_command(VehicleState v);
    static Event motion_step(const Vec2& direction, double displacement_mm, bool drive = false);
    static Event tick();
    static Event fault_event(FaultKind kind, SimTime dropout_ms = 0);
    static Event internal(Kind kind);
};

const char* to_string(Event::Kind k);

/// Maps the engine's internal event kinds onto controller events.
std::optional<ControllerEvent> to_controller_event(Event::Kind k);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct EngineParams {
    SimTime tick_interval_ms = 10;
    double omega_deg_per_ms = kDefaultOmegaDegPerMs;
    MotionParams motion;
    double charge_current_a = 10.0;
    double drive_speed_mps = 1.0;     // wheel speed while the vehicle is in Start
    Vec2 drive_direction{1.0, 0.0};   // direction of drive motion (unit)
    int n_debounce = kDefaultDebounceSamples;
    double speed_epsilon_mps = kDefaultSpeedEpsilonMps;
    double hall_r0_ohm = 0.01;
    double hall_k_per_newton = 50.0;
    double hall_supply_offset_v = 5.0; // supply voltage rides this far above the pack
    Polarity plug_polarity = Polarity::North;
    double plug_gap_mm = 0.0;
    std::optional<Polarity> socket_pole_override; // force the pile-side pole (test hook)

    friend bool operator==(const EngineParams&, const EngineParams&) = default;
};

struct WorldConfig {
    PackState pack = PackState::make(CellParams{}, {0.2, 0.2, 0.2, 0.2}, 0.0);
    std::vector<SocketSpec> sockets;
    SafetyPolicy policy = SafetyPolicy::electromagnet();
    bool interlock_enabled = true;
    EngineParams params;
};

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

class World {
public:
    explicit World(WorldConfig config);

    /// Enqueues an event. Ties at equal time dequeue in insertion order.
    /// Throws PastTimeError for `at` before the current time and DomainError
    /// for a non-unit MotionStep direction.
    void schedule(const Event& event, SimTime at);

    /// Schedules a fault injection. Throws PastTimeError for past times.
    void inject_fault(FaultKind kind, SimTime at, SimTime dropout_ms = 0);

    /// Processes the earliest event; returns the number of trace records it
    /// appended. Throws InvalidPhaseError on an empty queue.
    std::size_t step();

    /// Steps until the queue is empty or the next event lies beyond t_end.
    void run_until(SimTime t_end);

    bool queue_empty() const { return queue_.empty(); }
    SimTime now() const { return now_; }

    const std::vector<TraceRecord>& trace() const { return trace_; }
    const ControllerPhase& controller_phase() const { return phase_; }
    const CouplerState& coupler() const { return coupler_; }
    double tension_n() const { return tension_n_; }
    const PackState& pack() const { return pack_; }
    const std::vector<ChargeStepRecord>& charge_records() const { return charge_records_; }
    const WorldConfig& config() const { return config_; }

    /// Queue-conservation counters: every scheduled event is processed exactly once.
    std::uint64_t events_scheduled() const { return events_scheduled_; }
    std::uint64_t events_processed() const { return events_processed_; }

private:
    struct Scheduled {
        SimTime t;
        std::uint64_t order;
        Event event;
    };
    struct Later {
        bool operator()(const Scheduled& a, const Scheduled& b) const {
            return a.t != b.t ? a.t > b.t : a.order > b.order;
        }
    };

    void set_coupler(const CouplerState& state);
    bool detection_wired() const;
    bool release_actuated() const;
    VehicleState believed_vehicle() const;
    bool live() const;

    const SocketSpec* socket_by_id(int id) const;

    TraceRecord& append(const std::string& kind);
    void attr(TraceRecord& rec, const std::string& key, const std::string& value);

    void dispatch(const Event& event);
    void handle_tick();
    void handle_plug(const Event& event);
    void handle_motion(const Event& event);
    void handle_fault(const Event& event);
    void route_to_controller(ControllerEvent event);
    void execute(const Command& command);
    void apply_set_polarity(PolarityMode mode, TraceRecord& rec);
    void on_phase_entered();
    void check_tension_monitors();
    double active_pack_voltage(double current_a) const;
    void battery_tick();

    WorldConfig config_;
    std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
    std::uint64_t schedule_order_ = 0;
    std::uint64_t record_seq_ = 0;
    std::uint64_t events_scheduled_ = 0;
    std::uint64_t events_processed_ = 0;
    SimTime now_ = 0;

    std::vector<TraceRecord> trace_;
    std::vector<ChargeStepRecord> charge_records_;

    ControllerPhase phase_ = ControllerPhase::idle();
    CouplerState coupler_ = CouplerState::disengaged();
    SimTime coupler_changed_t_ = -1;
    CouplerPhase last_sensed_ = CouplerPhase::Disengaged;
    double tension_n_ = 0.0;
    PackState pack_;
    InterlockState interlock_;

    VehicleState true_vehicle_ = VehicleState::Static;
    VehicleStateDetector detector_;
    VehicleState belief_ = VehicleState::Static;

    std::optional<SocketSpec> plug_socket_;
    PlugGeometry plug_;
    bool plug_present_ = false;

    bool session_active_ = false;
    double session_energy_wh_ = 0.0;
    bool cutoff_fired_ = false;
    bool alarm_fired_ = false;
    bool hall_fired_ = false;
    bool release_stuck_ = false;
    SimTime dropout_until_ = 0;
};

} // namespace evmag
