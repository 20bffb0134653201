#pragma once

// =============================================================================
// Coupler model: the magnetic plug-in-socket connection between the charging
// cable and the vehicle. Polarity decides force, geometry decides whether an
// attracted plug seats, detachment is a rotation to the release position, and
// vehicle motion while engaged either slips the cable free along the socket's
// escape direction or loads it with tension until something breaks.
// =============================================================================

#include "evmag/errors.hpp"
#include "evmag/vec2.hpp"

#include <optional>
#include <string>

namespace evmag {

// ---------------------------------------------------------------------------
// Polarity and force
// ---------------------------------------------------------------------------

enum class Polarity { North, South };

constexpr Polarity complement(Polarity p) {
    return p == Polarity::North ? Polarity::South : Polarity::North;
}

enum class ForceSign { Attract, Repel };

/// Like poles repel, unlike poles attract. Symmetric in its arguments.
constexpr ForceSign force_sign(Polarity socket_pole, Polarity plug_pole) {
    return socket_pole == plug_pole ? ForceSign::Repel : ForceSign::Attract;
}

const char* to_string(Polarity p);
const char* to_string(ForceSign f);

// ---------------------------------------------------------------------------
// Socket and plug geometry
// ---------------------------------------------------------------------------

enum class SocketLocation { Front, DriverSide, RearSide };

const char* to_string(SocketLocation loc);

/// One charging socket on the vehicle body. `escape_direction` is the vehicle
/// motion direction along which an engaged cable slips out without damage;
/// front and rear sockets default to +x (vehicle forward), driver-side sockets
/// to +y (lateral).
struct SocketSpec {
    int id = 0;
    SocketLocation location = SocketLocation::Front;
    Vec2 escape_direction{1.0, 0.0};
    double aperture_half_angle_deg = 45.0; // in (0, 90]
    double r_max_mm = 10.0;                // maximum protected radius, > 0

    /// Validates invariants (unit escape vector, aperture range, positive r_max).
    /// Throws DomainError on violation.
    void validate() const;

    /// Socket with the per-location default escape direction.
    static SocketSpec with_defaults(int id, SocketLocation location);

    friend bool operator==(const SocketSpec&, const SocketSpec&) = default;
};

Vec2 default_escape_direction(SocketLocation loc);

/// Cable-end geometry at insertion time.
struct PlugGeometry {
    Polarity polarity = Polarity::North; // pole of the plug's magnetic medium
    double gap_mm = 0.0;                 // radial gap to the socket seat, >= 0
    double insertion_angle_deg = 0.0;    // signed, 0 = nominal axis

    friend bool operator==(const PlugGeometry&, const PlugGeometry&) = default;
};

// ---------------------------------------------------------------------------
// Coupler lifecycle
// ---------------------------------------------------------------------------

enum class CouplerPhase { Disengaged, Engaged, Detaching, Damaged };

const char* to_string(CouplerPhase p);

/// Attach/detach lifecycle of the plug-in-socket connection. The rotation
/// angle is only meaningful while Detaching; Damaged is terminal.
class CouplerState {
public:
    CouplerState() = default;

    static CouplerState disengaged() { return CouplerState{CouplerPhase::Disengaged, 0.0}; }
    static CouplerState engaged() { return CouplerState{CouplerPhase::Engaged, 0.0}; }
    static CouplerState detaching(double theta_deg);
    static CouplerState damaged() { return CouplerState{CouplerPhase::Damaged, 0.0}; }

    CouplerPhase phase() const { return phase_; }

    /// Rotation angle in degrees, [0, 90). Throws InvalidPhaseError unless Detaching.
    double detach_angle_deg() const;

    friend bool operator==(const CouplerState&, const CouplerState&) = default;

private:
    CouplerState(CouplerPhase phase, double theta) : phase_(phase), theta_deg_(theta) {}

    CouplerPhase phase_ = CouplerPhase::Disengaged;
    double theta_deg_ = 0.0;
};

// ---------------------------------------------------------------------------
// Engagement
// ---------------------------------------------------------------------------

enum class EngageReject { RepelForce, GapTooLarge, AngleOutOfRange };

const char* to_string(EngageReject r);

struct EngageResult {
    CouplerState state;
    std::optional<EngageReject> rejection; // set iff the state stayed Disengaged

    bool engaged() const { return state.phase() == CouplerPhase::Engaged; }
};

/// Attempts to seat the plug. Engages iff the pole pair attracts, the gap is
/// within the socket's protected radius and the insertion angle is inside the
/// aperture; otherwise stays Disengaged and reports the first violated
/// constraint (force, then gap, then angle).
/// Throws InvalidPhaseError unless `current` is Disengaged.
EngageResult try_engage(const CouplerState& current, const SocketSpec& socket,
                        const PlugGeometry& plug, Polarity socket_pole);

// ---------------------------------------------------------------------------
// Detachment kinematics
// ---------------------------------------------------------------------------

/// The release rotation completes at this angle (repulsive-force parallel position).
inline constexpr double kDetachCompleteDeg = 90.0;

/// Default rotation rate: full detach in 1000 ms.
inline constexpr double kDefaultOmegaDegPerMs = 0.09;

/// Advances the counterclockwise release rotation by omega*dt degrees; crossing
/// 90 degrees completes the detach and yields Disengaged.
/// Throws InvalidPhaseError for non-Detaching input, DomainError for
/// non-positive omega or dt.
CouplerState step_detach(const CouplerState& state, double omega_deg_per_ms, double dt_ms);

// ---------------------------------------------------------------------------
// Vehicle motion against an engaged cable
// ---------------------------------------------------------------------------

struct MotionParams {
    double align_threshold = 0.5;     // min cos(angle to escape dir) for a free slip
    double k_tension_n_per_mm = 0.5;  // tension gained per mm of adverse travel
    double t_damage_n = 100.0;        // tension above which the hardware breaks

    friend bool operator==(const MotionParams&, const MotionParams&) = default;
};

enum class MotionOutcomeKind { NoEffect, SafeRelease, TensionRise, Damage };

const char* to_string(MotionOutcomeKind k);

struct MotionOutcome {
    MotionOutcomeKind kind = MotionOutcomeKind::NoEffect;
    double tension_delta_n = 0.0; // > 0 iff kind == TensionRise

    static MotionOutcome no_effect() { return {MotionOutcomeKind::NoEffect, 0.0}; }
    static MotionOutcome safe_release() { return {MotionOutcomeKind::SafeRelease, 0.0}; }
    static MotionOutcome tension_rise(double delta_n) { return {MotionOutcomeKind::TensionRise, delta_n}; }
    static MotionOutcome damage() { return {MotionOutcomeKind::Damage, 0.0}; }
};

/// Outcome of moving the vehicle `displacement_mm` along unit vector `motion`
/// with the given coupler state and accumulated cable tension. Only an Engaged
/// coupler reacts: motion aligned with the socket's escape direction slips the
/// cable free, motion against it loads the cable, and a load pushing the total
/// tension past t_damage breaks the connection.
MotionOutcome motion_outcome(const SocketSpec& socket, const Vec2& motion, double displacement_mm,
                             const CouplerState& coupler, double tension_n, const MotionParams& params);

/// The coupler transition implied by a motion outcome. Damaged is absorbing.
CouplerState apply_motion_outcome(const CouplerState& coupler, const MotionOutcome& outcome);

// ---------------------------------------------------------------------------
// Contact resistance under tension
// ---------------------------------------------------------------------------

/// R = r0 * (1 + k * max(0, tension)). Slack cable reads the base resistance.
/// Throws DomainError for r0 <= 0 or k < 0.
double contact_resistance(double tension_n, double r0_ohm, double k_per_newton);

} // namespace evmag
