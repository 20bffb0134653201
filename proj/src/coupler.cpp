#include "evmag/coupler.hpp"

#include <cmath>

namespace evmag {

const char* to_string(Polarity p) {
    return p == Polarity::North ? "north" : "south";
}

const char* to_string(ForceSign f) {
    return f == ForceSign::Attract ? "attract" : "repel";
}

const char* to_string(SocketLocation loc) {
    switch (loc) {
    case SocketLocation::Front: return "front";
    case SocketLocation::DriverSide: return "driver";
    case SocketLocation::RearSide: return "rear";
    }
    return "?";
}

const char* to_string(CouplerPhase p) {
    switch (p) {
    case CouplerPhase::Disengaged: return "disengaged";
    case CouplerPhase::Engaged: return "engaged";
    case CouplerPhase::Detaching: return "detaching";
    case CouplerPhase::Damaged: return "damaged";
    }
    return "?";
}

const char* to_string(EngageReject r) {
    switch (r) {
    case EngageReject::RepelForce: return "repel_force";
    case EngageReject::GapTooLarge: return "gap_too_large";
    case EngageReject::AngleOutOfRange: return "angle_out_of_range";
    }
    return "?";
}

const char* to_string(MotionOutcomeKind k) {
    switch (k) {
    case MotionOutcomeKind::NoEffect: return "no_effect";
    case MotionOutcomeKind::SafeRelease: return "safe_release";
    case MotionOutcomeKind::TensionRise: return "tension_rise";
    case MotionOutcomeKind::Damage: return "damage";
    }
    return "?";
}

Vec2 default_escape_direction(SocketLocation loc) {
    return loc == SocketLocation::DriverSide ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
}

void SocketSpec::validate() const {
    if (!is_unit(escape_direction)) {
        throw DomainError("socket " + std::to_string(id) + ": escape direction is not unit length");
    }
    if (!(aperture_half_angle_deg > 0.0) || aperture_half_angle_deg > 90.0) {
        throw DomainError("socket " + std::to_string(id) + ": aperture half-angle must be in (0, 90]");
    }
    if (!(r_max_mm > 0.0)) {
        throw DomainError("socket " + std::to_string(id) + ": r_max must be positive");
    }
}

SocketSpec SocketSpec::with_defaults(int id, SocketLocation location) {
    SocketSpec s;
    s.id = id;
    s.location = location;
    s.escape_direction = default_escape_direction(location);
    return s;
}

CouplerState CouplerState::detaching(double theta_deg) {
    if (theta_deg < 0.0 || theta_deg >= kDetachCompleteDeg) {
        throw DomainError("detach angle must be in [0, 90)");
    }
    return CouplerState{CouplerPhase::Detaching, theta_deg};
}

double CouplerState::detach_angle_deg() const {
    if (phase_ != CouplerPhase::Detaching) {
        throw InvalidPhaseError("detach angle queried outside Detaching");
    }
    return theta_deg_;
}

EngageResult try_engage(const CouplerState& current, const SocketSpec& socket,
                        const PlugGeometry& plug, Polarity socket_pole) {
    if (current.phase() != CouplerPhase::Disengaged) {
        throw InvalidPhaseError(std::string("try_engage from phase ") + to_string(current.phase()));
    }
    socket.validate();
    if (plug.gap_mm < 0.0) {
        throw DomainError("plug gap must be >= 0");
    }
    if (force_sign(socket_pole, plug.polarity) != ForceSign::Attract) {
        return {CouplerState::disengaged(), EngageReject::RepelForce};
    }
    if (plug.gap_mm > socket.r_max_mm) {
        return {CouplerState::disengaged(), EngageReject::GapTooLarge};
    }
    if (std::abs(plug.insertion_angle_deg) > socket.aperture_half_angle_deg) {
        return {CouplerState::disengaged(), EngageReject::AngleOutOfRange};
    }
    return {CouplerState::engaged(), std::nullopt};
}

CouplerState step_detach(const CouplerState& state, double omega_deg_per_ms, double dt_ms) {
    if (state.phase() != CouplerPhase::Detaching) {
        throw InvalidPhaseError(std::string("step_detach from phase ") + to_string(state.phase()));
    }
    if (!(omega_deg_per_ms > 0.0)) {
        throw DomainError("detach rate must be positive");
    }
    if (!(dt_ms > 0.0)) {
        throw DomainError("detach step must be positive");
    }
    const double theta = state.detach_angle_deg() + omega_deg_per_ms * dt_ms;
    if (theta >= kDetachCompleteDeg) {
        return CouplerState::disengaged();
    }
    return CouplerState::detaching(theta);
}

MotionOutcome motion_outcome(const SocketSpec& socket, const Vec2& motion, double displacement_mm,
                             const CouplerState& coupler, double tension_n, const MotionParams& params) {
    if (!is_unit(motion)) {
        throw DomainError("motion direction must be unit length");
    }
    if (displacement_mm < 0.0) {
        throw DomainError("displacement must be >= 0");
    }
    if (coupler.phase() != CouplerPhase::Engaged) {
        return MotionOutcome::no_effect();
    }
    const double d = dot(motion, socket.escape_direction);
    if (d >= params.align_threshold) {
        return MotionOutcome::safe_release();
    }
    if (d < 0.0) {
        const double delta = params.k_tension_n_per_mm * std::abs(d) * displacement_mm;
        if (delta > 0.0 && tension_n + delta > params.t_damage_n) {
            return MotionOutcome::damage();
        }
        if (delta > 0.0) {
            return MotionOutcome::tension_rise(delta);
        }
    }
    return MotionOutcome::no_effect();
}

CouplerState apply_motion_outcome(const CouplerState& coupler, const MotionOutcome& outcome) {
    if (coupler.phase() == CouplerPhase::Damaged) {
        return coupler;
    }
    switch (outcome.kind) {
    case MotionOutcomeKind::SafeRelease: return CouplerState::disengaged();
    case MotionOutcomeKind::Damage: return CouplerState::damaged();
    case MotionOutcomeKind::NoEffect:
    case MotionOutcomeKind::TensionRise: return coupler;
    }
    return coupler;
}

double contact_resistance(double tension_n, double r0_ohm, double k_per_newton) {
    if (!(r0_ohm > 0.0)) {
        throw DomainError("base resistance must be positive");
    }
    if (k_per_newton < 0.0) {
        throw DomainError("resistance slope must be >= 0");
    }
    return r0_ohm * (1.0 + k_per_newton * std::max(0.0, tension_n));
}

} // namespace evmag
