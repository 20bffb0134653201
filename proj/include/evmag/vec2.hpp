#pragma once

#include <cmath>

namespace evmag {

/// Planar direction/offset in vehicle coordinates: +x = vehicle forward, +y = driver side.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

inline double norm(const Vec2& v) { return std::sqrt(v.x * v.x + v.y * v.y); }

inline bool is_unit(const Vec2& v, double tol = 1e-9) { return std::abs(norm(v) - 1.0) <= tol; }

/// Returns v scaled to unit length; zero-length input is the caller's error to catch.
inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n};
}

} // namespace evmag
