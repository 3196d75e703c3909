#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace eulerss {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    bool operator==(const Vec2& o) const = default;
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
// Counter-clockwise quarter turn: perp(a) = (-a.y, a.x).
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

// Dense 2x2 matrix, row-major: m[i][j] = d v_i / d x_j when used as a gradient.
struct Mat2 {
    double a00 = 0, a01 = 0, a10 = 0, a11 = 0;
    Vec2 operator*(const Vec2& v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }
    double frobenius2() const { return a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11; }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files or options (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Mesh invariant violations detected while loading or validating.
class MeshError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Violated mathematical preconditions such as the sign condition on g (exit code 3).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Iterative solver breakdown or dt underflow (exit code 4).
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace eulerss
