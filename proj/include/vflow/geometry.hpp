#pragma once

#include <array>
#include <cmath>

namespace vflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    /** Rotate by +90 degrees: (x, y) -> (-y, x). */
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.norm2(); }
inline double norm(Vec2 v) { return v.norm(); }
inline Vec2 perp(Vec2 v) { return v.perp(); }

/** 2x2 matrix, row-major. */
struct Mat2 {
    double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;

    double det() const { return m00 * m11 - m01 * m10; }
    double trace() const { return m00 + m11; }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
    return {m.m00 * v.x + m.m01 * v.y, m.m10 * v.x + m.m11 * v.y};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
inline Mat2 operator*(double s, const Mat2& m) {
    return {s * m.m00, s * m.m01, s * m.m10, s * m.m11};
}
inline double det(const Mat2& m) { return m.det(); }
inline double trace(const Mat2& m) { return m.trace(); }

using Mat4 = std::array<std::array<double, 4>, 4>;

/** Reduce t to [0, 1). */
inline double frac(double t) { return t - std::floor(t); }

/** Reduce t to [-1/2, 1/2). */
inline double center_frac(double t) { return t - std::floor(t + 0.5); }

} // namespace vflow
