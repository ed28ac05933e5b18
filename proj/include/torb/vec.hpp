#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>

namespace torb {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }
inline double norm_inf(const Vec3& v) {
    return std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z)));
}

// Integer lattice vector (wrap counts, canonicalization shifts).
struct IVec3 {
    int x = 0, y = 0, z = 0;

    int& operator[](int i) { return (&x)[i]; }
    int operator[](int i) const { return (&x)[i]; }

    IVec3 operator+(const IVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    IVec3 operator-(const IVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    IVec3 operator-() const { return {-x, -y, -z}; }
    bool operator==(const IVec3& o) const { return x == o.x && y == o.y && z == o.z; }
    bool operator!=(const IVec3& o) const { return !(*this == o); }
    bool is_zero() const { return x == 0 && y == 0 && z == 0; }
};

inline Vec3 to_vec3(const IVec3& w) { return {double(w.x), double(w.y), double(w.z)}; }

// Column-major 3x3 matrix; columns are basis/period vectors.
struct Mat3 {
    std::array<Vec3, 3> col;

    Vec3 operator*(const Vec3& v) const { return col[0] * v.x + col[1] * v.y + col[2] * v.z; }
    static Mat3 identity() { return {{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}}; }
};

inline double determinant(const Mat3& m) { return dot(m.col[0], cross(m.col[1], m.col[2])); }

inline Mat3 inverse(const Mat3& m) {
    const double d = determinant(m);
    const Vec3 r0 = cross(m.col[1], m.col[2]) / d;
    const Vec3 r1 = cross(m.col[2], m.col[0]) / d;
    const Vec3 r2 = cross(m.col[0], m.col[1]) / d;
    // rows of the inverse
    return {{Vec3{r0.x, r1.x, r2.x}, Vec3{r0.y, r1.y, r2.y}, Vec3{r0.z, r1.z, r2.z}}};
}

// m^T * v without forming the transpose.
inline Vec3 transpose_mul(const Mat3& m, const Vec3& v) {
    return {dot(m.col[0], v), dot(m.col[1], v), dot(m.col[2], v)};
}

} // namespace torb
