#pragma once

#include <cmath>
#include <complex>

namespace nvscope {

using Complex = std::complex<double>;

/// Cartesian 3-vector. Positions are in meters, fields in teslas.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 &operator+=(const Vec3 &o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3 &operator-=(const Vec3 &o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3 &operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3 &a) { return std::hypot(a.x, a.y, a.z); }

inline Vec3 normalized(const Vec3 &a) { return a * (1.0 / norm(a)); }

inline bool is_finite(const Vec3 &a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Time-harmonic phasor vector; the physical field is Re[B exp(-i w t)].
struct ComplexVec3 {
  Complex x;
  Complex y;
  Complex z;

  ComplexVec3 &operator+=(const ComplexVec3 &o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  ComplexVec3 &operator-=(const ComplexVec3 &o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  ComplexVec3 &operator*=(Complex s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  ComplexVec3 &operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend ComplexVec3 operator+(ComplexVec3 a, const ComplexVec3 &b) { return a += b; }
  friend ComplexVec3 operator-(ComplexVec3 a, const ComplexVec3 &b) { return a -= b; }
  friend ComplexVec3 operator*(ComplexVec3 a, Complex s) { return a *= s; }
  friend ComplexVec3 operator*(Complex s, ComplexVec3 a) { return a *= s; }
  friend ComplexVec3 operator*(ComplexVec3 a, double s) { return a *= s; }
  friend bool operator==(const ComplexVec3 &, const ComplexVec3 &) = default;

  Vec3 real() const { return {x.real(), y.real(), z.real()}; }
  Vec3 imag() const { return {x.imag(), y.imag(), z.imag()}; }
};

/// Real vector scaled by a complex amplitude.
inline ComplexVec3 operator*(const Vec3 &v, Complex s) { return {v.x * s, v.y * s, v.z * s}; }

/// Bilinear projection (no conjugation) onto a real direction.
inline Complex project(const ComplexVec3 &b, const Vec3 &dir) {
  return b.x * dir.x + b.y * dir.y + b.z * dir.z;
}

inline double norm_squared(const ComplexVec3 &b) {
  return std::norm(b.x) + std::norm(b.y) + std::norm(b.z);
}

inline double norm(const ComplexVec3 &b) { return std::sqrt(norm_squared(b)); }

inline bool is_finite(const ComplexVec3 &b) {
  return std::isfinite(b.x.real()) && std::isfinite(b.x.imag()) && std::isfinite(b.y.real()) &&
         std::isfinite(b.y.imag()) && std::isfinite(b.z.real()) && std::isfinite(b.z.imag());
}

} // namespace nvscope
