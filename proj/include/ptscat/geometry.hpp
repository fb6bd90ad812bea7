#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace ptscat {

inline constexpr double kUnitTol = 1e-12;

struct Vec3 {
  double x{0.0}, y{0.0}, z{0.0};

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3& o) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  constexpr double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Mirroring a direction about the incident axis is undefined when the two
// are (anti)parallel.
struct DegenerateDirection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unit vector; validated on construction.
class UnitDir {
 public:
  explicit UnitDir(const Vec3& v) : v_(v) {
    if (std::abs(v.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("UnitDir: |v| != 1");
  }

  /// Rescale an arbitrary nonzero vector onto the unit sphere.
  static UnitDir normalized(const Vec3& v) {
    const double n = v.norm();
    if (n < kUnitTol) throw std::invalid_argument("UnitDir: zero vector");
    return UnitDir(v / n);
  }

  const Vec3& vec() const { return v_; }
  double theta() const { return std::acos(std::clamp(v_.z, -1.0, 1.0)); }
  double phi() const { return std::atan2(v_.y, v_.x); }

 private:
  Vec3 v_;
};

inline UnitDir x_axis() { return UnitDir({1.0, 0.0, 0.0}); }
inline UnitDir y_axis() { return UnitDir({0.0, 1.0, 0.0}); }
inline UnitDir z_axis() { return UnitDir({0.0, 0.0, 1.0}); }

/// Monochromatic scattering arrangement: wavenumber plus incident direction.
/// All quantities are evaluated at one fixed frequency; the tag is carried
/// through outputs for bookkeeping only.
struct ScatteringGeometry {
  double k;
  UnitDir s0;
  std::string frequency_tag;

  ScatteringGeometry(double k_, UnitDir s0_, std::string tag = {})
      : k(k_), s0(std::move(s0_)), frequency_tag(std::move(tag)) {
    if (!(k > 0.0)) throw std::invalid_argument("ScatteringGeometry: k <= 0");
  }
};

/// (sin th cos ph, sin th sin ph, cos th); th measured from +z.
inline UnitDir unit_from_spherical(double theta, double phi) {
  const double st = std::sin(theta);
  return UnitDir::normalized({st * std::cos(phi), st * std::sin(phi), std::cos(theta)});
}

/// K = k (s - s0); |K| <= 2k.
inline Vec3 momentum_transfer(const ScatteringGeometry& geom, const UnitDir& s) {
  return geom.k * (s.vec() - geom.s0.vec());
}

/// Mirror pair (s1 = s, s2 = s - 2 n sin th) about the incident axis, where
/// th is the angle between s and s0 and n is the unit transverse component
/// of s. Throws DegenerateDirection when s is (anti)parallel to s0.
inline std::pair<UnitDir, UnitDir> symmetric_pair(const ScatteringGeometry& geom,
                                                  const UnitDir& s) {
  const Vec3& s0 = geom.s0.vec();
  const Vec3& sv = s.vec();
  const double c = sv.dot(s0);
  const Vec3 transverse = sv - c * s0;
  const double sin_theta = transverse.norm();
  if (sin_theta < kUnitTol)
    throw DegenerateDirection("symmetric_pair: direction parallel to s0");
  const Vec3 n = transverse / sin_theta;
  return {s, UnitDir::normalized(sv - 2.0 * sin_theta * n)};
}

}  // namespace ptscat
