#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ptscat/geometry.hpp"
#include "ptscat/media.hpp"
#include "ptscat/oracle.hpp"

// Far-zone statistics of weakly scattered radiation.
//
// Everything here follows one transform convention, applied uniformly:
//
//   pair_spectrum(K1, K2) = iint C(r1,r2) exp(+i K1.r1 - i K2.r2) d3r1 d3r2
//
// which is the kernel produced by a plane wave incident along s0 together
// with far-zone observation along s1, s2 and K_j = k(s_j - s0). The closed
// forms below were re-derived in this convention and frozen only after
// matching pair_spectrum_quadrature to ~1e-14; with the media.hpp phase
// conventions the scattered lobe of the linear-phase medium sits at
// K = +gamma.

namespace ptscat {

struct MismatchedRadius : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plane wave: position-independent spectral density, wavenumber and
/// propagation direction carried by the geometry.
struct IncidentPlaneWave {
  double spectral_density;
  ScatteringGeometry geometry;

  IncidentPlaneWave(double s, ScatteringGeometry g)
      : spectral_density(s), geometry(std::move(g)) {
    if (spectral_density < 0.0)
      throw std::invalid_argument("IncidentPlaneWave: negative spectral density");
  }

  const UnitDir& direction() const { return geometry.s0; }
  double k() const { return geometry.k; }
};

struct FarZonePoint {
  double r;
  UnitDir s;

  FarZonePoint(double r_, UnitDir s_) : r(r_), s(std::move(s_)) {
    if (!(r > 0.0)) throw std::invalid_argument("FarZonePoint: r <= 0");
  }
};

// ---------------------------------------------------------------------------
// Closed-form pair spectra.

namespace detail_born {

inline double momentum_width_sq(const PtSchellLinear& m) {
  // sigma^2 = 2/d^2 + 1/a^2; the deterministic branch drops the 2/d^2 term.
  if (m.deterministic) return 1.0 / (m.a * m.a);
  return 2.0 / (m.d * m.d) + 1.0 / (m.a * m.a);
}

inline double classic_axis_det(const ClassicQuadratic& m) {
  const double a2 = m.a * m.a, d2 = m.d * m.d;
  return 1.0 / (a2 * a2) + 2.0 / (a2 * d2) + 4.0 * m.alpha * m.alpha;
}

inline double classic_momentum_width_sq(const ClassicQuadratic& m) {
  return 4.0 * m.alpha * m.alpha * m.a * m.a + 2.0 / (m.d * m.d) + 1.0 / (m.a * m.a);
}

inline double two_pi_cubed() {
  return kTwoPi * kTwoPi * kTwoPi;
}

}  // namespace detail_born

/// Deterministic-limit branch (fully correlated medium): the Gaussian pair
/// spectrum I0^2 (2 pi)^3 a^6 exp(-a^2(|K1-g|^2 + |K2-g|^2)/2).
inline Complex pair_spectrum_deterministic(const PtSchellLinear& m, const Vec3& K1,
                                           const Vec3& K2) {
  const Vec3 u1 = K1 - m.gamma();
  const Vec3 u2 = K2 - m.gamma();
  const double a2 = m.a * m.a;
  const double amp = m.I0 * m.I0 * detail_born::two_pi_cubed() * a2 * a2 * a2;
  return {amp * std::exp(-0.5 * a2 * (u1.norm2() + u2.norm2())), 0.0};
}

/// Pair spectrum of the linear-phase medium. Real for every (K1, K2).
inline Complex pair_spectrum(const PtSchellLinear& m, const Vec3& K1, const Vec3& K2) {
  if (m.deterministic) return pair_spectrum_deterministic(m, K1, K2);
  const Vec3 u1 = K1 - m.gamma();
  const Vec3 u2 = K2 - m.gamma();
  const double a2 = m.a * m.a, d2 = m.d * m.d;
  const double denom = 2.0 + d2 / a2;
  const double q = (-(a2 + d2) * 0.5 * (u1.norm2() + u2.norm2()) + a2 * u1.dot(u2)) / denom;
  const double amp = m.I0 * m.I0 * detail_born::two_pi_cubed() * a2 * a2 * a2 * d2 * m.d /
                     std::pow(2.0 * a2 + d2, 1.5);
  return {amp * std::exp(q), 0.0};
}

/// Hermitian/non-Hermitian split: the gamma = 0 spectrum times the positive
/// factor exp(gamma.(K1 + K2 - gamma) / sigma^2). The product reproduces
/// pair_spectrum identically.
struct SplitPairSpectrum {
  Complex hermitian_part;
  double nonhermitian_factor;
};

inline SplitPairSpectrum pair_spectrum_split(const PtSchellLinear& m, const Vec3& K1,
                                             const Vec3& K2) {
  PtSchellLinear balanced = m;
  balanced.alpha = {};
  balanced.beta = {};
  const Vec3 g = m.gamma();
  const double factor = std::exp(g.dot(K1 + K2 - g) / detail_born::momentum_width_sq(m));
  return {pair_spectrum(balanced, K1, K2), factor};
}

/// Pair spectrum of the quadratic-phase classic medium; complex-valued with
/// a phase odd under K1 <-> K2, Hermitian under the swap conj relation.
inline Complex pair_spectrum(const ClassicQuadratic& m, const Vec3& K1, const Vec3& K2) {
  const double a2 = m.a * m.a, d2 = m.d * m.d;
  const double det = detail_born::classic_axis_det(m);
  const Complex e = (Complex(-(1.0 / a2 + 1.0 / d2) * 0.5 * (K1.norm2() + K2.norm2()) +
                                 K1.dot(K2) / d2,
                             -m.alpha * (K1.norm2() - K2.norm2()))) /
                    det;
  const double amp = m.I0 * m.I0 * detail_born::two_pi_cubed() * std::pow(det, -1.5);
  return amp * std::exp(e);
}

inline Complex pair_spectrum(const BochnerModel& m, const Vec3& K1, const Vec3& K2) {
  return pair_spectrum_quadrature(MediumModel{m}, K1, K2);
}

inline Complex pair_spectrum(const MediumModel& model, const Vec3& K1, const Vec3& K2) {
  return std::visit([&](const auto& m) { return pair_spectrum(m, K1, K2); }, model);
}

// ---------------------------------------------------------------------------
// Diagonal of the pair spectrum: the momentum-transfer profile of the
// scattered spectral density. Real and nonnegative for every family.

inline double momentum_spectrum(const PtSchellLinear& m, const Vec3& K) {
  return pair_spectrum(m, K, K).real();
}

inline double momentum_spectrum(const ClassicQuadratic& m, const Vec3& K) {
  const double det = detail_born::classic_axis_det(m);
  const double amp = m.I0 * m.I0 * detail_born::two_pi_cubed() * std::pow(det, -1.5);
  return amp * std::exp(-K.norm2() / detail_born::classic_momentum_width_sq(m));
}

inline double momentum_spectrum(const BochnerModel& m, const Vec3& K) {
  return pair_spectrum(m, K, K).real();
}

inline double momentum_spectrum(const MediumModel& model, const Vec3& K) {
  return std::visit([&](const auto& m) { return momentum_spectrum(m, K); }, model);
}

// ---------------------------------------------------------------------------
// Far-zone observables.

/// W^s(r s1, r s2) = S^i / r^2 * pair_spectrum(K1, K2) with K_j = k(s_j - s0).
inline Complex far_zone_csd(const MediumModel& model, const IncidentPlaneWave& wave,
                            const FarZonePoint& p1, const FarZonePoint& p2) {
  if (std::abs(p1.r - p2.r) > 1e-12 * std::max(p1.r, p2.r))
    throw MismatchedRadius("far_zone_csd: points on different spheres");
  const Vec3 K1 = momentum_transfer(wave.geometry, p1.s);
  const Vec3 K2 = momentum_transfer(wave.geometry, p2.s);
  return wave.spectral_density / (p1.r * p1.r) * pair_spectrum(model, K1, K2);
}

/// Generalized form for explicitly supplied momentum-transfer vectors, e.g.
/// when the two correlated paths see distinct incident directions.
inline Complex far_zone_csd(const MediumModel& model, const IncidentPlaneWave& wave,
                            double r, const Vec3& K1, const Vec3& K2) {
  if (!(r > 0.0)) throw std::invalid_argument("far_zone_csd: r <= 0");
  return wave.spectral_density / (r * r) * pair_spectrum(model, K1, K2);
}

inline double spectral_density(const MediumModel& model, const IncidentPlaneWave& wave,
                               const FarZonePoint& p) {
  const Vec3 K = momentum_transfer(wave.geometry, p.s);
  return wave.spectral_density / (p.r * p.r) * momentum_spectrum(model, K);
}

/// mu^s = pair_spectrum(K1,K2) / sqrt(momentum_spectrum(K1) momentum_spectrum(K2)).
inline Complex degree_of_coherence(const MediumModel& model, const IncidentPlaneWave& wave,
                                   const FarZonePoint& p1, const FarZonePoint& p2) {
  const Vec3 K1 = momentum_transfer(wave.geometry, p1.s);
  const Vec3 K2 = momentum_transfer(wave.geometry, p2.s);
  const double n1 = momentum_spectrum(model, K1);
  const double n2 = momentum_spectrum(model, K2);
  if (n1 < 1e-300 || n2 < 1e-300)
    throw ZeroDenominator("degree_of_coherence: vanishing momentum spectrum");
  return pair_spectrum(model, K1, K2) / (std::sqrt(n1) * std::sqrt(n2));
}

namespace detail_born {

// Deterministic transverse reference: the coordinate axis least aligned
// with s0, Gram-Schmidt projected.
inline Vec3 transverse_axis(const UnitDir& s0) {
  const Vec3& v = s0.vec();
  Vec3 seed{1.0, 0.0, 0.0};
  double best = std::abs(v.x);
  if (std::abs(v.y) < best) {
    seed = {0.0, 1.0, 0.0};
    best = std::abs(v.y);
  }
  if (std::abs(v.z) < best) seed = {0.0, 0.0, 1.0};
  const Vec3 t = seed - v.dot(seed) * v;
  return t / t.norm();
}

}  // namespace detail_born

/// Coherence between the mirror pair of directions at angle theta from s0.
/// Depends only on theta: |K1| = |K2| kills the classic phase and the pair
/// difference K1 - K2 is gamma-free.
inline Complex coherence_symmetric(const MediumModel& model, const IncidentPlaneWave& wave,
                                   double theta) {
  if (theta < 0.0 || theta > std::numbers::pi)
    throw std::invalid_argument("coherence_symmetric: theta outside [0, pi]");
  const Vec3& s0 = wave.direction().vec();
  const Vec3 n = detail_born::transverse_axis(wave.direction());
  const double c = std::cos(theta), s = std::sin(theta);
  const UnitDir s1 = UnitDir::normalized(c * s0 + s * n);
  const UnitDir s2 = UnitDir::normalized(c * s0 - s * n);
  return degree_of_coherence(model, wave, {1.0, s1}, {1.0, s2});
}

// ---------------------------------------------------------------------------
// Direction-grid maps of the scattered spectral density.

enum class MapNormalization { absolute, peak, position_dependent };

struct SpectralMap {
  std::vector<double> theta;  // radians, strictly increasing
  std::vector<double> phi;    // radians, strictly increasing
  std::vector<double> values;  // theta-major, size theta*phi
  MapNormalization normalization{MapNormalization::absolute};
  MediumModel medium;
  IncidentPlaneWave wave;

  double value(std::size_t i, std::size_t j) const { return values[i * phi.size() + j]; }
};

/// Evaluate the far-zone spectral density over a (theta, phi) direction grid
/// at unit far-zone radius. position_dependent divides by the forward value,
/// which isolates the direction-dependent exponential of the closed forms.
inline SpectralMap spectral_map(const MediumModel& model, const IncidentPlaneWave& wave,
                                std::span<const double> theta_grid,
                                std::span<const double> phi_grid,
                                MapNormalization normalization) {
  if (theta_grid.empty() || phi_grid.empty())
    throw std::invalid_argument("spectral_map: empty grid");
  for (std::size_t i = 1; i < theta_grid.size(); ++i)
    if (!(theta_grid[i] > theta_grid[i - 1]))
      throw std::invalid_argument("spectral_map: theta grid not strictly increasing");
  for (std::size_t j = 1; j < phi_grid.size(); ++j)
    if (!(phi_grid[j] > phi_grid[j - 1]))
      throw std::invalid_argument("spectral_map: phi grid not strictly increasing");

  // Rotate the z-based spherical grid onto the incident axis so theta is
  // always measured from s0.
  const Vec3& s0 = wave.direction().vec();
  const Vec3 e1 = detail_born::transverse_axis(wave.direction());
  const Vec3 e2 = s0.cross(e1);

  SpectralMap map{std::vector<double>(theta_grid.begin(), theta_grid.end()),
                  std::vector<double>(phi_grid.begin(), phi_grid.end()),
                  std::vector<double>(theta_grid.size() * phi_grid.size()),
                  normalization,
                  model,
                  wave};

  std::size_t idx = 0;
  for (const double th : theta_grid) {
    const double st = std::sin(th), ct = std::cos(th);
    for (const double ph : phi_grid) {
      const Vec3 dir = ct * s0 + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
      const Vec3 K = momentum_transfer(wave.geometry, UnitDir::normalized(dir));
      map.values[idx++] = momentum_spectrum(model, K) * wave.spectral_density;
    }
  }

  if (normalization == MapNormalization::peak) {
    const double peak = *std::max_element(map.values.begin(), map.values.end());
    if (peak > 0.0)
      for (auto& v : map.values) v /= peak;
  } else if (normalization == MapNormalization::position_dependent) {
    const double forward = momentum_spectrum(model, Vec3{}) * wave.spectral_density;
    if (forward < 1e-300)
      throw ZeroDenominator("spectral_map: vanishing forward value");
    for (auto& v : map.values) v /= forward;
  }
  for (auto& v : map.values)
    if (v < 0.0 && v > -1e-14) v = 0.0;
  return map;
}

}  // namespace ptscat
