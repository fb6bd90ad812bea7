#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "ptscat/detail/gauss.hpp"
#include "ptscat/geometry.hpp"

// Medium models and real-space correlation algebra.
//
// Conventions, fixed once for the whole library:
//   * Schell factorization C(r1,r2) = conj(a(r1)) a(r2) mu(rd), rd = r2 - r1.
//   * The envelope carries exp(+i alpha.r) and the degree of correlation
//     carries exp(+i beta.rd); gamma = alpha + beta. With the far-zone
//     transform kernel used in born.hpp this places the scattered lobe at
//     momentum transfer K = +gamma.
//   * Weight-space transforms use the exp(-2 pi i v.r) kernel, so
//     mu(rd) = integral p(v) exp(-2 pi i v.rd) d3v with p >= 0.

namespace ptscat {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ZeroStrength : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonIntegrable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Complex cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// One draw of the complex refractive index at a position.
struct RefractiveIndexSample {
  double nr{1.0};
  double ni{0.0};
  Vec3 position{};
};

/// F = (k^2 / 4 pi^2) (n^2 - 1), the source term of the scalar problem.
inline Complex potential_from_index(double k, const RefractiveIndexSample& s) {
  if (!(k > 0.0)) throw std::invalid_argument("potential_from_index: k <= 0");
  const Complex n(s.nr, s.ni);
  return (k * k / (4.0 * std::numbers::pi * std::numbers::pi)) * (n * n - 1.0);
}

/// Gaussian Schell medium whose envelope and correlation carry linear
/// phases; conjugate-parity symmetric at both realization and correlation
/// level. alpha shifts individual realizations, beta shifts the degree of
/// correlation; only gamma = alpha + beta enters second-order statistics.
struct PtSchellLinear {
  double I0;
  double a;  // envelope size
  double d;  // correlation length (ignored when deterministic)
  Vec3 alpha;
  Vec3 beta;
  bool deterministic = false;  // correlation length -> infinity branch

  PtSchellLinear(double I0_, double a_, double d_, Vec3 alpha_ = {}, Vec3 beta_ = {},
                 bool deterministic_ = false)
      : I0(I0_), a(a_), d(d_), alpha(alpha_), beta(beta_), deterministic(deterministic_) {
    if (!(I0 > 0.0) || !(a > 0.0) || !(d > 0.0))
      throw std::invalid_argument("PtSchellLinear: I0, a, d must be positive");
  }

  Vec3 gamma() const { return alpha + beta; }
};

/// Gaussian Schell medium with an even quadratic envelope phase; symmetric
/// about the origin at the correlation level, gain/loss unbalanced.
struct ClassicQuadratic {
  double I0;
  double a;
  double d;
  double alpha;  // quadratic chirp, envelope phase exp(-i alpha r^2)

  ClassicQuadratic(double I0_, double a_, double d_, double alpha_)
      : I0(I0_), a(a_), d(d_), alpha(alpha_) {
    if (!(I0 > 0.0) || !(a > 0.0) || !(d > 0.0))
      throw std::invalid_argument("ClassicQuadratic: I0, a, d must be positive");
  }
};

// ---------------------------------------------------------------------------
// Weight functions p(v) >= 0 over spatial-frequency space.

struct GaussianWeight {
  Vec3 center{};
  double sigma{1.0};  // per-axis standard deviation
  double mass{1.0};   // integral of p

  GaussianWeight(Vec3 center_, double sigma_, double mass_ = 1.0)
      : center(center_), sigma(sigma_), mass(mass_) {
    if (!(sigma > 0.0) || !(mass > 0.0))
      throw std::invalid_argument("GaussianWeight: sigma, mass must be positive");
  }
};

/// p sampled on a product grid; trapezoid weights.
struct TabulatedWeight {
  std::vector<double> vx, vy, vz;
  std::vector<double> values;  // size vx*vy*vz, row-major (x slowest)

  TabulatedWeight(std::vector<double> vx_, std::vector<double> vy_,
                  std::vector<double> vz_, std::vector<double> values_)
      : vx(std::move(vx_)), vy(std::move(vy_)), vz(std::move(vz_)), values(std::move(values_)) {
    if (vx.size() < 2 || vy.size() < 2 || vz.size() < 2)
      throw std::invalid_argument("TabulatedWeight: need >= 2 nodes per axis");
    if (values.size() != vx.size() * vy.size() * vz.size())
      throw std::invalid_argument("TabulatedWeight: value count mismatch");
    for (double p : values) {
      if (!std::isfinite(p)) throw NonIntegrable("TabulatedWeight: non-finite weight");
      if (p < 0.0) throw std::invalid_argument("TabulatedWeight: negative weight");
    }
  }
};

using WeightFn = std::variant<GaussianWeight, TabulatedWeight>;

struct VNode {
  Vec3 v;
  double weight;  // p(v) * dv, nonnegative
};

namespace detail_media {

inline std::vector<VNode> product_nodes(const detail::Nodes1D& nx,
                                        const detail::Nodes1D& ny,
                                        const detail::Nodes1D& nz) {
  std::vector<VNode> out;
  out.reserve(nx.x.size() * ny.x.size() * nz.x.size());
  for (std::size_t i = 0; i < nx.x.size(); ++i)
    for (std::size_t j = 0; j < ny.x.size(); ++j)
      for (std::size_t l = 0; l < nz.x.size(); ++l)
        out.push_back({{nx.x[i], ny.x[j], nz.x[l]}, nx.w[i] * ny.w[j] * nz.w[l]});
  return out;
}

}  // namespace detail_media

inline double weight_mass(const WeightFn& w) {
  if (const auto* g = std::get_if<GaussianWeight>(&w)) return g->mass;
  const auto& t = std::get<TabulatedWeight>(w);
  const auto nx = detail::trapezoid(static_cast<int>(t.vx.size()), t.vx.front(), t.vx.back());
  const auto ny = detail::trapezoid(static_cast<int>(t.vy.size()), t.vy.front(), t.vy.back());
  const auto nz = detail::trapezoid(static_cast<int>(t.vz.size()), t.vz.front(), t.vz.back());
  double mass = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < t.vx.size(); ++i)
    for (std::size_t j = 0; j < t.vy.size(); ++j)
      for (std::size_t l = 0; l < t.vz.size(); ++l, ++idx)
        mass += nx.w[i] * ny.w[j] * nz.w[l] * t.values[idx];
  if (!std::isfinite(mass)) throw NonIntegrable("weight_mass: non-finite mass");
  return mass;
}

/// Quadrature nodes for integrals of p(v) f(v): Gauss-Hermite for Gaussian
/// weights, trapezoid product rule for tabulated ones.
inline std::vector<VNode> weight_nodes(const WeightFn& w, int per_axis = 17) {
  if (per_axis < 2) throw std::invalid_argument("weight_nodes: per_axis < 2");
  if (const auto* g = std::get_if<GaussianWeight>(&w)) {
    const auto gh = detail::gauss_hermite(per_axis);
    const double scale = std::numbers::sqrt2 * g->sigma;
    const double wnorm = 1.0 / std::sqrt(std::numbers::pi);
    std::vector<VNode> out;
    out.reserve(static_cast<std::size_t>(per_axis) * per_axis * per_axis);
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        for (int l = 0; l < per_axis; ++l) {
          const Vec3 v = g->center + Vec3{gh.x[i], gh.x[j], gh.x[l]} * scale;
          const double wt =
              g->mass * (gh.w[i] * wnorm) * (gh.w[j] * wnorm) * (gh.w[l] * wnorm);
          out.push_back({v, wt});
        }
    return out;
  }
  const auto& t = std::get<TabulatedWeight>(w);
  const auto nx = detail::trapezoid(static_cast<int>(t.vx.size()), t.vx.front(), t.vx.back());
  const auto ny = detail::trapezoid(static_cast<int>(t.vy.size()), t.vy.front(), t.vy.back());
  const auto nz = detail::trapezoid(static_cast<int>(t.vz.size()), t.vz.front(), t.vz.back());
  auto nodes = detail_media::product_nodes(nx, ny, nz);
  std::size_t idx = 0;
  for (auto& node : nodes) node.weight *= t.values[idx++];
  return nodes;
}

/// Uniform sampling grid over the support of p (center +/- 5 sigma for
/// Gaussian weights; truncation contributes ~4e-6 of the mass). Used by the
/// realization synthesiser, where uniform spacing keeps the aliasing scale
/// explicit.
inline std::vector<VNode> sampling_nodes(const WeightFn& w, int per_axis = 9) {
  if (const auto* g = std::get_if<GaussianWeight>(&w)) {
    const double half = 5.0 * g->sigma;
    auto make_axis = [&](double c) { return detail::trapezoid(per_axis, c - half, c + half); };
    const auto nx = make_axis(g->center.x);
    const auto ny = make_axis(g->center.y);
    const auto nz = make_axis(g->center.z);
    auto nodes = detail_media::product_nodes(nx, ny, nz);
    const double s2 = 2.0 * g->sigma * g->sigma;
    const double amp = g->mass * std::pow(2.0 * std::numbers::pi * g->sigma * g->sigma, -1.5);
    for (auto& node : nodes) {
      const Vec3 u = node.v - g->center;
      node.weight *= amp * std::exp(-u.norm2() / s2);
    }
    return nodes;
  }
  return weight_nodes(w, per_axis);
}

/// Fourier transform of p: integral p(v) exp(-2 pi i v.rd) d3v. For Schell
/// kernels this is the degree of correlation mu(rd).
inline Complex weight_transform(const WeightFn& w, const Vec3& rd) {
  if (const auto* g = std::get_if<GaussianWeight>(&w)) {
    const double arg = kTwoPi * g->sigma;
    return g->mass * std::exp(-0.5 * arg * arg * rd.norm2()) *
           cis(-kTwoPi * g->center.dot(rd));
  }
  Complex acc{0.0, 0.0};
  for (const auto& node : weight_nodes(w))
    acc += node.weight * cis(-kTwoPi * node.v.dot(rd));
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
    throw NonIntegrable("weight_transform: non-finite result");
  return acc;
}

/// Fourier transform of sqrt(p): the amplitude profile whose self-convolution
/// reproduces weight_transform (checked in tests as a consistency identity).
inline Complex weight_root_transform(const WeightFn& w, const Vec3& rd) {
  if (const auto* g = std::get_if<GaussianWeight>(&w)) {
    // per axis: (2 pi s^2)^(-1/4) sqrt(4 pi s^2) exp(-4 pi^2 s^2 r^2)
    const double s2 = g->sigma * g->sigma;
    const double per_axis_amp =
        std::sqrt(4.0 * std::numbers::pi * s2) * std::pow(2.0 * std::numbers::pi * s2, -0.25);
    const double b = 4.0 * std::numbers::pi * std::numbers::pi * s2;
    return std::sqrt(g->mass) * per_axis_amp * per_axis_amp * per_axis_amp *
           std::exp(-b * rd.norm2()) * cis(-kTwoPi * g->center.dot(rd));
  }
  const auto& t = std::get<TabulatedWeight>(w);
  const auto nx = detail::trapezoid(static_cast<int>(t.vx.size()), t.vx.front(), t.vx.back());
  const auto ny = detail::trapezoid(static_cast<int>(t.vy.size()), t.vy.front(), t.vy.back());
  const auto nz = detail::trapezoid(static_cast<int>(t.vz.size()), t.vz.front(), t.vz.back());
  auto nodes = detail_media::product_nodes(nx, ny, nz);
  Complex acc{0.0, 0.0};
  std::size_t idx = 0;
  for (const auto& node : nodes) {
    acc += node.weight * std::sqrt(t.values[idx++]) * cis(-kTwoPi * node.v.dot(rd));
  }
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
    throw NonIntegrable("weight_root_transform: non-finite result");
  return acc;
}

// ---------------------------------------------------------------------------
// Bochner-representable media: C(r1,r2) = integral p(v) H*(r1,v) H(r2,v) d3v.
// Nonnegative p makes C positive semidefinite by construction.

/// Fourier-type kernel H(r,v) = envelope(r) * mod(2 pi r.v) with a Gaussian
/// envelope carrying an optional linear or quadratic phase.
struct SchellKernel {
  enum class Mod { complex_exp, cosine };

  double I0{1.0};
  double a{1.0};
  Vec3 linear_phase{};        // envelope phase exp(+i linear_phase.r)
  double quadratic_phase{0.0};  // envelope phase exp(-i quadratic_phase r^2)
  Mod mod{Mod::complex_exp};

  Complex envelope(const Vec3& r) const {
    const double r2 = r.norm2();
    return I0 * std::exp(-r2 / (2.0 * a * a)) *
           cis(linear_phase.dot(r) - quadratic_phase * r2);
  }

  Complex operator()(const Vec3& r, const Vec3& v) const {
    const double phase = kTwoPi * r.dot(v);
    if (mod == Mod::cosine) return envelope(r) * std::cos(phase);
    return envelope(r) * cis(-phase);
  }
};

using KernelFn = std::function<Complex(const Vec3&, const Vec3&)>;

enum class BochnerSymmetry { pt, classic, generic };

struct BochnerModel {
  WeightFn weight;
  std::variant<SchellKernel, KernelFn> kernel;
  BochnerSymmetry symmetry = BochnerSymmetry::generic;
  int nodes_per_axis = 17;  // correlation-sum resolution

  Complex kernel_value(const Vec3& r, const Vec3& v) const {
    if (const auto* sk = std::get_if<SchellKernel>(&kernel)) return (*sk)(r, v);
    return std::get<KernelFn>(kernel)(r, v);
  }
};

/// Max violation of H*(-r,v) = H(r,v) over probe points; zero (to rounding)
/// for any kernel intended as conjugate-parity symmetric.
inline double bochner_symmetry_violation(const BochnerModel& m,
                                         std::span<const Vec3> rs,
                                         std::span<const Vec3> vs) {
  double worst = 0.0;
  for (const auto& r : rs)
    for (const auto& v : vs)
      worst = std::max(worst, std::abs(std::conj(m.kernel_value(-r, v)) - m.kernel_value(r, v)));
  return worst;
}

/// Bochner form of the linear-phase conjugate-parity Schell medium:
/// p is Gaussian centered at -beta/(2 pi), H carries the envelope phase.
inline BochnerModel bochner_from(const PtSchellLinear& m) {
  if (m.deterministic)
    throw std::invalid_argument("bochner_from: deterministic medium has no weight density");
  GaussianWeight p{-m.beta / kTwoPi, 1.0 / (kTwoPi * m.d)};
  SchellKernel h;
  h.I0 = m.I0;
  h.a = m.a;
  h.linear_phase = m.alpha;
  return {p, h, BochnerSymmetry::pt};
}

/// Bochner form of the quadratic-phase classic medium. Realizations built
/// from the complex-exponential kernel are not individually even; only the
/// correlation is.
inline BochnerModel bochner_from(const ClassicQuadratic& m) {
  GaussianWeight p{{0.0, 0.0, 0.0}, 1.0 / (kTwoPi * m.d)};
  SchellKernel h;
  h.I0 = m.I0;
  h.a = m.a;
  h.quadratic_phase = m.alpha;
  return {p, h, BochnerSymmetry::classic};
}

/// Even-cosine kernel: every realization is even about the origin, so the
/// medium is classic at the realization level and fully correlated at
/// symmetric point pairs.
inline BochnerModel bochner_cosine(double I0, double a, double d) {
  GaussianWeight p{{0.0, 0.0, 0.0}, 1.0 / (kTwoPi * d)};
  SchellKernel h;
  h.I0 = I0;
  h.a = a;
  h.mod = SchellKernel::Mod::cosine;
  return {p, h, BochnerSymmetry::classic};
}

using MediumModel = std::variant<PtSchellLinear, ClassicQuadratic, BochnerModel>;

// ---------------------------------------------------------------------------
// Correlation algebra.

enum class Provenance { closed_form, quadrature, ensemble };

struct CorrelationValue {
  Complex value{};
  Provenance provenance{Provenance::closed_form};
  std::optional<double> stderr_est{};  // ensemble only
};

namespace detail_media {

inline double gauss_envelope(double r2, double a) { return std::exp(-r2 / (2.0 * a * a)); }

}  // namespace detail_media

inline Complex correlation_value(const PtSchellLinear& m, const Vec3& r1, const Vec3& r2) {
  const Vec3 rd = r2 - r1;
  double mag = m.I0 * m.I0 * detail_media::gauss_envelope(r1.norm2(), m.a) *
               detail_media::gauss_envelope(r2.norm2(), m.a);
  if (!m.deterministic) mag *= std::exp(-rd.norm2() / (2.0 * m.d * m.d));
  return mag * cis(m.gamma().dot(rd));
}

inline Complex correlation_value(const ClassicQuadratic& m, const Vec3& r1, const Vec3& r2) {
  const Vec3 rd = r2 - r1;
  const double mag = m.I0 * m.I0 * detail_media::gauss_envelope(r1.norm2(), m.a) *
                     detail_media::gauss_envelope(r2.norm2(), m.a) *
                     std::exp(-rd.norm2() / (2.0 * m.d * m.d));
  return mag * cis(m.alpha * (r1.norm2() - r2.norm2()));
}

inline Complex correlation_value(const BochnerModel& m, const Vec3& r1, const Vec3& r2) {
  Complex acc{0.0, 0.0};
  for (const auto& node : weight_nodes(m.weight, m.nodes_per_axis))
    acc += node.weight * std::conj(m.kernel_value(r1, node.v)) * m.kernel_value(r2, node.v);
  return acc;
}

inline CorrelationValue correlation(const MediumModel& model, const Vec3& r1, const Vec3& r2) {
  return std::visit(
      [&](const auto& m) -> CorrelationValue {
        using T = std::decay_t<decltype(m)>;
        const Complex c = correlation_value(m, r1, r2);
        constexpr Provenance prov = std::is_same_v<T, BochnerModel>
                                        ? Provenance::quadrature
                                        : Provenance::closed_form;
        return {c, prov, std::nullopt};
      },
      model);
}

/// I(r) = C(r,r); real, nonnegative, even.
inline double strength(const MediumModel& model, const Vec3& r) {
  return correlation(model, r, r).value.real();
}

/// N(r) = C(-r, r); complex for conjugate-parity media, Im N(0) = 0 always.
inline Complex anti_strength(const MediumModel& model, const Vec3& r) {
  return correlation(model, -r, r).value;
}

/// mu = C(r1,r2) / sqrt(I(r1) I(r2)); |mu| <= 1.
inline Complex degree_of_correlation(const MediumModel& model, const Vec3& r1, const Vec3& r2) {
  const double i1 = strength(model, r1);
  const double i2 = strength(model, r2);
  if (std::abs(i1) < 1e-300 || std::abs(i2) < 1e-300)
    throw ZeroStrength("degree_of_correlation: vanishing strength");
  return correlation(model, r1, r2).value / (std::sqrt(i1) * std::sqrt(i2));
}

// ---------------------------------------------------------------------------
// Symmetry classification at the correlation level. Realization-level
// verdicts require a sampler and live in oracle.hpp.

enum class SymmetryClass { classic, pt, both, neither };

struct ProbePair {
  Vec3 r1, r2;
};

inline SymmetryClass classify_symmetry(const MediumModel& model,
                                       std::span<const ProbePair> probes,
                                       double tol = 1e-9) {
  if (probes.empty()) throw std::invalid_argument("classify_symmetry: empty probe set");
  bool classic_ok = true, pt_ok = true;
  for (const auto& p : probes) {
    const Complex c = correlation(model, p.r1, p.r2).value;
    const Complex cm = correlation(model, -p.r1, -p.r2).value;
    const double scale = std::max(std::abs(c), 1e-300);
    if (std::abs(cm - c) > tol * scale) classic_ok = false;
    if (std::abs(std::conj(cm) - c) > tol * scale) pt_ok = false;
    if (!classic_ok && !pt_ok) break;
  }
  if (classic_ok && pt_ok) return SymmetryClass::both;
  if (classic_ok) return SymmetryClass::classic;
  if (pt_ok) return SymmetryClass::pt;
  return SymmetryClass::neither;
}

// ---------------------------------------------------------------------------
// Per-axis Cartesian factors, C(r1,r2) = I0^2 * prod_axis factor(axis,...).
// The far-zone quadrature in oracle.hpp integrates these axis by axis; a
// test pins their product to correlation_value.

inline Complex correlation_axis_factor(const PtSchellLinear& m, int axis, double x1, double x2) {
  const double g = axis == 0 ? m.gamma().x : axis == 1 ? m.gamma().y : m.gamma().z;
  double mag = std::exp(-(x1 * x1 + x2 * x2) / (2.0 * m.a * m.a));
  if (!m.deterministic) mag *= std::exp(-(x2 - x1) * (x2 - x1) / (2.0 * m.d * m.d));
  return mag * cis(g * (x2 - x1));
}

inline Complex correlation_axis_factor(const ClassicQuadratic& m, int /*axis*/, double x1,
                                       double x2) {
  const double mag = std::exp(-(x1 * x1 + x2 * x2) / (2.0 * m.a * m.a) -
                              (x2 - x1) * (x2 - x1) / (2.0 * m.d * m.d));
  return mag * cis(m.alpha * (x1 * x1 - x2 * x2));
}

}  // namespace ptscat
