#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ptscat/detail/gauss.hpp"
#include "ptscat/detail/rng.hpp"
#include "ptscat/media.hpp"

// Independent ground truth for the closed forms in born.hpp: direct
// numerical integration of the far-zone transform, Monte-Carlo synthesis of
// medium realizations from the Bochner representation, and ensemble
// estimators with uncertainty.

namespace ptscat {

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  enum class Rule { gauss, trapezoid };

  int nodes_per_axis = 72;
  double extent = 8.0;  // integration half-width in units of the envelope size
  Rule rule = Rule::gauss;

  QuadratureSpec() = default;
  QuadratureSpec(int nodes, double extent_, Rule rule_ = Rule::gauss)
      : nodes_per_axis(nodes), extent(extent_), rule(rule_) {
    if (nodes_per_axis < 8) throw std::invalid_argument("QuadratureSpec: nodes_per_axis < 8");
    if (extent < 5.0) throw std::invalid_argument("QuadratureSpec: extent < 5");
  }
};

namespace detail_oracle {

inline detail::Nodes1D axis_nodes(const QuadratureSpec& spec, int n, double half_width) {
  if (spec.rule == QuadratureSpec::Rule::trapezoid)
    return detail::trapezoid(n, -half_width, half_width);
  return detail::gauss_legendre_scaled(n, half_width);
}

// One Cartesian axis of the pair transform:
//   integral dx1 dx2 factor(x1,x2) exp(i K1 x1 - i K2 x2)
template <typename Model>
Complex axis_pair_integral(const Model& m, int axis, double k1, double k2,
                           const detail::Nodes1D& nodes) {
  const int n = static_cast<int>(nodes.x.size());
  Complex acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double x1 = nodes.x[i];
    Complex row{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const double x2 = nodes.x[j];
      row += nodes.w[j] * correlation_axis_factor(m, axis, x1, x2) *
             cis(k1 * x1 - k2 * x2);
    }
    acc += nodes.w[i] * row;
  }
  return acc;
}

template <typename Model>
Complex separable_pair_spectrum(const Model& m, const Vec3& K1, const Vec3& K2, int n,
                                const QuadratureSpec& spec) {
  const auto nodes = axis_nodes(spec, n, spec.extent * m.a);
  const Complex cx = axis_pair_integral(m, 0, K1.x, K2.x, nodes);
  const Complex cy = axis_pair_integral(m, 1, K1.y, K2.y, nodes);
  const Complex cz = axis_pair_integral(m, 2, K1.z, K2.z, nodes);
  return m.I0 * m.I0 * cx * cy * cz;
}

// Fourier transform of a Gaussian envelope with linear and quadratic phase:
//   integral I0 exp(-r^2/2a^2) exp(i(L.r - q r^2)) exp(-i K.r) d3r
inline Complex envelope_transform(const SchellKernel& k, const Vec3& K) {
  const Complex c(1.0 / (k.a * k.a), 2.0 * k.quadratic_phase);
  const Complex inv_c = 1.0 / c;
  const Complex per_axis_amp = std::sqrt(2.0 * std::numbers::pi * inv_c);
  const Vec3 u = K - k.linear_phase;
  return k.I0 * per_axis_amp * per_axis_amp * per_axis_amp *
         std::exp(-0.5 * u.norm2() * inv_c);
}

// G_j(K) = integral H(r, v_j) exp(-i K.r) d3r
inline Complex kernel_transform(const BochnerModel& m, const Vec3& v, const Vec3& K,
                                const QuadratureSpec& spec, int n) {
  if (const auto* sk = std::get_if<SchellKernel>(&m.kernel)) {
    if (sk->mod == SchellKernel::Mod::cosine)
      return 0.5 * (envelope_transform(*sk, K - kTwoPi * v) +
                    envelope_transform(*sk, K + kTwoPi * v));
    return envelope_transform(*sk, K + kTwoPi * v);
  }
  // Sampled kernel: tensor-product quadrature, node count capped. The
  // extent is taken as an absolute half-width because a sampled kernel
  // carries no envelope-size hint.
  const int capped = std::min(n, 32);
  const auto nodes = axis_nodes(spec, capped, spec.extent);
  const auto& fn = std::get<KernelFn>(m.kernel);
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < nodes.x.size(); ++i)
    for (std::size_t j = 0; j < nodes.x.size(); ++j)
      for (std::size_t l = 0; l < nodes.x.size(); ++l) {
        const Vec3 r{nodes.x[i], nodes.x[j], nodes.x[l]};
        acc += nodes.w[i] * nodes.w[j] * nodes.w[l] * fn(r, v) * cis(-K.dot(r));
      }
  return acc;
}

inline Complex bochner_pair_spectrum(const BochnerModel& m, const Vec3& K1, const Vec3& K2,
                                     const QuadratureSpec& spec, int v_per_axis) {
  Complex acc{0.0, 0.0};
  for (const auto& node : weight_nodes(m.weight, v_per_axis)) {
    const Complex g1 = kernel_transform(m, node.v, K1, spec, spec.nodes_per_axis);
    const Complex g2 = kernel_transform(m, node.v, K2, spec, spec.nodes_per_axis);
    acc += node.weight * std::conj(g1) * g2;
  }
  return acc;
}

}  // namespace detail_oracle

/// Numerical pair spectrum: integral of C(r1,r2) exp(i K1.r1 - i K2.r2) over
/// both arguments. Separates into per-axis two-dimensional integrals for the
/// Schell-factorized Gaussian families. Evaluated at two resolutions; throws
/// NotConverged when the refinement moves the result by more than 1e-4.
inline Complex pair_spectrum_quadrature(const MediumModel& model, const Vec3& K1,
                                        const Vec3& K2, const QuadratureSpec& spec = {}) {
  const auto refined = [&](const auto& m, int n1, int n2) {
    const Complex coarse = detail_oracle::separable_pair_spectrum(m, K1, K2, n1, spec);
    const Complex fine = detail_oracle::separable_pair_spectrum(m, K1, K2, n2, spec);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) / scale > 1e-4)
      throw NotConverged("pair_spectrum_quadrature: refinement moved result > 1e-4");
    return fine;
  };
  if (const auto* pt = std::get_if<PtSchellLinear>(&model))
    return refined(*pt, spec.nodes_per_axis, 2 * spec.nodes_per_axis);
  if (const auto* cl = std::get_if<ClassicQuadratic>(&model))
    return refined(*cl, spec.nodes_per_axis, 2 * spec.nodes_per_axis);
  const auto& b = std::get<BochnerModel>(model);
  const Complex coarse = detail_oracle::bochner_pair_spectrum(b, K1, K2, spec, b.nodes_per_axis);
  const Complex fine =
      detail_oracle::bochner_pair_spectrum(b, K1, K2, spec, 2 * b.nodes_per_axis - 1);
  const double scale = std::max(std::abs(fine), 1e-300);
  if (std::abs(fine - coarse) / scale > 1e-4)
    throw NotConverged("pair_spectrum_quadrature: weight-grid refinement > 1e-4");
  return fine;
}

// ---------------------------------------------------------------------------
// Realization synthesis. F(r) = sum_j sqrt(p(v_j) dv_j) xi_j H(r, v_j) with
// *real* unit normal deviates xi_j. Real deviates are required: they make
// every realization of a conjugate-parity kernel satisfy F*(-r) = F(r)
// identically, and they give <F^2> its nonzero value. Circular-complex
// deviates would force <F^2> = 0 and erase the anti-strength.

struct RealizationGrid {
  std::vector<double> xs, ys, zs;

  static RealizationGrid symmetric(double extent, int per_axis) {
    if (per_axis < 2) throw std::invalid_argument("RealizationGrid: per_axis < 2");
    RealizationGrid g;
    const double h = 2.0 * extent / (per_axis - 1);
    g.xs.resize(per_axis);
    for (int i = 0; i < per_axis; ++i) g.xs[i] = -extent + h * i;
    // force exact negation symmetry against rounding
    for (int i = 0; i < per_axis / 2; ++i) g.xs[per_axis - 1 - i] = -g.xs[i];
    if (per_axis % 2 == 1) g.xs[per_axis / 2] = 0.0;
    g.ys = g.xs;
    g.zs = g.xs;
    return g;
  }

  std::size_t size() const { return xs.size() * ys.size() * zs.size(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t l) const {
    return (i * ys.size() + j) * zs.size() + l;
  }
  Vec3 point(std::size_t i, std::size_t j, std::size_t l) const {
    return {xs[i], ys[j], zs[l]};
  }
};

struct RealizationField {
  RealizationGrid grid;
  std::vector<Complex> values;  // grid.size(), x slowest
  std::uint64_t seed{};
  BochnerModel model;
};

/// Draw the Bochner-sum coefficients for one realization.
inline std::vector<double> realization_deviates(std::size_t count, std::uint64_t seed) {
  detail::NormalSource normals(seed);
  std::vector<double> xi(count);
  for (auto& x : xi) x = normals.next();
  return xi;
}

inline RealizationField sample_realization(const BochnerModel& model,
                                           const RealizationGrid& grid, std::uint64_t seed,
                                           int v_per_axis = 9) {
  const auto nodes = sampling_nodes(model.weight, v_per_axis);
  const auto xi = realization_deviates(nodes.size(), seed);
  std::vector<double> coeff(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    coeff[j] = std::sqrt(nodes[j].weight) * xi[j];

  RealizationField field{grid, std::vector<Complex>(grid.size()), seed, model};
  for (std::size_t i = 0; i < grid.xs.size(); ++i)
    for (std::size_t j = 0; j < grid.ys.size(); ++j)
      for (std::size_t l = 0; l < grid.zs.size(); ++l) {
        const Vec3 r = grid.point(i, j, l);
        Complex acc{0.0, 0.0};
        for (std::size_t q = 0; q < nodes.size(); ++q)
          acc += coeff[q] * model.kernel_value(r, nodes[q].v);
        field.values[grid.index(i, j, l)] = acc;
      }
  return field;
}

/// The sampler's exact second-order target: the Bochner sum over the same
/// discrete v-grid the realizations are built from.
inline Complex discrete_covariance(const BochnerModel& model, const Vec3& r1, const Vec3& r2,
                                   int v_per_axis = 9) {
  Complex acc{0.0, 0.0};
  for (const auto& node : sampling_nodes(model.weight, v_per_axis))
    acc += node.weight * std::conj(model.kernel_value(r1, node.v)) *
           model.kernel_value(r2, node.v);
  return acc;
}

struct EnsembleEstimate {
  Complex mean{};
  double stderr_est{};  // max of the real/imag component standard errors
  int n{};
};

/// Sample mean of conj(F(r1)) F(r2) over independent realizations; one
/// derived seed per realization index, so the result does not depend on
/// evaluation order.
inline std::vector<EnsembleEstimate> estimate_correlation_batch(
    const BochnerModel& model, std::span<const ProbePair> pairs, int n, std::uint64_t seed,
    int v_per_axis = 9) {
  if (n < 100) throw std::invalid_argument("estimate_correlation: n < 100");
  const auto nodes = sampling_nodes(model.weight, v_per_axis);

  std::vector<Vec3> points;
  points.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    points.push_back(p.r1);
    points.push_back(p.r2);
  }
  // kernel matrix, point-major
  const std::size_t nv = nodes.size();
  std::vector<Complex> E(points.size() * nv);
  std::vector<double> root_weight(nv);
  for (std::size_t q = 0; q < nv; ++q) root_weight[q] = std::sqrt(nodes[q].weight);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t q = 0; q < nv; ++q)
      E[p * nv + q] = root_weight[q] * model.kernel_value(points[p], nodes[q].v);

  // Welford accumulators per pair, real and imaginary parts separately.
  std::vector<Complex> mean(pairs.size(), Complex{0.0, 0.0});
  std::vector<double> m2_re(pairs.size(), 0.0), m2_im(pairs.size(), 0.0);
  std::vector<Complex> f(points.size());
  std::vector<double> xi(nv);

  for (int m = 0; m < n; ++m) {
    detail::NormalSource normals(detail::derive_seed(seed, static_cast<std::uint64_t>(m)));
    for (auto& x : xi) x = normals.next();
    for (std::size_t p = 0; p < points.size(); ++p) {
      const Complex* row = &E[p * nv];
      double re = 0.0, im = 0.0;
      for (std::size_t q = 0; q < nv; ++q) {
        re += row[q].real() * xi[q];
        im += row[q].imag() * xi[q];
      }
      f[p] = {re, im};
    }
    const double count = m + 1.0;
    for (std::size_t pr = 0; pr < pairs.size(); ++pr) {
      const Complex prod = std::conj(f[2 * pr]) * f[2 * pr + 1];
      const Complex delta = prod - mean[pr];
      mean[pr] += delta / count;
      const Complex delta2 = prod - mean[pr];
      m2_re[pr] += delta.real() * delta2.real();
      m2_im[pr] += delta.imag() * delta2.imag();
    }
  }

  std::vector<EnsembleEstimate> out(pairs.size());
  for (std::size_t pr = 0; pr < pairs.size(); ++pr) {
    const double se_re = std::sqrt(m2_re[pr] / (n - 1.0) / n);
    const double se_im = std::sqrt(m2_im[pr] / (n - 1.0) / n);
    out[pr] = {mean[pr], std::max(se_re, se_im), n};
  }
  return out;
}

inline EnsembleEstimate estimate_correlation(const BochnerModel& model, const Vec3& r1,
                                             const Vec3& r2, int n, std::uint64_t seed,
                                             int v_per_axis = 9) {
  const ProbePair pair{r1, r2};
  return estimate_correlation_batch(model, std::span{&pair, 1}, n, seed, v_per_axis)[0];
}

// ---------------------------------------------------------------------------
// Realization-level symmetry. Correlation-level verdicts (media.hpp) do not
// imply these: the complex-exponential classic Schell kernel has an even
// correlation but uneven realizations.

struct EvennessReport {
  double max_conjugate_parity_violation{};  // max |conj(F(-r)) - F(r)|
  double max_parity_violation{};            // max |F(-r) - F(r)|
  double max_abs{};                         // max |F| over all realizations
  int n{};
};

inline EvennessReport realization_evenness_check(const BochnerModel& model,
                                                 const RealizationGrid& grid, int n,
                                                 std::uint64_t seed, int v_per_axis = 9) {
  for (std::size_t i = 0; i < grid.xs.size(); ++i)
    if (grid.xs[i] != -grid.xs[grid.xs.size() - 1 - i])
      throw std::invalid_argument("realization_evenness_check: grid not symmetric");
  EvennessReport report;
  report.n = n;
  for (int m = 0; m < n; ++m) {
    const auto field =
        sample_realization(model, grid, detail::derive_seed(seed, static_cast<std::uint64_t>(m)),
                           v_per_axis);
    const std::size_t nx = grid.xs.size(), ny = grid.ys.size(), nz = grid.zs.size();
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t l = 0; l < nz; ++l) {
          const Complex fwd = field.values[grid.index(i, j, l)];
          const Complex mirrored =
              field.values[grid.index(nx - 1 - i, ny - 1 - j, nz - 1 - l)];
          report.max_conjugate_parity_violation = std::max(
              report.max_conjugate_parity_violation, std::abs(std::conj(mirrored) - fwd));
          report.max_parity_violation =
              std::max(report.max_parity_violation, std::abs(mirrored - fwd));
          report.max_abs = std::max(report.max_abs, std::abs(fwd));
        }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Positive semidefiniteness of the correlation over a finite point set.

struct PsdReport {
  double min_eigenvalue{};
  double normalized_trace{};  // trace / size
  bool pass{};
};

template <typename CorrFn>
PsdReport gram_psd_check_fn(CorrFn&& corr, std::span<const Vec3> points, double tol = 1e-10) {
  if (points.empty() || points.size() > 200)
    throw std::invalid_argument("gram_psd_check: need 1..200 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXcd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = corr(points[i], points[j]);
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  PsdReport report;
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.normalized_trace = gram.trace().real() / static_cast<double>(n);
  report.pass = report.min_eigenvalue >= -tol * report.normalized_trace;
  return report;
}

inline PsdReport gram_psd_check(const MediumModel& model, std::span<const Vec3> points,
                                double tol = 1e-10) {
  return gram_psd_check_fn(
      [&](const Vec3& r1, const Vec3& r2) { return correlation(model, r1, r2).value; }, points,
      tol);
}

}  // namespace ptscat
