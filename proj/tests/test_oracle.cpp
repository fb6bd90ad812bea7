#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ptscat/detail/rng.hpp"
#include "ptscat/oracle.hpp"

using namespace ptscat;

namespace {

Vec3 random_in_ball(detail::SplitMix64& rng, double radius) {
  for (;;) {
    Vec3 v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (v.norm2() <= 1.0) return v * radius;
  }
}

const PtSchellLinear pt_model{1.3, 1.0, 1.4, {0.4, -0.2, 0.3}, {0.1, 0.3, -0.2}};
const ClassicQuadratic cl_model{1.3, 1.0, 1.4, 0.7};

}  // namespace

TEST_CASE("quadrature self-convergence at defaults") {
  const QuadratureSpec spec;
  detail::SplitMix64 rng(3);
  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model}};
  for (const auto& model : models) {
    for (int i = 0; i < 5; ++i) {
      const Vec3 K1 = random_in_ball(rng, 4.0);
      const Vec3 K2 = random_in_ball(rng, 4.0);
      const Complex coarse = pair_spectrum_quadrature(model, K1, K2, spec);
      const Complex fine = pair_spectrum_quadrature(
          model, K1, K2, QuadratureSpec{2 * spec.nodes_per_axis, spec.extent});
      CHECK(std::abs(fine - coarse) <= 1e-8 * std::abs(fine));
    }
  }
}

TEST_CASE("quadrature confirms realness for the conjugate-parity family") {
  detail::SplitMix64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Vec3 K1 = random_in_ball(rng, 3.0);
    const Vec3 K2 = random_in_ball(rng, 3.0);
    const Complex c = pair_spectrum_quadrature(MediumModel{pt_model}, K1, K2);
    CHECK(std::abs(c.imag()) <= 1e-8 * std::abs(c));
  }
}

TEST_CASE("quadrature confirms the classic swap relation") {
  detail::SplitMix64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const Vec3 K1 = random_in_ball(rng, 3.0);
    const Vec3 K2 = random_in_ball(rng, 3.0);
    const Complex fwd = pair_spectrum_quadrature(MediumModel{cl_model}, K1, K2);
    const Complex swapped = pair_spectrum_quadrature(MediumModel{cl_model}, K2, K1);
    CHECK(std::abs(swapped - std::conj(fwd)) <= 1e-8 * std::abs(fwd));
  }
}

TEST_CASE("under-resolved quadrature reports NotConverged") {
  const QuadratureSpec starved{8, 5.0};
  const Vec3 big{7.0, 5.0, 6.0};
  CHECK_THROWS_AS(pair_spectrum_quadrature(MediumModel{pt_model}, big, -1.0 * big, starved),
                  NotConverged);
}

TEST_CASE("quadrature spec validates") {
  CHECK_THROWS_AS(QuadratureSpec(4, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(QuadratureSpec(16, 3.0), std::invalid_argument);
}

TEST_CASE("Bochner route agrees with the separable route") {
  const MediumModel direct{pt_model};
  const MediumModel bochner{bochner_from(pt_model)};
  detail::SplitMix64 rng(11);
  for (int i = 0; i < 3; ++i) {
    const Vec3 K1 = random_in_ball(rng, 2.0);
    const Vec3 K2 = random_in_ball(rng, 2.0);
    const Complex a = pair_spectrum_quadrature(direct, K1, K2);
    const Complex b = pair_spectrum_quadrature(bochner, K1, K2);
    CHECK(std::abs(a - b) <= 1e-7 * std::abs(a));
  }
}

TEST_CASE("realizations of conjugate-parity kernels satisfy F*(-r) = F(r)") {
  const BochnerModel model = bochner_from(pt_model);
  const auto grid = RealizationGrid::symmetric(2.0, 7);
  const auto report = realization_evenness_check(model, grid, 20, 12345);
  CHECK(report.max_conjugate_parity_violation <= 1e-12 * report.max_abs);
  // and they are genuinely complex, not even
  CHECK(report.max_parity_violation > 1e-3 * report.max_abs);
}

TEST_CASE("complex-exponential classic kernel is not realization-even") {
  const BochnerModel model = bochner_from(cl_model);
  const auto grid = RealizationGrid::symmetric(2.0, 7);
  const auto report = realization_evenness_check(model, grid, 10, 77);
  CHECK(report.max_parity_violation > 0.1 * report.max_abs);
  CHECK(report.max_conjugate_parity_violation > 0.1 * report.max_abs);
}

TEST_CASE("even-cosine kernel is realization-even and fully correlated at mirror points") {
  const BochnerModel model = bochner_cosine(1.1, 1.0, 0.8);
  const auto grid = RealizationGrid::symmetric(2.0, 7);
  const auto report = realization_evenness_check(model, grid, 10, 99);
  CHECK(report.max_parity_violation <= 1e-12 * report.max_abs);

  // mu(-r, r) = 1: N and I coincide for the discrete kernel
  const Vec3 r{0.6, -0.3, 0.4};
  const Complex n_est = discrete_covariance(model, -r, r);
  const Complex i_est = discrete_covariance(model, r, r);
  CHECK(std::abs(n_est / i_est - 1.0) < 1e-12);

  // ensemble route: estimate within 5 standard errors
  const auto est = estimate_correlation(model, -r, r, 2000, 4242);
  CHECK(std::abs(est.mean - i_est) <= 5.0 * est.stderr_est);
}

TEST_CASE("same seed reproduces the field bit for bit") {
  const BochnerModel model = bochner_from(pt_model);
  const auto grid = RealizationGrid::symmetric(1.5, 5);
  const auto f1 = sample_realization(model, grid, 777);
  const auto f2 = sample_realization(model, grid, 777);
  REQUIRE(f1.values.size() == f2.values.size());
  for (std::size_t i = 0; i < f1.values.size(); ++i) CHECK(f1.values[i] == f2.values[i]);
  const auto f3 = sample_realization(model, grid, 778);
  CHECK(f1.values != f3.values);
}

TEST_CASE("realizations have zero mean") {
  const BochnerModel model = bochner_from(pt_model);
  const auto grid = RealizationGrid::symmetric(1.0, 3);
  const int n = 400;
  std::vector<Complex> sum(grid.size(), Complex{});
  std::vector<double> sumsq(grid.size(), 0.0);
  for (int m = 0; m < n; ++m) {
    const auto field = sample_realization(model, grid, detail::derive_seed(31337, m));
    for (std::size_t i = 0; i < field.values.size(); ++i) {
      sum[i] += field.values[i];
      sumsq[i] += std::norm(field.values[i]);
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex mean = sum[i] / static_cast<double>(n);
    const double se = std::sqrt(sumsq[i] / n / n);  // bounds the component stderr
    CHECK(std::abs(mean) <= 5.0 * se + 1e-12);
  }
}

TEST_CASE("ensemble estimate matches the closed form") {
  // correlation length twice the envelope keeps the 9^3 sampling grid's
  // alias period (~5 d) far from the probed separations
  const PtSchellLinear target{1.0, 1.0, 2.0, {0.3, 0.0, 0.2}, {0.1, -0.2, 0.0}};
  const BochnerModel kernel = bochner_from(target);
  detail::SplitMix64 rng(13);

  std::vector<ProbePair> pairs;
  for (int i = 0; i < 12; ++i)
    pairs.push_back({random_in_ball(rng, 1.2), random_in_ball(rng, 1.2)});
  const auto estimates = estimate_correlation_batch(kernel, pairs, 4000, 2024);

  int hits = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Complex closed = correlation_value(target, pairs[i].r1, pairs[i].r2);
    const Complex delta = estimates[i].mean - closed;
    if (std::abs(delta.real()) <= 5.0 * estimates[i].stderr_est &&
        std::abs(delta.imag()) <= 5.0 * estimates[i].stderr_est)
      ++hits;
  }
  CHECK(hits >= 11);

  // diagonal: real, positive
  const auto diag = estimate_correlation(kernel, pairs[0].r1, pairs[0].r1, 500, 5);
  CHECK(std::abs(diag.mean.imag()) <= 5.0 * diag.stderr_est);
  CHECK(diag.mean.real() > 0.0);

  // symmetric points carry the anti-strength phase cis(2 gamma.r)
  const Vec3 r{0.5, -0.4, 0.3};
  const auto sym = estimate_correlation(kernel, -r, r, 4000, 6064);
  const Complex expected = anti_strength(MediumModel{target}, r);
  CHECK(std::abs((sym.mean - expected).real()) <= 5.0 * sym.stderr_est);
  CHECK(std::abs((sym.mean - expected).imag()) <= 5.0 * sym.stderr_est);

  CHECK_THROWS_AS(estimate_correlation(kernel, r, r, 50, 1), std::invalid_argument);
}

TEST_CASE("estimator matches its own discrete covariance tightly") {
  const BochnerModel kernel = bochner_from(pt_model);
  const Vec3 r1{0.4, 0.1, -0.2}, r2{-0.3, 0.2, 0.5};
  const auto est = estimate_correlation(kernel, r1, r2, 20000, 31);
  const Complex target = discrete_covariance(kernel, r1, r2);
  CHECK(std::abs((est.mean - target).real()) <= 5.0 * est.stderr_est);
  CHECK(std::abs((est.mean - target).imag()) <= 5.0 * est.stderr_est);
}

TEST_CASE("Gram matrices of shipped models are positive semidefinite") {
  detail::SplitMix64 rng(17);
  std::vector<Vec3> points;
  for (int i = 0; i < 50; ++i) points.push_back(random_in_ball(rng, 1.5));

  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model},
                                        MediumModel{bochner_from(pt_model)},
                                        MediumModel{bochner_cosine(1.1, 1.0, 0.8)}};
  for (const auto& model : models) {
    const auto report = gram_psd_check(model, points);
    CHECK(report.pass);
    CHECK(report.min_eigenvalue >= -1e-10 * report.normalized_trace);
  }
}

TEST_CASE("non-PSD control fails the Gram check") {
  detail::SplitMix64 rng(19);
  std::vector<Vec3> points;
  for (int i = 0; i < 30; ++i) points.push_back(random_in_ball(rng, 1.0));
  const auto report = gram_psd_check_fn(
      [](const Vec3& r1, const Vec3& r2) {
        return Complex{std::exp(+(r1 - r2).norm2()), 0.0};
      },
      points);
  CHECK_FALSE(report.pass);
  CHECK(report.min_eigenvalue < 0.0);
}

TEST_CASE("gram_psd_check validates the point budget") {
  std::vector<Vec3> too_many(201);
  CHECK_THROWS_AS(gram_psd_check(MediumModel{pt_model}, too_many), std::invalid_argument);
}
