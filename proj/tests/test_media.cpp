#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ptscat/detail/rng.hpp"
#include "ptscat/media.hpp"

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

TEST_CASE("potential_from_index basics") {
  CHECK(potential_from_index(2.0, {1.0, 0.0, {}}) == Complex{0.0, 0.0});

  // real even index -> real potential
  const Complex f = potential_from_index(1.5, {1.2, 0.0, {}});
  CHECK(f.imag() == 0.0);
  CHECK(f.real() > 0.0);

  CHECK_THROWS_AS(potential_from_index(0.0, {1.0, 0.0, {}}), std::invalid_argument);
}

TEST_CASE("potential square imaginary part identity") {
  // Im F^2 = (k^4/4 pi^4) nr ni (nr^2 - ni^2 - 1) pointwise
  detail::SplitMix64 rng(5);
  const double k = 1.7;
  const double pi4 = std::pow(std::numbers::pi, 4);
  for (int i = 0; i < 300; ++i) {
    const double nr = rng.uniform(0.5, 2.0);
    const double ni = rng.uniform(-0.5, 0.5);
    const Complex f = potential_from_index(k, {nr, ni, {}});
    const double expected = std::pow(k, 4) / (4.0 * pi4) * nr * ni * (nr * nr - ni * ni - 1.0);
    CHECK((f * f).imag() == Catch::Approx(expected).margin(1e-15 * std::pow(k, 4)));
  }
}

TEST_CASE("model constructors validate positivity") {
  CHECK_THROWS_AS(PtSchellLinear(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PtSchellLinear(1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClassicQuadratic(1.0, 1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("correlation closed forms at notable points") {
  const MediumModel pt{pt_model};

  // coincident points: real positive Gaussian peak
  const Vec3 r{0.3, -0.2, 0.5};
  const Complex diag = correlation(pt, r, r).value;
  CHECK(diag.imag() == 0.0);
  CHECK(diag.real() ==
        Catch::Approx(pt_model.I0 * pt_model.I0 * std::exp(-r.norm2() / (pt_model.a * pt_model.a))));
  CHECK(strength(pt, Vec3{}) == Catch::Approx(pt_model.I0 * pt_model.I0));

  // symmetric points: envelope * correlation decay * linear phase at 2r
  const Complex sym = correlation(pt, -r, r).value;
  const double mag = pt_model.I0 * pt_model.I0 *
                     std::exp(-r.norm2() / (pt_model.a * pt_model.a) -
                              2.0 * r.norm2() / (pt_model.d * pt_model.d));
  const Complex expected = mag * cis(2.0 * pt_model.gamma().dot(r));
  CHECK(std::abs(sym - expected) < 1e-14 * std::abs(expected));
}

TEST_CASE("correlation is Hermitian for every family") {
  detail::SplitMix64 rng(17);
  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model},
                                        MediumModel{bochner_from(pt_model)},
                                        MediumModel{bochner_cosine(1.1, 1.0, 0.8)}};
  for (const auto& model : models) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 r1 = random_in_ball(rng, 1.5);
      const Vec3 r2 = random_in_ball(rng, 1.5);
      const Complex c12 = correlation(model, r1, r2).value;
      const Complex c21 = correlation(model, r2, r1).value;
      CHECK(std::abs(c21 - std::conj(c12)) <= 1e-12 * std::abs(c12));
    }
  }
}

TEST_CASE("strength is even and nonnegative") {
  detail::SplitMix64 rng(23);
  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model}};
  for (const auto& model : models) {
    for (int i = 0; i < 100; ++i) {
      const Vec3 r = random_in_ball(rng, 2.0);
      const double fwd = strength(model, r);
      CHECK(fwd >= 0.0);
      CHECK(std::abs(strength(model, -r) - fwd) <= 1e-12 * fwd);
    }
  }
}

TEST_CASE("anti-strength properties") {
  // Im N(0) = 0 for every model
  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model},
                                        MediumModel{bochner_from(pt_model)}};
  for (const auto& model : models) CHECK(anti_strength(model, Vec3{}).imag() == 0.0);

  // linear-phase family: N(r) = I0^2 exp(-r^2/a^2 - 2 r^2/d^2) cis(2 gamma.r)
  detail::SplitMix64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const Vec3 r = random_in_ball(rng, 1.5);
    const Complex n = anti_strength(MediumModel{pt_model}, r);
    const double mag = pt_model.I0 * pt_model.I0 *
                       std::exp(-r.norm2() / (pt_model.a * pt_model.a) -
                                2.0 * r.norm2() / (pt_model.d * pt_model.d));
    CHECK(std::abs(n - mag * cis(2.0 * pt_model.gamma().dot(r))) < 1e-13 * mag);
  }

  // gamma = 0: no phase, N real
  const PtSchellLinear balanced{1.0, 1.0, 1.0, {0.5, -0.2, 0.1}, {-0.5, 0.2, -0.1}};
  for (int i = 0; i < 50; ++i) {
    const Vec3 r = random_in_ball(rng, 1.5);
    CHECK(anti_strength(MediumModel{balanced}, r).imag() == 0.0);
  }
}

TEST_CASE("degree of correlation") {
  const MediumModel pt{pt_model};
  detail::SplitMix64 rng(31);

  const Vec3 r = random_in_ball(rng, 1.0);
  CHECK(std::abs(degree_of_correlation(pt, r, r) - 1.0) < 1e-14);

  // symmetric points: mu = N(r)/I(r)
  for (int i = 0; i < 30; ++i) {
    const Vec3 p = random_in_ball(rng, 1.2);
    const Complex mu = degree_of_correlation(pt, -p, p);
    const Complex ratio = anti_strength(pt, p) / strength(pt, p);
    CHECK(std::abs(mu - ratio) < 1e-12);
  }

  // Cauchy-Schwarz bound over many pairs, all families
  const std::vector<MediumModel> models{MediumModel{pt_model}, MediumModel{cl_model}};
  for (const auto& model : models) {
    for (int i = 0; i < 10000; ++i) {
      const Vec3 r1 = random_in_ball(rng, 2.0);
      const Vec3 r2 = random_in_ball(rng, 2.0);
      CHECK(std::abs(degree_of_correlation(model, r1, r2)) <= 1.0 + 1e-9);
    }
  }
  const MediumModel bochner{bochner_from(pt_model)};
  for (int i = 0; i < 500; ++i) {
    const Vec3 r1 = random_in_ball(rng, 1.5);
    const Vec3 r2 = random_in_ball(rng, 1.5);
    CHECK(std::abs(degree_of_correlation(bochner, r1, r2)) <= 1.0 + 1e-9);
  }

  CHECK_THROWS_AS(degree_of_correlation(pt, {60.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), ZeroStrength);
}

TEST_CASE("parity identities for the two families") {
  detail::SplitMix64 rng(37);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r1 = random_in_ball(rng, 1.5);
    const Vec3 r2 = random_in_ball(rng, 1.5);

    // classic: C(r2,r1) = conj(C(-r1,-r2))
    const Complex ccl = correlation(MediumModel{cl_model}, r2, r1).value;
    const Complex ccl_mirror = correlation(MediumModel{cl_model}, -r1, -r2).value;
    CHECK(std::abs(ccl - std::conj(ccl_mirror)) <= 1e-12 * std::abs(ccl));

    // conjugate-parity: C(r2,r1) = C(-r1,-r2)
    const Complex cpt = correlation(MediumModel{pt_model}, r2, r1).value;
    const Complex cpt_mirror = correlation(MediumModel{pt_model}, -r1, -r2).value;
    CHECK(std::abs(cpt - cpt_mirror) <= 1e-12 * std::abs(cpt));
  }
}

TEST_CASE("classify_symmetry") {
  detail::SplitMix64 rng(41);
  std::vector<ProbePair> probes;
  for (int i = 0; i < 60; ++i)
    probes.push_back({random_in_ball(rng, 1.2), random_in_ball(rng, 1.2)});

  CHECK(classify_symmetry(MediumModel{pt_model}, probes) == SymmetryClass::pt);
  CHECK(classify_symmetry(MediumModel{cl_model}, probes) == SymmetryClass::classic);

  // vanishing combined phase: simultaneously classic and conjugate-parity
  const PtSchellLinear cancelled{1.0, 1.0, 1.0, {0.7, -0.3, 0.2}, {-0.7, 0.3, -0.2}};
  CHECK(classify_symmetry(MediumModel{cancelled}, probes) == SymmetryClass::both);

  CHECK_THROWS_AS(classify_symmetry(MediumModel{pt_model}, {}), std::invalid_argument);
}

TEST_CASE("weight transform pair") {
  const GaussianWeight p{{-0.05, 0.08, 0.02}, 0.11, 1.0};
  const WeightFn w{p};

  // zero lag: the root transform integrates sqrt(p) > 0
  const Complex g0 = weight_root_transform(w, Vec3{});
  CHECK(g0.imag() == 0.0);
  CHECK(g0.real() > 0.0);

  // transform of p at zero lag equals the mass
  CHECK(std::abs(weight_transform(w, Vec3{}) - Complex{1.0, 0.0}) < 1e-14);

  // self-convolution of the root transform reproduces the transform of p:
  // both pipelines are analytic for Gaussian weights, so compare them
  // through the Gaussian convolution identity on a lag grid.
  detail::SplitMix64 rng(43);
  const double s2 = p.sigma * p.sigma;
  const double b = 4.0 * std::numbers::pi * std::numbers::pi * s2;
  const double c_amp = std::abs(weight_root_transform(w, Vec3{}));
  for (int i = 0; i < 40; ++i) {
    const Vec3 rd = random_in_ball(rng, 2.0);
    // g = c exp(-b rd^2) cis(-2 pi v0.rd), so
    // (g (x) g)(rd) = c^2 (pi/2b)^(3/2) exp(-b rd^2/2) cis(-2 pi v0.rd)
    const Complex mu_from_g = c_amp * c_amp * std::pow(std::numbers::pi / (2.0 * b), 1.5) *
                              std::exp(-0.5 * b * rd.norm2()) *
                              cis(-kTwoPi * p.center.dot(rd));
    const Complex mu_direct = weight_transform(w, rd);
    CHECK(std::abs(mu_from_g - mu_direct) < 1e-8 * std::abs(mu_direct));
  }
}

TEST_CASE("tabulated weight matches Gaussian analytics") {
  // tabulate the same Gaussian and compare both transforms
  const GaussianWeight p{{0.02, -0.03, 0.01}, 0.09, 1.0};
  const int n = 65;
  const double half = 8.0 * p.sigma;  // sqrt(p) is wider than p; cover it too
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -half + 2.0 * half * i / (n - 1);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n) * n * n);
  const double amp = std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, -1.5);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 u{axis[i], axis[j], axis[l]};
        vals.push_back(amp * std::exp(-u.norm2() / (2.0 * p.sigma * p.sigma)));
      }
  std::vector<double> ax_x(axis), ax_y(axis), ax_z(axis);
  for (auto& x : ax_x) x += p.center.x;
  for (auto& y : ax_y) y += p.center.y;
  for (auto& z : ax_z) z += p.center.z;
  const TabulatedWeight tab{ax_x, ax_y, ax_z, vals};
  const WeightFn wt{tab};
  const WeightFn wg{p};

  CHECK(weight_mass(wt) == Catch::Approx(1.0).epsilon(1e-6));
  const Vec3 rd{0.8, -0.4, 0.3};
  CHECK(std::abs(weight_transform(wt, rd) - weight_transform(wg, rd)) < 1e-6);
  CHECK(std::abs(weight_root_transform(wt, rd) - weight_root_transform(wg, rd)) < 1e-5);
}

TEST_CASE("tabulated weight rejects bad input") {
  std::vector<double> axis{-1.0, 0.0, 1.0};
  std::vector<double> bad(27, 1.0);
  bad[4] = -0.5;
  CHECK_THROWS_AS(TabulatedWeight(axis, axis, axis, bad), std::invalid_argument);
  std::vector<double> inf(27, 1.0);
  inf[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TabulatedWeight(axis, axis, axis, inf), NonIntegrable);
}

TEST_CASE("Bochner model reproduces the linear-phase closed form") {
  const BochnerModel bochner = bochner_from(pt_model);
  detail::SplitMix64 rng(47);
  for (int i = 0; i < 40; ++i) {
    const Vec3 r1 = random_in_ball(rng, 1.2);
    const Vec3 r2 = random_in_ball(rng, 1.2);
    const Complex direct = correlation_value(pt_model, r1, r2);
    const Complex summed = correlation_value(bochner, r1, r2);
    CHECK(std::abs(summed - direct) < 1e-8 * std::abs(direct));
  }
  CHECK(correlation(MediumModel{bochner}, Vec3{}, Vec3{}).provenance == Provenance::quadrature);
}

TEST_CASE("Bochner kernels satisfy their declared symmetry") {
  detail::SplitMix64 rng(53);
  std::vector<Vec3> rs, vs;
  for (int i = 0; i < 20; ++i) {
    rs.push_back(random_in_ball(rng, 2.0));
    vs.push_back(random_in_ball(rng, 0.5));
  }
  CHECK(bochner_symmetry_violation(bochner_from(pt_model), rs, vs) < 1e-12);
  // quadratic-phase kernel is *not* conjugate-parity symmetric
  CHECK(bochner_symmetry_violation(bochner_from(cl_model), rs, vs) > 1e-3);
}

TEST_CASE("axis factors multiply back to the full correlation") {
  detail::SplitMix64 rng(59);
  for (int i = 0; i < 100; ++i) {
    const Vec3 r1 = random_in_ball(rng, 1.5);
    const Vec3 r2 = random_in_ball(rng, 1.5);

    Complex prod = pt_model.I0 * pt_model.I0 *
                   correlation_axis_factor(pt_model, 0, r1.x, r2.x) *
                   correlation_axis_factor(pt_model, 1, r1.y, r2.y) *
                   correlation_axis_factor(pt_model, 2, r1.z, r2.z);
    CHECK(std::abs(prod - correlation_value(pt_model, r1, r2)) < 1e-14);

    prod = cl_model.I0 * cl_model.I0 * correlation_axis_factor(cl_model, 0, r1.x, r2.x) *
           correlation_axis_factor(cl_model, 1, r1.y, r2.y) *
           correlation_axis_factor(cl_model, 2, r1.z, r2.z);
    CHECK(std::abs(prod - correlation_value(cl_model, r1, r2)) < 1e-14);
  }
}
