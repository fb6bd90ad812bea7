#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ptscat::detail {

struct Nodes1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
inline Nodes1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Nodes1D out;
  out.x.resize(n);
  out.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    out.x[i] = -z;
    out.x[n - 1 - i] = z;
    out.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    out.w[n - 1 - i] = out.w[i];
  }
  return out;
}

// Nodes/weights scaled to [-half_width, half_width].
inline Nodes1D gauss_legendre_scaled(int n, double half_width) {
  Nodes1D out = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] *= half_width;
    out.w[i] *= half_width;
  }
  return out;
}

// Gauss-Hermite nodes/weights for weight exp(-t^2), physicists' convention.
inline Nodes1D gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  Nodes1D out;
  out.x.resize(n);
  out.w.resize(n);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * out.x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * out.x[1];
    } else {
      z = 2.0 * z - out.x[i - 2];
    }
    const double pim4 = 0.7511255444649425;  // pi^(-1/4)
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = pim4, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = z * std::sqrt(2.0 / (j + 1.0)) * p1 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p2;
      }
      pp = std::sqrt(2.0 * n) * p1;
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14) break;
    }
    out.x[i] = z;
    out.x[n - 1 - i] = -z;
    out.w[i] = 2.0 / (pp * pp);
    out.w[n - 1 - i] = out.w[i];
  }
  return out;
}

// Uniform nodes with trapezoid weights on [lo, hi].
inline Nodes1D trapezoid(int n, double lo, double hi) {
  if (n < 2) throw std::invalid_argument("trapezoid: n < 2");
  Nodes1D out;
  out.x.resize(n);
  out.w.resize(n);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    out.x[i] = lo + h * i;
    out.w[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  return out;
}

}  // namespace ptscat::detail
