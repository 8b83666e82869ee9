#pragma once

// Reference values computed without the library: closed forms, hyper-dual
// differentiation and adaptive Simpson quadrature.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Hyper-dual number a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0. Evaluating
// f(x + e1 + e2) gives f(x), f'(x) (in b and c) and f''(x) (in d) exactly.
struct HyperDual {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

inline HyperDual variable(double x) { return {x, 1.0, 1.0, 0.0}; }
inline HyperDual constant(double x) { return {x, 0.0, 0.0, 0.0}; }

inline HyperDual operator+(HyperDual x, HyperDual y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}
inline HyperDual operator-(HyperDual x, HyperDual y) {
  return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
inline HyperDual operator*(HyperDual x, HyperDual y) {
  return {x.a * y.a, x.a * y.b + x.b * y.a, x.a * y.c + x.c * y.a,
          x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a};
}
inline HyperDual reciprocal(HyperDual x) {
  const double i = 1.0 / x.a;
  return {i, -x.b * i * i, -x.c * i * i, (2.0 * x.b * x.c * i - x.d) * i * i};
}
inline HyperDual operator/(HyperDual x, HyperDual y) { return x * reciprocal(y); }

// Q applied to the deviation w = W - m xi:  -4 xi w'' - w (m + w') / pi.
inline double q_of_deviation(const std::function<HyperDual(HyperDual)>& w, double m, double xi) {
  const HyperDual r = w(variable(xi));
  return -4.0 * xi * r.d - r.a * (m + r.b) / pi;
}

inline double q_super(double a, double m, double xi) {
  return q_of_deviation(
      [=](HyperDual x) {
        return constant(m) * x * (constant(1.0) - x) / (constant(a) + x);
      },
      m, xi);
}

inline double q_sub(double b, double m, double xi) {
  return q_of_deviation(
      [=](HyperDual x) {
        return constant(-m) * x * (constant(1.0) - x) / (constant(b + 1.0) - x);
      },
      m, xi);
}

// Mass of 8 l^2 / (l^2 + r^2)^2 inside r^2 = xi.
inline double pks_mass(double lambda, double xi) {
  return 8.0 * pi * xi / (lambda * lambda + xi);
}

inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-13, int depth = 50) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole, int d) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
          return left + right + (left + right - whole) / 15.0;
        }
        return rec(a, m, fa, flm, fm, left, d - 1) + rec(m, b, fm, frm, fb, right, d - 1);
      };
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  return rec(lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

// Random nondecreasing profile with M(0) = 0, M(1) = m built from positive
// increments, independent of the library's corpus generator.
inline std::vector<double> random_monotone(const std::vector<double>& xi, double m,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double k1 = 0.5 + 4.0 * uni(rng);
  const double c1 = uni(rng);
  const double w1 = 0.05 + 0.3 * uni(rng);
  std::vector<double> density(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double z = (xi[i] - c1) / w1;
    density[i] = 0.2 + k1 * std::exp(-z * z);
  }
  std::vector<double> M(xi.size(), 0.0);
  for (std::size_t i = 1; i < xi.size(); ++i) {
    M[i] = M[i - 1] + 0.5 * (density[i] + density[i - 1]) * (xi[i] - xi[i - 1]);
  }
  const double total = M.back();
  for (double& v : M) v *= m / total;
  M.back() = m;
  return M;
}

}  // namespace oracle
