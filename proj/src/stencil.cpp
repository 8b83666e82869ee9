#include "critmass/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critmass {

StencilWeights first_derivative_weights(const Grid& grid, std::size_t i) {
  const double hm = grid[i] - grid[i - 1];
  const double hp = grid[i + 1] - grid[i];
  return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

StencilWeights second_derivative_weights(const Grid& grid, std::size_t i) {
  const double hm = grid[i] - grid[i - 1];
  const double hp = grid[i + 1] - grid[i];
  return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

std::vector<double> differentiate(const Grid& grid, std::span<const double> f) {
  const std::size_t n = grid.size();
  if (f.size() != n) throw std::invalid_argument("differentiate: sample count != grid size");
  std::vector<double> d(n);
  auto slope = [&](std::size_t i) { return (f[i + 1] - f[i]) / grid.spacing(i); };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = grid.spacing(i - 1);
    const double hp = grid.spacing(i);
    // convex combination of the two chord slopes
    d[i] = (hp * slope(i - 1) + hm * slope(i)) / (hm + hp);
  }
  {
    const double h1 = grid.spacing(0);
    const double h2 = grid.spacing(1);
    d[0] = slope(0) - h1 * (slope(1) - slope(0)) / (h1 + h2);
  }
  {
    const double h1 = grid.spacing(n - 2);
    const double h2 = grid.spacing(n - 3);
    d[n - 1] = slope(n - 2) + h1 * (slope(n - 2) - slope(n - 3)) / (h1 + h2);
  }
  return d;
}

std::vector<double> second_differentiate(const Grid& grid, std::span<const double> f) {
  const std::size_t n = grid.size();
  if (f.size() != n) throw std::invalid_argument("second_differentiate: sample count != grid size");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = grid.spacing(i - 1);
    const double hp = grid.spacing(i);
    const double sm = (f[i] - f[i - 1]) / hm;
    const double sp = (f[i + 1] - f[i]) / hp;
    d[i] = 2.0 * (sp - sm) / (hm + hp);
  }
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

namespace {

double trapezoid_on(std::span<const double> x, std::span<const double> f, std::size_t stride) {
  double sum = 0.0;
  std::size_t i = 0;
  const std::size_t last = x.size() - 1;
  while (i < last) {
    const std::size_t j = std::min(i + stride, last);
    sum += 0.5 * (x[j] - x[i]) * (f[i] + f[j]);
    i = j;
  }
  return sum;
}

}  // namespace

Integral trapezoid(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw std::invalid_argument("trapezoid: sample count != grid size");
  const double fine = trapezoid_on(grid.nodes(), f, 1);
  const double coarse = trapezoid_on(grid.nodes(), f, 2);
  return {fine, std::abs(fine - coarse) / 3.0};
}

std::vector<double> cumulative_trapezoid(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) {
    throw std::invalid_argument("cumulative_trapezoid: sample count != grid size");
  }
  std::vector<double> out(f.size());
  out[0] = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * grid.spacing(i - 1) * (f[i - 1] + f[i]);
  }
  return out;
}

}  // namespace critmass
