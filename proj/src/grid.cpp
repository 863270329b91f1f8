#include "nsp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsp/errors.hpp"

namespace nsp {

Grid::Grid(double half_width, int n_cells)
    : half_width_(half_width), n_cells_(n_cells), dx_(2.0 * half_width / n_cells) {
  std::vector<std::string> bad;
  if (!(half_width > 0.0) || !std::isfinite(half_width)) bad.push_back("grid half_width must be positive");
  if (n_cells < 16) bad.push_back("grid n_cells must be at least 16");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

Field Grid::nodes() const {
  Field out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
  return out;
}

double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * dx;
}

Field central_derivative(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  Field d(n, 0.0);
  if (n < 3) return d;
  const double inv2 = 0.5 / dx;
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
  return d;
}

Field second_derivative(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  Field d(n, 0.0);
  if (n < 4) return d;
  const double inv = 1.0 / (dx * dx);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
  return d;
}

Field forward_difference(std::span<const double> f, double dx) {
  if (f.size() < 2) return {};
  Field d(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) d[i] = (f[i + 1] - f[i]) / dx;
  return d;
}

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace nsp
