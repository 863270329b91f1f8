#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsp {

using Field = std::vector<double>;

/// Uniform node-centred grid on [-L, L] with N cells (N + 1 nodes).
class Grid {
 public:
  Grid(double half_width, int n_cells);

  double half_width() const noexcept { return half_width_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_cells_) + 1; }
  double dx() const noexcept { return dx_; }

  // (2i - N) * (L / N) keeps x_{N-i} == -x_i bit for bit.
  double x(std::size_t i) const noexcept {
    return (2.0 * static_cast<double>(i) - n_cells_) * (half_width_ / n_cells_);
  }
  Field nodes() const;

 private:
  double half_width_;
  int n_cells_;
  double dx_;
};

double trapezoid(std::span<const double> f, double dx);

/// Second-order central first derivative; second-order one-sided at the ends.
Field central_derivative(std::span<const double> f, double dx);

/// Second-order central second derivative; second-order one-sided at the ends.
Field second_derivative(std::span<const double> f, double dx);

/// (f[i+1] - f[i]) / dx, one entry shorter than the input.
Field forward_difference(std::span<const double> f, double dx);

double max_abs(std::span<const double> f);

}  // namespace nsp
