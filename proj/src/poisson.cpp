#include "nsp/poisson.hpp"

#include <cmath>
#include <string>

#include "nsp/errors.hpp"

namespace nsp::poisson {

namespace {

void require_positive(std::span<const double> v) {
  for (double x : v) {
    if (!(x > 0.0)) throw NonPositiveVolume("poisson: v must be positive everywhere");
  }
}

// (phi_x / v)_x at node i with the face volume taken as the two-point mean.
double flux_divergence(std::span<const double> v, std::span<const double> phi, std::size_t i, double dx) {
  const double vr = 0.5 * (v[i] + v[i + 1]);
  const double vl = 0.5 * (v[i] + v[i - 1]);
  return ((phi[i + 1] - phi[i]) / vr - (phi[i] - phi[i - 1]) / vl) / (dx * dx);
}

double residual_at(std::span<const double> v, std::span<const double> phi, std::size_t i, double dx) {
  return -flux_divergence(v, phi, i, dx) - 1.0 + v[i] * std::exp(phi[i]);
}

double interior_norm(std::span<const double> v, std::span<const double> phi, double dx) {
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double r = residual_at(v, phi, i, dx);
    sum += dx * r * r;
  }
  return std::sqrt(sum);
}

}  // namespace

PhiField solve_phi(std::span<const double> v, const Grid& grid, Dirichlet bc,
                   std::optional<std::span<const double>> guess, const NewtonParams& params) {
  const std::size_t n = grid.size();
  if (v.size() != n) throw ValidationError({"solve_phi: v has the wrong length"});
  require_positive(v);
  const double dx = grid.dx();

  PhiField out;
  if (guess && guess->size() == n) {
    out.phi.assign(guess->begin(), guess->end());
  } else {
    out.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.phi[i] = -std::log(v[i]);
  }
  Field& phi = out.phi;
  phi.front() = bc.left;
  phi.back() = bc.right;

  Field lower(n), diag(n), upper(n), rhs(n), trial(n);
  double norm = interior_norm(v, phi, dx);
  const double inv = 1.0 / (dx * dx);

  for (int it = 0;; ++it) {
    out.residual_norm = norm;
    out.newton_iters = it;
    if (norm < params.tolerance) return out;
    if (it == params.max_iters || !std::isfinite(norm)) {
      throw NewtonDiverged("solve_phi: no convergence after " + std::to_string(it) + " Newton iterations", norm);
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double gr = inv / (0.5 * (v[i] + v[i + 1]));
      const double gl = inv / (0.5 * (v[i] + v[i - 1]));
      lower[i] = -gl;
      upper[i] = -gr;
      diag[i] = gl + gr + v[i] * std::exp(phi[i]);
      rhs[i] = -residual_at(v, phi, i, dx);
    }
    // Thomas algorithm on the interior unknowns; the boundary corrections are zero.
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 2] /= diag[n - 2];
    for (std::size_t i = n - 2; i-- > 1;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];

    double step = 1.0;
    double trial_norm = norm;
    for (int halving = 0; halving <= params.max_halvings; ++halving) {
      trial = phi;
      for (std::size_t i = 1; i + 1 < n; ++i) trial[i] += step * rhs[i];
      trial_norm = interior_norm(v, trial, dx);
      if (trial_norm < norm) break;
      step *= 0.5;
    }
    phi.swap(trial);
    norm = trial_norm;
  }
}

double poisson_residual(std::span<const double> v, std::span<const double> phi, const Grid& grid) {
  return interior_norm(v, phi, grid.dx());
}

Field electric_field(std::span<const double> v, std::span<const double> phi, const Grid& grid) {
  Field e = central_derivative(phi, grid.dx());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] /= v[i];
  return e;
}

Field electric_force(std::span<const double> v, std::span<const double> phi, const Grid& grid) {
  const std::size_t n = v.size();
  const double dx = grid.dx();
  const Field e = electric_field(v, phi, grid);
  Field k = central_derivative(e, dx);
  for (std::size_t i = 1; i + 1 < n; ++i) k[i] = flux_divergence(v, phi, i, dx);
  Field out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * e[i] * e[i] - k[i] / v[i];
  return out;
}

double trf_residual(std::span<const double> v, std::span<const double> phi, const Grid& grid) {
  const std::size_t n = v.size();
  const double dx = grid.dx();
  if (n < 5) return 0.0;
  Field e(n, 0.0), w(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    e[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * dx * v[i]);
    w[i] = 1.0 / v[i] + flux_divergence(v, phi, i, dx) / v[i] - 0.5 * e[i] * e[i];
  }
  double sum = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double r = e[i] - (w[i + 1] - w[i - 1]) / (2.0 * dx);
    sum += dx * r * r;
  }
  return std::sqrt(sum);
}

}  // namespace nsp::poisson
