#pragma once

#include <optional>
#include <span>

#include "nsp/grid.hpp"

namespace nsp::poisson {

struct PhiField {
  Field phi;
  int newton_iters = 0;
  double residual_norm = 0.0;
};

struct Dirichlet {
  double left = 0.0;
  double right = 0.0;
};

struct NewtonParams {
  double tolerance = 1e-10;
  int max_iters = 50;
  int max_halvings = 10;
};

/// Solves -(phi_x / v)_x = 1 - v e^phi with Dirichlet ends by damped Newton.
/// Without a guess the quasi-neutral state -ln v is used.
PhiField solve_phi(std::span<const double> v, const Grid& grid, Dirichlet bc,
                   std::optional<std::span<const double>> guess = std::nullopt,
                   const NewtonParams& params = {});

/// Discrete L2 norm of the elliptic residual over interior nodes.
double poisson_residual(std::span<const double> v, std::span<const double> phi, const Grid& grid);

/// Discrete L2 norm of phi_x/v - [1/v + (1/v)(phi_x/v)_x - (phi_x/v)^2 / 2]_x.
double trf_residual(std::span<const double> v, std::span<const double> phi, const Grid& grid);

/// Phi = (phi_x/v)^2 / 2 - (1/v)(phi_x/v)_x at every node.
Field electric_force(std::span<const double> v, std::span<const double> phi, const Grid& grid);

/// phi_x / v with central differences and one-sided ends.
Field electric_field(std::span<const double> v, std::span<const double> phi, const Grid& grid);

}  // namespace nsp::poisson
